"""
Tests for parallel transport, holonomy spectra and the Dirac eigenbasis.
"""
import numpy as np
import pytest

from fockbundle.errors import ParameterError, ResolutionError, SpaceMismatchError
from fockbundle.dirac import (
    LoopConnection,
    dirac_eigenbasis,
    dirac_frame,
    dirac_lagrangian,
    dirac_pipeline,
    embed_samples,
    equivalence_class_check,
    holonomy_spectrum,
    parallel_transport,
    truncated_dirac,
)
from fockbundle.lagrangian import hs_distance, is_lagrangian, standard_lagrangian
from fockbundle.loopgroup import GROUP, TrigPolyMatrix
from fockbundle.modespace import build_mode_space


@pytest.fixture(scope="module")
def rotation_eighth():
    """Transport and spectrum of the constant connection θJ with θ = 1/8."""
    path = parallel_transport(LoopConnection.rotation(1 / 8))
    return path, holonomy_spectrum(path)


@pytest.fixture(scope="module")
def rotation_half():
    """θ = 1/2: holonomy -1, so the Dirac operator has a two-dimensional kernel."""
    path = parallel_transport(LoopConnection.rotation(0.5))
    return path, holonomy_spectrum(path)


@pytest.mark.unit
class TestTransport:

    def test_flat_transport_is_the_identity(self):
        path = parallel_transport(LoopConnection.flat(2), steps=256)
        assert np.allclose(path.matrices, np.eye(2))
        assert path.matrices.shape == (257, 2, 2)

    def test_rotation_holonomy(self, rotation_eighth):
        path, _ = rotation_eighth
        angle = -2 * np.pi / 8
        expected = np.array([[np.cos(angle), -np.sin(angle)], [np.sin(angle), np.cos(angle)]])
        assert np.allclose(path.holonomy, expected, atol=1e-10)

    def test_transport_stays_in_so_d(self, rng):
        path = parallel_transport(LoopConnection.random(3, 2, rng, scale=0.5))
        assert path.orthogonality_residual() < 1e-10
        assert path.determinant_residual() < 1e-10
        assert path.max_drift < 1e-6

    def test_too_few_steps(self):
        with pytest.raises(ParameterError):
            parallel_transport(LoopConnection.flat(2), steps=8)

    def test_coarse_grid_drifts(self):
        connection = LoopConnection.constant(50 * np.array([[0.0, -1.0], [1.0, 0.0]]))
        with pytest.raises(ResolutionError) as info:
            parallel_transport(connection, steps=64)
        assert info.value.details['steps'] == 64

    def test_group_loop_is_not_a_connection(self):
        with pytest.raises(ParameterError):
            LoopConnection(TrigPolyMatrix(2, {0: np.eye(2)}, GROUP))


@pytest.mark.unit
class TestHolonomySpectrum:

    def test_flat(self):
        spectrum = holonomy_spectrum(parallel_transport(LoopConnection.flat(2), steps=128))
        assert spectrum.angles.tolist() == [0.0, 0.0]
        assert np.allclose(spectrum.vectors.imag, 0)

    def test_rotation_angles_are_paired(self, rotation_eighth):
        _, spectrum = rotation_eighth
        assert spectrum.angles == pytest.approx([-np.pi / 4, np.pi / 4])
        assert spectrum.partner.tolist() == [1, 0]
        assert np.allclose(spectrum.vectors[:, 0], spectrum.vectors[:, 1].conj())
        assert spectrum.residual < 1e-8

    def test_minus_one_has_real_vectors(self, rotation_half):
        _, spectrum = rotation_half
        assert spectrum.angles.tolist() == [-np.pi, -np.pi]
        assert np.allclose(spectrum.vectors.imag, 0)

    def test_generic_so3(self, rng):
        spectrum = holonomy_spectrum(parallel_transport(LoopConnection.random(3, 1, rng, scale=0.7)))
        assert sorted(spectrum.angles) == pytest.approx(sorted(-spectrum.angles))
        assert spectrum.to_dict()['phis'] == [float(p) for p in spectrum.angles]


@pytest.mark.unit
class TestDiracEigenbasis:
    """η_{n,j} = e^{-i(n+1/2)t - iφt/2π} pt(t) v_j."""

    def test_rotation_eigenvalues(self, rotation_eighth):
        path, spectrum = rotation_eighth
        es = dirac_eigenbasis(spectrum, path, 2)
        assert es.eigenvalue(0, 2) == pytest.approx(0.5 + 1 / 8)
        assert es.eigenvalue(0, 1) == pytest.approx(0.5 - 1 / 8)
        assert es.eigenvalue(-1, 2) == pytest.approx(-0.5 + 1 / 8)
        assert es.eigen_residual < 1e-6

    def test_eigenvalues_match_the_truncated_operator(self, rotation_eighth):
        path, spectrum = rotation_eighth
        es = dirac_eigenbasis(spectrum, path, 2)
        space = build_mode_space("odd", 2, 2)
        D = truncated_dirac(path.connection, space)
        assert np.allclose(D, D.conj().T)
        assert np.sort(np.linalg.eigvalsh(D)) == pytest.approx(np.sort(es.eigenvalues))

    def test_orthonormal_and_antiperiodic(self, rotation_eighth):
        path, spectrum = rotation_eighth
        es = dirac_eigenbasis(spectrum, path, 3)
        assert es.orthonormality_residual() < 1e-10
        assert es.antiperiodicity_residual() < 1e-10

    def test_real_structure_and_spectral_symmetry(self, rng):
        connection = LoopConnection.random(3, 1, rng, scale=0.5)
        result = dirac_pipeline(connection, 3)
        es = result['eigensystem']
        assert es.eigen_residual < 1e-5
        assert es.alpha_residual() < 1e-8
        assert es.spectral_symmetry_residual() < 1e-10

    def test_partner_modes(self, rotation_eighth, rotation_half):
        es = dirac_eigenbasis(rotation_eighth[1], rotation_eighth[0], 2)
        assert es.partner_mode(0, 2) == (-1, 1)
        half = dirac_eigenbasis(rotation_half[1], rotation_half[0], 2)
        assert half.partner_mode(1, 1) == (-1, 1)

    def test_kernel_of_the_half_rotation(self, rotation_half):
        path, spectrum = rotation_half
        es = dirac_eigenbasis(spectrum, path, 2)
        kernel = [mode for mode, lam in zip(es.modes, es.eigenvalues) if abs(lam) < 1e-12]
        assert kernel == [(0, 1), (0, 2)]

    def test_flat_eigenfunctions_are_the_standard_modes(self):
        path = parallel_transport(LoopConnection.flat(2), steps=256)
        es = dirac_eigenbasis(holonomy_spectrum(path), path, 2)
        coeffs = embed_samples(es.samples, build_mode_space("odd", 2, 2))
        assert np.allclose(np.abs(coeffs), np.eye(8), atol=1e-10)

    def test_report_shape(self, rotation_eighth):
        data = dirac_eigenbasis(rotation_eighth[1], rotation_eighth[0], 1).to_dict()
        assert set(data) == {'phis', 'lambdas', 'residuals'}
        assert data['lambdas']['0,2'] == pytest.approx(0.625)

    def test_invalid_cutoff(self, rotation_eighth):
        with pytest.raises(ParameterError):
            dirac_eigenbasis(rotation_eighth[1], rotation_eighth[0], 0)

    def test_coarse_grid_fails_the_residual(self, mocker):
        mocker.patch('fockbundle.settings.tolerance', side_effect=lambda name: 1e-14 if name == 'dirac_residual' else 1e-8)
        path = parallel_transport(LoopConnection.rotation(0.3), steps=64)
        with pytest.raises(ResolutionError):
            dirac_eigenbasis(holonomy_spectrum(path), path, 4)


@pytest.mark.integration
class TestDiracLagrangian:

    def test_rotation_gives_the_standard_lagrangian(self, rotation_eighth):
        path, spectrum = rotation_eighth
        space = build_mode_space("odd", 2, 2)
        sub, lagrangian = dirac_lagrangian(spectrum, path, space)
        assert sub.rank == space.dim // 2
        assert hs_distance(lagrangian, standard_lagrangian(space)) < 1e-8

    def test_kernel_is_paired(self, rotation_half):
        path, spectrum = rotation_half
        space = build_mode_space("odd", 2, 2)
        sub, lagrangian = dirac_lagrangian(spectrum, path, space)
        assert is_lagrangian(space, lagrangian).ok
        assert lagrangian.contains(sub, tol=1e-8)

    def test_frame_maps_modes_to_eigenfunctions(self, rotation_eighth):
        path, spectrum = rotation_eighth
        space = build_mode_space("odd", 2, 2)
        frame = dirac_frame(spectrum, path, space)
        v = space.basis_vector(1, 2)
        assert np.allclose(frame.apply(v), frame.eigensystem.samples[space.position(1, 2)])
        assert frame.inverse(frame.apply(v)).allclose(v, atol=1e-10)
        assert frame.gram_residual() < 1e-10

    def test_frame_needs_the_odd_space(self, rotation_eighth):
        with pytest.raises(SpaceMismatchError):
            dirac_frame(rotation_eighth[1], rotation_eighth[0], build_mode_space("even", 2, 1))

    def test_equivalence_check_for_a_rotation(self, rotation_eighth):
        path, spectrum = rotation_eighth
        report = equivalence_class_check(spectrum, path, [1, 2, 3])
        assert report.ok
        assert report.verdict == 'bounded'
        assert report.hs_sq == pytest.approx([0.0] * 3, abs=1e-10)
        assert max(report.inclusion) < 1e-6

    @pytest.mark.slow
    def test_equivalence_check_for_random_connections(self, rng):
        for _ in range(3):
            path = parallel_transport(LoopConnection.random(2, 2, rng, scale=0.5))
            report = equivalence_class_check(holonomy_spectrum(path), path, [4, 6, 8])
            assert report.ok, report.to_dict()
