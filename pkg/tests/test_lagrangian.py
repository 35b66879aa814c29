"""
Tests for Lagrangian subspaces, sublagrangian completion and the
Hilbert-Schmidt equivalence diagnostic.
"""
import numpy as np
import pytest

from fockbundle import settings
from fockbundle.clifford import random_orthogonal
from fockbundle.errors import InvariantViolationError, ParameterError
from fockbundle.lagrangian import (
    Lagrangian,
    Subspace,
    Sublagrangian,
    complete_sublagrangian,
    embed_unitary,
    equivalence_diagnostic,
    growth_verdict,
    hs_distance,
    is_lagrangian,
    make_sublagrangian,
    offdiagonal_hs_sq,
    orthonormalize,
    standard_lagrangian,
)
from fockbundle.modespace import apply_alpha, build_mode_space


@pytest.mark.unit
class TestStandardLagrangians:
    """The standard Lagrangians of both parities."""

    def test_odd_standard_is_lagrangian(self, odd_space):
        L = standard_lagrangian(odd_space)
        assert L.rank == odd_space.dim // 2
        assert is_lagrangian(odd_space, L).ok

    def test_even_standard_is_lagrangian(self, even_space):
        L = standard_lagrangian(even_space)
        check = is_lagrangian(even_space, L)
        assert check.ok
        assert check.isotropy_residual < 1e-12

    def test_even_standard_needs_even_fibre(self):
        with pytest.raises(ParameterError):
            standard_lagrangian(build_mode_space("even", 3, 1))

    def test_alpha_of_standard_is_the_complement(self, odd_space):
        L = standard_lagrangian(odd_space)
        assert np.allclose(L.alpha().projector, L.complement_projector)

    def test_complex_structure_squares_to_minus_one(self, odd_space):
        J = standard_lagrangian(odd_space).complex_structure
        assert np.allclose(J @ J, -np.eye(odd_space.dim))

    def test_transform_by_orthogonal_map(self, odd_space, rng):
        g = random_orthogonal(odd_space, rng)
        L = standard_lagrangian(odd_space).transform(g.matrix)
        assert is_lagrangian(odd_space, L).ok

    def test_non_lagrangian_rejected(self, odd_space):
        half = np.eye(odd_space.dim, dtype=complex)[:, :odd_space.dim // 2 - 1]
        with pytest.raises(InvariantViolationError):
            Lagrangian(odd_space, half)
        assert not is_lagrangian(odd_space, Subspace(odd_space, half)).ok

    def test_non_orthonormal_frame_rejected(self, odd_space):
        frame = 2 * standard_lagrangian(odd_space).frame
        with pytest.raises(InvariantViolationError):
            Subspace(odd_space, frame)

    def test_membership_residual(self, odd_space):
        L = standard_lagrangian(odd_space)
        assert L.membership_residual(odd_space.basis_vector(1, 1)) == pytest.approx(0.0)
        assert L.membership_residual(odd_space.basis_vector(-1, 1)) == pytest.approx(1.0)


@pytest.mark.unit
class TestSublagrangian:
    """Isotropic subspaces and their completion."""

    def test_completion_contains_the_sublagrangian(self, odd_space, rng):
        g = random_orthogonal(odd_space, rng)
        L = standard_lagrangian(odd_space).transform(g.matrix)
        sub = make_sublagrangian(odd_space, L.frame[:, :2])
        completed = complete_sublagrangian(sub)
        assert is_lagrangian(odd_space, completed).ok
        assert completed.contains(sub, tol=1e-8)

    def test_zero_sublagrangian_completes_to_standard(self, odd_space):
        sub = make_sublagrangian(odd_space, [])
        completed = complete_sublagrangian(sub)
        assert hs_distance(completed, standard_lagrangian(odd_space)) == pytest.approx(0.0, abs=1e-10)

    def test_completion_is_deterministic(self, odd_space):
        v = (odd_space.basis_vector(-1, 1) + odd_space.basis_vector(0, 2)) * (1 / np.sqrt(2))
        sub = make_sublagrangian(odd_space, [v])
        first, second = complete_sublagrangian(sub), complete_sublagrangian(sub)
        assert hs_distance(first, second) == pytest.approx(0.0, abs=1e-12)

    def test_real_vector_is_not_isotropic(self, odd_space):
        v = odd_space.basis_vector(0, 1)
        real = v + apply_alpha(v)
        with pytest.raises(InvariantViolationError):
            make_sublagrangian(odd_space, [real])

    def test_odd_codimension_rejected(self):
        space = build_mode_space("even", 1, 1)
        with pytest.raises(InvariantViolationError):
            make_sublagrangian(space, [space.basis_vector(1, 1)])

    def test_codim(self, odd_space):
        sub = make_sublagrangian(odd_space, [odd_space.basis_vector(0, 1)])
        assert isinstance(sub, Sublagrangian)
        assert sub.codim == odd_space.dim - 2


@pytest.mark.unit
class TestEquivalenceDiagnostic:
    """Hilbert-Schmidt growth of the off-diagonal projector block."""

    def test_standard_against_itself_is_bounded(self):
        rule = lambda n: standard_lagrangian(build_mode_space("odd", 1, n))  # noqa: E731
        report = equivalence_diagnostic(rule, rule, [1, 2, 3, 4])
        assert report.hs_sq == pytest.approx([0.0] * 4, abs=1e-20)
        assert report.verdict == 'bounded'

    def test_standard_against_alpha_diverges(self):
        d = 2
        std = lambda n: standard_lagrangian(build_mode_space("odd", d, n))  # noqa: E731
        flipped = lambda n: std(n).alpha()  # noqa: E731
        cutoffs = [1, 2, 3, 4]
        report = equivalence_diagnostic(std, flipped, cutoffs)
        assert report.hs_sq == pytest.approx([n * d for n in cutoffs])
        assert report.verdict == 'divergent'

    def test_offdiagonal_of_alpha_pair(self, odd_space):
        L = standard_lagrangian(odd_space)
        assert offdiagonal_hs_sq(L, L.alpha()) == pytest.approx(odd_space.d * odd_space.N)

    def test_short_sequences_are_inconclusive(self):
        assert growth_verdict([0.0, 10.0]) == 'inconclusive'

    def test_divergence_factor_comes_from_settings(self, mocker):
        mocker.patch.object(settings, 'get', side_effect=lambda key, default=None: {
            'diagnostics.divergence_factor': 10.0,
            'diagnostics.divergence_floor': 0.0,
        }.get(key, default))
        assert growth_verdict([1.0, 2.0, 3.0, 4.0]) == 'bounded'

    def test_cutoffs_must_increase(self):
        rule = lambda n: standard_lagrangian(build_mode_space("odd", 1, n))  # noqa: E731
        with pytest.raises(ParameterError):
            equivalence_diagnostic(rule, rule, [2, 2, 3])


@pytest.mark.unit
class TestHelpers:

    def test_orthonormalize_drops_dependent_columns(self):
        matrix = np.array([[1, 2, 0], [0, 0, 1], [0, 0, 0]], dtype=complex)
        q = orthonormalize(matrix)
        assert q.shape == (3, 2)
        assert np.allclose(q.conj().T @ q, np.eye(2))

    def test_embed_unitary_preserves_lagrangian(self, odd_space, rng):
        L = standard_lagrangian(odd_space)
        k = L.rank
        T, _ = np.linalg.qr(rng.normal(size=(k, k)) + 1j * rng.normal(size=(k, k)))
        g = embed_unitary(L, T)
        assert hs_distance(L.transform(g.matrix), L) == pytest.approx(0.0, abs=1e-10)

    def test_embed_unitary_rejects_non_unitary(self, odd_space):
        L = standard_lagrangian(odd_space)
        with pytest.raises(InvariantViolationError):
            embed_unitary(L, 2 * np.eye(L.rank))
