"""
Tests for orthogonal maps, skew maps and Clifford words.
"""
import numpy as np
import pytest

from fockbundle.clifford import (
    COMPRESSED,
    CliffordWord,
    ModeIsometry,
    OrthogonalMap,
    SkewSymmetricMap,
    alpha_commutator_norm,
    bogoliubov,
    generator,
    random_orthogonal,
    random_skew,
    random_word,
    restricted_diagnostics,
    star,
)
from fockbundle.errors import InvariantViolationError, ParameterError, SpaceMismatchError
from fockbundle.lagrangian import standard_lagrangian
from fockbundle.modespace import apply_alpha, build_mode_space


@pytest.mark.unit
class TestOrthogonalMap:
    """Construction checks and algebra of O(V)."""

    def test_random_orthogonal_is_valid(self, odd_space, rng):
        g = random_orthogonal(odd_space, rng)
        assert g.is_exact
        assert g.defect < 1e-10
        assert alpha_commutator_norm(odd_space, g.matrix) < 1e-10

    def test_composition_and_inverse(self, odd_space, rng):
        g = random_orthogonal(odd_space, rng)
        product = g @ g.inverse()
        assert np.allclose(product.matrix, np.eye(odd_space.dim))

    def test_non_alpha_map_rejected(self, odd_space):
        matrix = np.eye(odd_space.dim, dtype=complex)
        matrix[0, 0] = 1j
        with pytest.raises(InvariantViolationError):
            OrthogonalMap(odd_space, matrix)

    def test_non_unitary_map_rejected_unless_compressed(self, odd_space):
        matrix = 0.5 * np.eye(odd_space.dim)
        with pytest.raises(InvariantViolationError):
            OrthogonalMap(odd_space, matrix)
        compressed = OrthogonalMap(odd_space, matrix, COMPRESSED)
        assert compressed.defect == pytest.approx(0.75 * np.sqrt(odd_space.dim))
        with pytest.raises(InvariantViolationError):
            compressed.require_exact()

    def test_unknown_regime(self, odd_space):
        with pytest.raises(ParameterError):
            OrthogonalMap(odd_space, np.eye(odd_space.dim), 'approximate')

    def test_shape_mismatch(self, odd_space):
        with pytest.raises(ParameterError):
            OrthogonalMap(odd_space, np.eye(odd_space.dim + 1))

    def test_block_diagonal_map_has_zero_offdiagonal(self, odd_space, rng):
        L = standard_lagrangian(odd_space)
        g = random_skew(odd_space, rng, block_diagonal=L).exp()
        diagnostics = g.diagnostics(L)
        assert diagnostics['offdiag_hs'] < 1e-10
        assert diagnostics['commutator_hs'] < 1e-10
        assert diagnostics['j_norm'] == pytest.approx(1.0)

    def test_restricted_diagnostics_of_alpha_swap(self):
        # The flip n -> -n-1 exchanges L and α(L) and is unbounded in HS norm
        def swap(n):
            space = build_mode_space("odd", 1, n)
            return OrthogonalMap(space, np.eye(space.dim)[space.sigma])

        def std(n):
            return standard_lagrangian(build_mode_space("odd", 1, n))

        report = restricted_diagnostics(swap, std, [1, 2, 3, 4])
        assert report.offdiag_hs == pytest.approx([np.sqrt(n) for n in [1, 2, 3, 4]])
        assert report.verdict == 'divergent'


@pytest.mark.unit
class TestSkewSymmetricMap:

    def test_exp_is_orthogonal(self, even_space, rng):
        X = random_skew(even_space, rng, scale=0.7)
        assert X.operator_norm() == pytest.approx(0.7)
        assert X.exp().defect < 1e-10

    def test_bracket_is_skew(self, odd_space, rng):
        X, Y = random_skew(odd_space, rng), random_skew(odd_space, rng)
        assert isinstance(X.bracket(Y), SkewSymmetricMap)

    def test_bandwidth_is_respected(self, rng):
        space = build_mode_space("odd", 1, 4)
        X = random_skew(space, rng, bandwidth=1)
        modes = space.modes
        far = np.abs(modes[:, None] - modes[None, :]) > 1
        assert np.all(X.matrix[far] == 0)

    def test_hermitian_rejected(self, odd_space):
        with pytest.raises(InvariantViolationError):
            SkewSymmetricMap(odd_space, np.eye(odd_space.dim))


@pytest.mark.unit
class TestCliffordWord:

    def test_star_reverses_and_conjugates(self, odd_space, rng):
        v, w = odd_space.random_vector(rng), odd_space.random_vector(rng)
        word = (generator(v) * generator(w)).scale(2j)
        starred = star(word)
        scalar, letters = starred.terms[0]
        assert scalar == pytest.approx(-2j)
        assert letters[0].allclose(apply_alpha(w))
        assert letters[1].allclose(apply_alpha(v))

    def test_star_is_an_involution(self, odd_space, rng):
        word = random_word(odd_space, rng)
        twice = star(star(word))
        for (s1, l1), (s2, l2) in zip(word.terms, twice.terms):
            assert s1 == pytest.approx(s2)
            assert all(a.allclose(b) for a, b in zip(l1, l2))

    def test_bogoliubov_maps_letters(self, odd_space, rng):
        g = random_orthogonal(odd_space, rng)
        v = odd_space.random_vector(rng)
        mapped = bogoliubov(g, generator(v))
        assert mapped.terms[0][1][0].allclose(g.apply(v))

    def test_unit_and_degree(self, odd_space, rng):
        assert CliffordWord.unit(odd_space).degree == 0
        word = generator(odd_space.random_vector(rng)) * generator(odd_space.random_vector(rng))
        assert word.degree == 2
        assert CliffordWord.zero(odd_space).terms == ()

    def test_mixed_spaces_rejected(self, odd_space, even_space):
        with pytest.raises(SpaceMismatchError):
            CliffordWord.unit(odd_space) + CliffordWord.unit(even_space)


@pytest.mark.unit
class TestModeIsometry:

    def test_from_orthogonal_roundtrip(self, odd_space, rng):
        g = random_orthogonal(odd_space, rng)
        nu = ModeIsometry.from_orthogonal(g)
        v = odd_space.random_vector(rng)
        assert nu.inverse().apply(nu.apply(v)).allclose(v, atol=1e-10)

    def test_non_intertwining_rejected(self, odd_space):
        matrix = np.eye(odd_space.dim, dtype=complex)
        matrix[0, 0] = 1j
        with pytest.raises(InvariantViolationError):
            ModeIsometry(odd_space, odd_space, matrix)
