"""
Orthogonal maps, skew maps and formal Clifford words.

Clifford elements are kept as formal sums of products of generators f(v);
they are never normalized symbolically. Identities of the CAR algebra are
checked through the Fock representation in ``fockbundle.fock``.
"""
import logging
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import linalg

from . import settings
from .errors import InvariantViolationError, ParameterError, SpaceMismatchError
from .lagrangian import Lagrangian, growth_verdict
from .modespace import ModeSpace, ModeVector, apply_alpha

logger = logging.getLogger(__name__)

EXACT = 'exact'
COMPRESSED = 'compressed'


def alpha_commutator_norm(space: ModeSpace, matrix: np.ndarray) -> float:
    """‖X - αXα‖ for a linear map X."""
    return float(np.linalg.norm(matrix - space.conjugate_by_alpha(matrix)))


def _check_square(space: ModeSpace, matrix: np.ndarray, name: str) -> np.ndarray:
    matrix = np.asarray(matrix, dtype=complex)
    if matrix.shape != (space.dim, space.dim):
        raise ParameterError(f"{name} of shape {matrix.shape} does not fit {space} (dim {space.dim})")
    return matrix


@dataclass(frozen=True, eq=False)
class OrthogonalMap:
    """Unitary map of a ModeSpace commuting with α.

    ``regime`` is 'exact' for a genuine element of O(V) and 'compressed' for
    the truncation of an operator that is only orthogonal before truncation;
    ``defect`` is then ‖g*g - 1‖.
    """
    space: ModeSpace
    matrix: np.ndarray
    regime: str = EXACT
    defect: float = 0.0

    def __post_init__(self):
        matrix = _check_square(self.space, self.matrix, "orthogonal map")
        unitary_residual = float(np.linalg.norm(matrix.conj().T @ matrix - np.eye(self.space.dim)))
        alpha_residual = alpha_commutator_norm(self.space, matrix)
        tol_a = settings.tolerance('alpha')
        if alpha_residual > tol_a:
            raise InvariantViolationError("map does not commute with α", alpha_residual, tol_a)
        if self.regime == EXACT:
            tol_u = settings.tolerance('unitary')
            if unitary_residual > tol_u:
                raise InvariantViolationError("map is not unitary", unitary_residual, tol_u)
        elif self.regime != COMPRESSED:
            raise ParameterError(f"unknown regime {self.regime!r}")
        matrix.setflags(write=False)
        object.__setattr__(self, 'matrix', matrix)
        object.__setattr__(self, 'defect', unitary_residual)

    @classmethod
    def identity(cls, space: ModeSpace) -> 'OrthogonalMap':
        return cls(space, np.eye(space.dim, dtype=complex))

    @property
    def is_exact(self) -> bool:
        return self.regime == EXACT

    def require_exact(self) -> None:
        if not self.is_exact:
            raise InvariantViolationError(
                "compressed map is not orthogonal", self.defect, settings.tolerance('unitary')
            )

    def __matmul__(self, other: 'OrthogonalMap') -> 'OrthogonalMap':
        if other.space != self.space:
            raise SpaceMismatchError(f"{self.space} and {other.space} differ")
        regime = EXACT if self.is_exact and other.is_exact else COMPRESSED
        return OrthogonalMap(self.space, self.matrix @ other.matrix, regime)

    def inverse(self) -> 'OrthogonalMap':
        return OrthogonalMap(self.space, self.matrix.conj().T, self.regime)

    def apply(self, v: ModeVector) -> ModeVector:
        if v.space != self.space:
            raise SpaceMismatchError(f"{v.space} differs from {self.space}")
        return ModeVector(self.space, self.matrix @ v.coeffs)

    def offdiag_hs(self, lagrangian: Lagrangian) -> float:
        """‖P_L g P_L^⊥‖₂."""
        return float(np.linalg.norm(lagrangian.projector @ self.matrix @ lagrangian.complement_projector))

    def commutator_hs(self, lagrangian: Lagrangian) -> float:
        """‖[g, J_L]‖₂."""
        J = lagrangian.complex_structure
        return float(np.linalg.norm(self.matrix @ J - J @ self.matrix))

    def j_norm(self, lagrangian: Lagrangian) -> float:
        """Restricted norm ‖g‖ + ‖P_L g P_L^⊥‖₂ with the operator norm as largest singular value."""
        op_norm = float(linalg.svdvals(self.matrix)[0])
        return op_norm + self.offdiag_hs(lagrangian)

    def diagnostics(self, lagrangian: Optional[Lagrangian] = None) -> Dict[str, float]:
        report = {
            'alpha_commutator_norm': alpha_commutator_norm(self.space, self.matrix),
            'unitarity_defect': self.defect,
        }
        if lagrangian is not None:
            report.update({
                'offdiag_hs': self.offdiag_hs(lagrangian),
                'commutator_hs': self.commutator_hs(lagrangian),
                'j_norm': self.j_norm(lagrangian),
            })
        return report


@dataclass(frozen=True, eq=False)
class SkewSymmetricMap:
    """Element of 𝔬(V): X* = -X and [X, α] = 0."""
    space: ModeSpace
    matrix: np.ndarray

    def __post_init__(self):
        matrix = _check_square(self.space, self.matrix, "skew map")
        tol = settings.tolerance('alpha')
        skew = float(np.linalg.norm(matrix + matrix.conj().T))
        if skew > tol:
            raise InvariantViolationError("map is not skew-adjoint", skew, tol)
        alpha_residual = alpha_commutator_norm(self.space, matrix)
        if alpha_residual > tol:
            raise InvariantViolationError("map does not commute with α", alpha_residual, tol)
        matrix.setflags(write=False)
        object.__setattr__(self, 'matrix', matrix)

    def __add__(self, other: 'SkewSymmetricMap') -> 'SkewSymmetricMap':
        if other.space != self.space:
            raise SpaceMismatchError(f"{self.space} and {other.space} differ")
        return SkewSymmetricMap(self.space, self.matrix + other.matrix)

    def scaled(self, t: float) -> 'SkewSymmetricMap':
        return SkewSymmetricMap(self.space, float(t) * self.matrix)

    def bracket(self, other: 'SkewSymmetricMap') -> 'SkewSymmetricMap':
        if other.space != self.space:
            raise SpaceMismatchError(f"{self.space} and {other.space} differ")
        return SkewSymmetricMap(self.space, self.matrix @ other.matrix - other.matrix @ self.matrix)

    def exp(self, t: float = 1.0) -> OrthogonalMap:
        return OrthogonalMap(self.space, linalg.expm(float(t) * self.matrix))

    def operator_norm(self) -> float:
        return float(linalg.svdvals(self.matrix)[0]) if self.space.dim else 0.0

    def offdiag_hs(self, lagrangian: Lagrangian) -> float:
        return float(np.linalg.norm(lagrangian.projector @ self.matrix @ lagrangian.complement_projector))

    def is_block_diagonal(self, lagrangian: Lagrangian, tol: float = 1e-12) -> bool:
        return self.offdiag_hs(lagrangian) <= tol


def random_skew(space: ModeSpace, rng: np.random.Generator, scale: float = 1.0,
                bandwidth: Optional[int] = None,
                block_diagonal: Optional[Lagrangian] = None) -> SkewSymmetricMap:
    """Random element of 𝔬(V).

    Args:
        space: mode space
        rng: numpy random generator
        scale: overall scale of the entries
        bandwidth: if set, only couple modes with |n - n'| <= bandwidth
        block_diagonal: if set, project onto maps preserving this Lagrangian
    """
    dim = space.dim
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    x = a - a.conj().T
    x = 0.5 * (x + space.conjugate_by_alpha(x))
    if bandwidth is not None:
        modes = space.modes
        x = np.where(np.abs(modes[:, None] - modes[None, :]) <= bandwidth, x, 0.0)
    if block_diagonal is not None:
        p = block_diagonal.projector
        q = block_diagonal.complement_projector
        x = p @ x @ p + q @ x @ q
    x = x / max(np.linalg.norm(x, 2), 1e-300) * scale
    return SkewSymmetricMap(space, x)


def random_orthogonal(space: ModeSpace, rng: np.random.Generator, scale: float = 1.0,
                      bandwidth: Optional[int] = None) -> OrthogonalMap:
    """exp(X) for a random skew X of operator norm ``scale``."""
    return random_skew(space, rng, scale=scale, bandwidth=bandwidth).exp()


Letters = Tuple[ModeVector, ...]


@dataclass(frozen=True, eq=False)
class CliffordWord:
    """Formal sum of scalar-weighted products f(v_1)...f(v_k).

    The empty product is the unit 𝟙.
    """
    space: ModeSpace
    terms: Tuple[Tuple[complex, Letters], ...]

    def __post_init__(self):
        for _, letters in self.terms:
            for v in letters:
                if v.space != self.space:
                    raise SpaceMismatchError(f"letter on {v.space} in a word over {self.space}")

    @classmethod
    def unit(cls, space: ModeSpace) -> 'CliffordWord':
        return cls(space, ((1.0 + 0j, ()),))

    @classmethod
    def zero(cls, space: ModeSpace) -> 'CliffordWord':
        return cls(space, ())

    def __add__(self, other: 'CliffordWord') -> 'CliffordWord':
        if other.space != self.space:
            raise SpaceMismatchError(f"{self.space} and {other.space} differ")
        return CliffordWord(self.space, self.terms + other.terms)

    def __sub__(self, other: 'CliffordWord') -> 'CliffordWord':
        return self + other.scale(-1.0)

    def __mul__(self, other: Union['CliffordWord', complex]) -> 'CliffordWord':
        if not isinstance(other, CliffordWord):
            return self.scale(other)
        if other.space != self.space:
            raise SpaceMismatchError(f"{self.space} and {other.space} differ")
        terms = tuple(
            (s1 * s2, l1 + l2) for s1, l1 in self.terms for s2, l2 in other.terms
        )
        return CliffordWord(self.space, terms)

    def __rmul__(self, scalar: complex) -> 'CliffordWord':
        return self.scale(scalar)

    def scale(self, scalar: complex) -> 'CliffordWord':
        return CliffordWord(self.space, tuple((complex(scalar) * s, l) for s, l in self.terms))

    def map_letters(self, fn: Callable[[ModeVector], ModeVector], space: Optional[ModeSpace] = None) -> 'CliffordWord':
        space = self.space if space is None else space
        return CliffordWord(space, tuple((s, tuple(fn(v) for v in l)) for s, l in self.terms))

    @property
    def degree(self) -> int:
        return max((len(l) for _, l in self.terms), default=0)


def generator(v: ModeVector) -> CliffordWord:
    """The single-letter word f(v)."""
    return CliffordWord(v.space, ((1.0 + 0j, (v,)),))


def star(word: CliffordWord) -> CliffordWord:
    """Adjoint: reverse each product, apply α to the letters, conjugate scalars."""
    return CliffordWord(
        word.space,
        tuple((np.conj(s), tuple(apply_alpha(v) for v in reversed(l))) for s, l in word.terms),
    )


def bogoliubov(g: OrthogonalMap, word: CliffordWord) -> CliffordWord:
    """θ_g: replace every letter f(v) by f(gv)."""
    if g.space != word.space:
        raise SpaceMismatchError(f"{g.space} differs from {word.space}")
    g.require_exact()
    return word.map_letters(g.apply)


def random_word(space: ModeSpace, rng: np.random.Generator, terms: int = 3, max_letters: int = 3) -> CliffordWord:
    """Random word for property checks."""
    out = []
    for _ in range(terms):
        k = int(rng.integers(0, max_letters + 1))
        scalar = complex(rng.normal(), rng.normal())
        out.append((scalar, tuple(space.random_vector(rng) for _ in range(k))))
    return CliffordWord(space, tuple(out))


MapRule = Union[OrthogonalMap, Callable[[int], OrthogonalMap]]
LagrangianRule = Union[Lagrangian, Callable[[int], Lagrangian]]


@dataclass(frozen=True)
class RestrictedReport:
    cutoffs: List[int]
    offdiag_hs: List[float]
    commutator_hs: List[float]
    j_norm: List[float]
    verdict: str

    def to_dict(self) -> dict:
        return {
            'cutoffs': list(self.cutoffs),
            'offdiag_hs': list(self.offdiag_hs),
            'commutator_hs': list(self.commutator_hs),
            'j_norm': list(self.j_norm),
            'verdict': self.verdict,
        }


def restricted_diagnostics(g: MapRule, lagrangian: LagrangianRule,
                           cutoffs: Optional[Sequence[int]] = None) -> RestrictedReport:
    """‖P_L g P_L^⊥‖₂, ‖[g, J_L]‖₂ and ‖g‖_J along cutoffs.

    ``g`` and ``lagrangian`` are either values on one space or rules N -> value.
    """
    if cutoffs is None:
        if callable(g) and not isinstance(g, OrthogonalMap):
            raise ParameterError("cutoffs are required when g is a rule")
        cutoffs = [g.space.N]
    cutoffs = [int(n) for n in cutoffs]

    def resolve(rule, n):
        if isinstance(rule, (OrthogonalMap, Lagrangian)):
            if rule.space.N != n:
                raise SpaceMismatchError(f"{rule.space} does not match cutoff {n}")
            return rule
        return rule(n)

    off, comm, jn = [], [], []
    for n in cutoffs:
        gn = resolve(g, n)
        ln = resolve(lagrangian, n)
        off.append(gn.offdiag_hs(ln))
        comm.append(gn.commutator_hs(ln))
        jn.append(gn.j_norm(ln))
    verdict = growth_verdict([x ** 2 for x in off])
    logger.info(f"Restricted diagnostics over cutoffs {cutoffs}: {verdict}")
    return RestrictedReport(cutoffs, off, comm, jn, verdict)


@dataclass(frozen=True, eq=False)
class ModeIsometry:
    """Unitary ν: V -> V' intertwining the real structures, να = α'ν."""
    source: ModeSpace
    target: ModeSpace
    matrix: np.ndarray

    def __post_init__(self):
        matrix = np.asarray(self.matrix, dtype=complex)
        if matrix.shape != (self.target.dim, self.source.dim):
            raise ParameterError(f"isometry of shape {matrix.shape} does not map {self.source} to {self.target}")
        tol = settings.tolerance('unitary')
        residual = float(np.linalg.norm(matrix.conj().T @ matrix - np.eye(self.source.dim)))
        if self.source.dim != self.target.dim or residual > tol:
            raise InvariantViolationError("map is not unitary", residual, tol)
        alpha_residual = float(np.linalg.norm(
            matrix @ np.eye(self.source.dim)[:, self.source.sigma]
            - np.eye(self.target.dim)[:, self.target.sigma] @ np.conj(matrix)
        ))
        tol_a = settings.tolerance('alpha')
        if alpha_residual > tol_a:
            raise InvariantViolationError("map does not intertwine the real structures", alpha_residual, tol_a)
        matrix.setflags(write=False)
        object.__setattr__(self, 'matrix', matrix)

    @classmethod
    def from_orthogonal(cls, g: OrthogonalMap) -> 'ModeIsometry':
        g.require_exact()
        return cls(g.space, g.space, g.matrix)

    def apply(self, v: ModeVector) -> ModeVector:
        if v.space != self.source:
            raise SpaceMismatchError(f"{v.space} differs from {self.source}")
        return ModeVector(self.target, self.matrix @ v.coeffs)

    def inverse(self) -> 'ModeIsometry':
        return ModeIsometry(self.target, self.source, self.matrix.conj().T)
