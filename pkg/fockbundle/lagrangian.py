"""
Lagrangian and sublagrangian subspaces of a ModeSpace.

A Lagrangian L splits the mode space orthogonally as V = L ⊕ α(L). The
module provides the standard Lagrangians of both parities, the checks and
Hilbert-Schmidt diagnostics used to compare Lagrangians across cutoffs, the
deterministic completion of a sublagrangian and the embedding of U(L) into
the orthogonal group.
"""
import functools
import logging
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Union

import numpy as np
from scipy import linalg

from . import settings
from .errors import InvariantViolationError, ParameterError, SpaceMismatchError
from .modespace import ModeSpace, ModeVector, Parity

logger = logging.getLogger(__name__)


def orthonormalize(matrix: np.ndarray, rank_tol: float = 1e-10) -> np.ndarray:
    """Orthonormal basis of the column span, keeping the column order.

    Columns that are (numerically) dependent on earlier ones are dropped.
    """
    matrix = np.asarray(matrix, dtype=complex)
    if matrix.shape[1] == 0:
        return matrix
    q, r = linalg.qr(matrix, mode='economic')
    keep = np.abs(np.diag(r)) > rank_tol * max(1.0, np.abs(r).max())
    if keep.all():
        return q
    # Rank deficient: fall back to Gram-Schmidt in column order
    basis: List[np.ndarray] = []
    for col in matrix.T:
        v = col.copy()
        for b in basis:
            v = v - np.vdot(b, v) * b
        norm = np.linalg.norm(v)
        if norm > rank_tol * max(1.0, np.linalg.norm(col)):
            basis.append(v / norm)
    if not basis:
        return np.zeros((matrix.shape[0], 0), dtype=complex)
    return np.column_stack(basis)


@dataclass(frozen=True, eq=False)
class Subspace:
    """Subspace given by an orthonormal frame (dim x k)."""
    space: ModeSpace
    frame: np.ndarray

    def __post_init__(self):
        frame = np.asarray(self.frame, dtype=complex)
        if frame.ndim != 2 or frame.shape[0] != self.space.dim:
            raise ParameterError(f"frame of shape {frame.shape} does not fit {self.space}")
        residual = float(np.linalg.norm(frame.conj().T @ frame - np.eye(frame.shape[1]))) if frame.shape[1] else 0.0
        tol = settings.tolerance('frame')
        if residual > tol:
            raise InvariantViolationError("frame columns are not orthonormal", residual, tol)
        frame.setflags(write=False)
        object.__setattr__(self, 'frame', frame)

    @property
    def rank(self) -> int:
        return self.frame.shape[1]

    @functools.cached_property
    def projector(self) -> np.ndarray:
        return self.frame @ self.frame.conj().T

    @functools.cached_property
    def complement_projector(self) -> np.ndarray:
        return np.eye(self.space.dim) - self.projector

    @property
    def alpha_frame(self) -> np.ndarray:
        return self.space.alpha_frame(self.frame)

    def membership_residual(self, v: ModeVector) -> float:
        """Distance of ``v`` from the subspace."""
        if v.space != self.space:
            raise SpaceMismatchError(f"{v.space} differs from {self.space}")
        return float(np.linalg.norm(v.coeffs - self.projector @ v.coeffs))

    def contains(self, other: 'Subspace', tol: Optional[float] = None) -> bool:
        tol = settings.tolerance('lagrangian') if tol is None else tol
        return float(np.linalg.norm(other.frame - self.projector @ other.frame)) <= tol

    @classmethod
    def span(cls, space: ModeSpace, vectors: Union[np.ndarray, Sequence[ModeVector]]) -> 'Subspace':
        if not isinstance(vectors, np.ndarray):
            vectors = np.column_stack([v.coeffs for v in vectors]) if vectors else np.zeros((space.dim, 0))
        return cls(space, orthonormalize(vectors))


@dataclass(frozen=True)
class LagrangianCheck:
    """Verdict of ``is_lagrangian`` with the residuals behind it."""
    ok: bool
    dimension_ok: bool
    isotropy_residual: float
    splitting_residual: float
    tolerance: float

    def __bool__(self) -> bool:
        return self.ok

    def to_dict(self) -> dict:
        return {
            'ok': self.ok,
            'dimension_ok': self.dimension_ok,
            'isotropy_residual': self.isotropy_residual,
            'splitting_residual': self.splitting_residual,
            'tolerance': self.tolerance,
        }


def isotropy_residual(space: ModeSpace, frame: np.ndarray) -> float:
    """Norm of the Clifford pairing restricted to the frame, ‖F^T S F‖."""
    if frame.shape[1] == 0:
        return 0.0
    gram = frame.T @ frame[space.sigma]
    return float(np.linalg.norm(gram))


def is_lagrangian(space: ModeSpace, subspace: Subspace) -> LagrangianCheck:
    """Check S ⊥ α(S) and dim S = dim V / 2."""
    tol = settings.tolerance('lagrangian')
    if subspace.space != space:
        raise SpaceMismatchError(f"{subspace.space} differs from {space}")
    dimension_ok = 2 * subspace.rank == space.dim
    iso = isotropy_residual(space, subspace.frame)
    p = subspace.projector
    split = float(np.linalg.norm(p + space.conjugate_by_alpha(p) - np.eye(space.dim)))
    ok = dimension_ok and iso <= tol and split <= tol
    return LagrangianCheck(ok, dimension_ok, iso, split, tol)


@dataclass(frozen=True, eq=False)
class Lagrangian(Subspace):
    """A Lagrangian subspace: V = L ⊕ α(L) orthogonally."""

    def __post_init__(self):
        super().__post_init__()
        check = is_lagrangian(self.space, self)
        if not check.ok:
            raise InvariantViolationError(
                "subspace is not Lagrangian",
                max(check.isotropy_residual, check.splitting_residual),
                check.tolerance,
                dimension_ok=check.dimension_ok,
            )

    @functools.cached_property
    def complex_structure(self) -> np.ndarray:
        """J_L = i(P_L - P_L^⊥)."""
        return 1j * (self.projector - self.complement_projector)

    def alpha(self) -> 'Lagrangian':
        """The Lagrangian α(L)."""
        return Lagrangian(self.space, self.alpha_frame)

    def transform(self, g: np.ndarray) -> 'Lagrangian':
        """gL for a unitary g commuting with α."""
        return Lagrangian(self.space, orthonormalize(np.asarray(g) @ self.frame))


@dataclass(frozen=True, eq=False)
class Sublagrangian(Subspace):
    """Isotropic subspace whose α-double has even codimension."""
    codim: int = field(init=False)

    def __post_init__(self):
        super().__post_init__()
        tol = settings.tolerance('isotropy')
        residual = isotropy_residual(self.space, self.frame)
        if residual > tol:
            raise InvariantViolationError("subspace is not isotropic", residual, tol)
        codim = self.space.dim - 2 * self.rank
        if codim < 0 or codim % 2:
            raise InvariantViolationError(
                f"codimension {codim} of S ⊕ α(S) is not even", float(abs(codim) % 2 or 1), 0.0
            )
        object.__setattr__(self, 'codim', codim)


def standard_lagrangian_odd(space: ModeSpace) -> Lagrangian:
    """span{ξ_{n,j} : n >= 0}."""
    if space.parity is not Parity.ODD:
        raise ParameterError(f"standard odd Lagrangian needs odd parity, got {space}")
    columns = [k for k, (n, _) in enumerate(space.basis_index) if n >= 0]
    frame = np.eye(space.dim, dtype=complex)[:, columns]
    return Lagrangian(space, frame)


def standard_lagrangian_even(space: ModeSpace) -> Lagrangian:
    """L_0 at the constant mode plus every mode with n >= 1.

    L_0 is spanned by (e_j + i e_{j+1}) / sqrt(2) for j = 1, 3, 5, ...
    """
    if space.parity is not Parity.EVEN:
        raise ParameterError(f"standard even Lagrangian needs even parity, got {space}")
    if space.d % 2:
        raise ParameterError(f"standard even Lagrangian needs an even fibre dimension, got d={space.d}")
    columns = []
    for j in range(1, space.d + 1, 2):
        col = np.zeros(space.dim, dtype=complex)
        col[space.position(0, j)] = 1 / np.sqrt(2)
        col[space.position(0, j + 1)] = 1j / np.sqrt(2)
        columns.append(col)
    for k, (n, _) in enumerate(space.basis_index):
        if n >= 1:
            col = np.zeros(space.dim, dtype=complex)
            col[k] = 1.0
            columns.append(col)
    return Lagrangian(space, np.column_stack(columns))


def standard_lagrangian(space: ModeSpace) -> Lagrangian:
    if space.parity is Parity.ODD:
        return standard_lagrangian_odd(space)
    return standard_lagrangian_even(space)


def hs_distance(l1: Subspace, l2: Subspace) -> float:
    """‖P_{L1} - P_{L2}‖₂."""
    if l1.space != l2.space:
        raise SpaceMismatchError(f"{l1.space} differs from {l2.space}")
    return float(np.linalg.norm(l1.projector - l2.projector))


def offdiagonal_hs_sq(l1: Subspace, l2: Subspace) -> float:
    """‖P_{L1}^⊥ P_{L2}‖₂²."""
    if l1.space != l2.space:
        raise SpaceMismatchError(f"{l1.space} differs from {l2.space}")
    return float(np.linalg.norm(l1.complement_projector @ l2.frame) ** 2)


def growth_verdict(values: Sequence[float]) -> str:
    """'bounded', 'divergent' or 'inconclusive' for a sequence of squared norms.

    Divergent when the last value exceeds the divergence factor times the
    value at the start of the top half of the sequence.
    """
    if len(values) < 3:
        return 'inconclusive'
    factor = float(settings.get('diagnostics.divergence_factor', 1.5))
    floor = float(settings.get('diagnostics.divergence_floor', 1e-9))
    reference = values[max(len(values) // 2 - 1, 0)]
    return 'divergent' if values[-1] > factor * reference + floor else 'bounded'


@dataclass(frozen=True)
class EquivalenceReport:
    cutoffs: List[int]
    hs_sq: List[float]
    verdict: str

    def to_dict(self) -> dict:
        return {'cutoffs': list(self.cutoffs), 'hs_sq': list(self.hs_sq), 'verdict': self.verdict}


LagrangianRule = Callable[[int], Subspace]


def equivalence_diagnostic(l1: LagrangianRule, l2: LagrangianRule, cutoffs: Sequence[int]) -> EquivalenceReport:
    """‖P_{L1}^⊥ P_{L2}‖₂² along a sequence of cutoffs.

    Args:
        l1: rule N -> Lagrangian generating the first family
        l2: rule N -> Lagrangian generating the second family
        cutoffs: increasing cutoffs

    Returns:
        EquivalenceReport with one value per cutoff and a growth verdict
    """
    cutoffs = [int(n) for n in cutoffs]
    if any(b <= a for a, b in zip(cutoffs, cutoffs[1:])):
        raise ParameterError(f"cutoffs must increase strictly, got {cutoffs}")
    values = [offdiagonal_hs_sq(l1(n), l2(n)) for n in cutoffs]
    verdict = growth_verdict(values)
    logger.info(f"Equivalence diagnostic over cutoffs {cutoffs}: {verdict}")
    return EquivalenceReport(cutoffs, values, verdict)


def make_sublagrangian(space: ModeSpace, vectors: Union[np.ndarray, Sequence[ModeVector]]) -> Sublagrangian:
    """Sublagrangian spanned by ``vectors``, validated."""
    if not isinstance(vectors, np.ndarray):
        vectors = np.column_stack([v.coeffs for v in vectors]) if vectors else np.zeros((space.dim, 0))
    return Sublagrangian(space, orthonormalize(vectors))


def _real_basis(space: ModeSpace, complement: np.ndarray, size: int) -> List[np.ndarray]:
    """Orthonormal α-fixed vectors spanning the α-invariant complement."""
    basis: List[np.ndarray] = []
    for k in range(space.dim):
        w = complement[:, k]
        aw = np.conj(w[space.sigma])
        for candidate in (w + aw, 1j * (w - aw)):
            v = candidate.copy()
            for b in basis:
                v = v - np.vdot(b, v).real * b
            norm = np.linalg.norm(v)
            if norm > 1e-8:
                basis.append(v / norm)
            if len(basis) == size:
                return basis
    return basis


def complete_sublagrangian(sub: Sublagrangian) -> Lagrangian:
    """Deterministic Lagrangian containing ``sub``.

    The complement W of S ⊕ α(S) is filled with W ∩ L_std when that is half
    of W (so S = 0 gives the standard Lagrangian); otherwise α-fixed vectors
    of W, taken lowest index first, are paired as (r + i r') / sqrt(2).
    """
    space = sub.space
    if sub.codim == 0:
        return Lagrangian(space, sub.frame)

    doubled = np.hstack([sub.frame, sub.alpha_frame])
    complement = np.eye(space.dim) - doubled @ doubled.conj().T
    half = sub.codim // 2

    if space.parity is Parity.ODD or space.d % 2 == 0:
        standard = standard_lagrangian(space).frame
        overlap = linalg.null_space(doubled.conj().T @ standard) if sub.rank else np.eye(standard.shape[1])
        if overlap.shape[1] == half:
            candidate = np.hstack([sub.frame, orthonormalize(standard @ overlap)])
            completed = Subspace(space, orthonormalize(candidate))
            if is_lagrangian(space, completed).ok:
                logger.debug(f"Completed sublagrangian of rank {sub.rank} inside the standard Lagrangian")
                return Lagrangian(space, completed.frame)

    real = _real_basis(space, complement, sub.codim)
    if len(real) != sub.codim:
        raise InvariantViolationError(
            "complement of S ⊕ α(S) has no real basis of the expected size",
            float(sub.codim - len(real)), 0.0,
        )
    pairs = [(real[2 * i] + 1j * real[2 * i + 1]) / np.sqrt(2) for i in range(half)]
    frame = np.hstack([sub.frame, np.column_stack(pairs)])
    logger.debug(f"Completed sublagrangian of rank {sub.rank} with {half} paired real vectors")
    return Lagrangian(space, frame)


def embed_unitary(lagrangian: Lagrangian, T: np.ndarray):
    """Orthogonal map acting by T on L and by αTα on α(L).

    Args:
        lagrangian: the Lagrangian L
        T: unitary matrix in the coordinates of the L-frame

    Returns:
        OrthogonalMap g with gL = L
    """
    from .clifford import OrthogonalMap

    T = np.asarray(T, dtype=complex)
    k = lagrangian.rank
    if T.shape != (k, k):
        raise ParameterError(f"T must be {k}x{k}, got {T.shape}")
    tol = settings.tolerance('unitary')
    residual = float(np.linalg.norm(T.conj().T @ T - np.eye(k)))
    if residual > tol:
        raise InvariantViolationError("T is not unitary", residual, tol)
    F = lagrangian.frame
    G = lagrangian.alpha_frame
    g = F @ T @ F.conj().T + G @ np.conj(T) @ G.conj().T
    return OrthogonalMap(lagrangian.space, g)
