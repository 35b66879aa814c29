"""
Fock space ΛL over a Lagrangian and the Clifford representation on it.

Basis: wedge monomials l_S = l_{s1} ∧ ... ∧ l_{sk} over the ordered frame of
L, subsets S in graded-lexicographic order, orthonormal. Creation c_i is the
left wedge with l_i and a_i = c_i^T is its adjoint; on a vector v of V

    ρ_L(v) = √2 (Σ ⟨l_i, v⟩ c_i + Σ ⟨α l_i, v⟩ a_i)

so that ρ(v)ρ(w) + ρ(w)ρ(v) = 2 B(v, w) with B(v, w) = ⟨αv, w⟩.
"""
import itertools
import logging
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import sparse
from scipy.sparse import linalg as sparse_linalg

from . import settings
from .clifford import CliffordWord, SkewSymmetricMap
from .errors import (FockDimensionError, MembershipError, ParameterError,
                     SpaceMismatchError)
from .lagrangian import Lagrangian
from .modespace import ModeVector, apply_alpha, pairing

logger = logging.getLogger(__name__)


class ExteriorAlgebra:
    """Exterior algebra ΛC^m with orthonormal wedge monomials and creation operators."""

    def __init__(self, m: int):
        self.m = int(m)
        self.dim = 2 ** self.m

        limit = settings.max_fock_dim()
        if self.dim > limit:
            raise FockDimensionError(
                f"dimension 2^{self.m} = {self.dim} exceeds the Fock limit {limit}",
                {'m': self.m, 'dim': self.dim, 'max_fock_dim': limit},
            )

        # Graded-lexicographic subsets and their bitmask lookup
        self.states_list: List[Tuple[int, ...]] = [
            s for k in range(self.m + 1) for s in itertools.combinations(range(self.m), k)
        ]
        self.find_index = np.zeros(self.dim, dtype=int)
        for idx, s in enumerate(self.states_list):
            self.find_index[sum(1 << i for i in s)] = idx
        self.degrees = np.array([len(s) for s in self.states_list], dtype=int)

        self.create_ops = [self._creation(i) for i in range(self.m)]
        self.annihilate_ops = [c.T.tocsr() for c in self.create_ops]
        self.eye = sparse.identity(self.dim, dtype=complex, format='csr')

    def _creation(self, i: int) -> sparse.csr_matrix:
        rows, cols, data = [], [], []
        for col, s in enumerate(self.states_list):
            if i in s:
                continue
            sign = (-1) ** sum(1 for t in s if t < i)
            mask = sum(1 << t for t in s) | (1 << i)
            rows.append(self.find_index[mask])
            cols.append(col)
            data.append(sign)
        return sparse.coo_matrix((data, (rows, cols)), shape=(self.dim, self.dim), dtype=float).tocsr()

    def index(self, subset: Iterable[int]) -> int:
        subset = sorted(subset)
        if len(set(subset)) != len(subset) or any(i < 0 or i >= self.m for i in subset):
            raise ParameterError(f"invalid subset {subset} for m={self.m}")
        return int(self.find_index[sum(1 << i for i in subset)])

    def __repr__(self) -> str:
        return f"ExteriorAlgebra(m={self.m})"


class FockSpace(ExteriorAlgebra):
    """Exterior algebra over the frame (l_1, ..., l_m) of a Lagrangian."""

    def __init__(self, lagrangian: Lagrangian):
        self.lagrangian = lagrangian
        self.space = lagrangian.space
        super().__init__(lagrangian.rank)
        logger.debug(f"Built Fock space over {self.space} with m={self.m}, dim={self.dim}")

    @property
    def frame(self) -> np.ndarray:
        return self.lagrangian.frame

    @property
    def alpha_frame(self) -> np.ndarray:
        return self.lagrangian.alpha_frame

    def compatible(self, other: 'FockSpace') -> bool:
        if other is self:
            return True
        return (other.space == self.space and other.m == self.m
                and np.allclose(other.frame, self.frame, atol=1e-14, rtol=0))

    def __repr__(self) -> str:
        return f"FockSpace({self.space}, m={self.m})"

    # Operators as sparse matrices

    def coords_operator(self, create: np.ndarray, annihilate: np.ndarray) -> sparse.csr_matrix:
        """Σ create_i c_i + Σ annihilate_i a_i."""
        op = sparse.csr_matrix((self.dim, self.dim), dtype=complex)
        for i in range(self.m):
            if create[i] != 0:
                op = op + create[i] * self.create_ops[i]
            if annihilate[i] != 0:
                op = op + annihilate[i] * self.annihilate_ops[i]
        return op

    def create_matrix(self, v: ModeVector) -> sparse.csr_matrix:
        """c(v) for v in L."""
        self._check_member(v, self.lagrangian.projector, "L")
        return self.coords_operator(self.frame.conj().T @ v.coeffs, np.zeros(self.m))

    def annihilate_matrix(self, w: ModeVector) -> sparse.csr_matrix:
        """a(w) for w in α(L), contraction with the pairing B(·, w)."""
        self._check_member(w, self.lagrangian.complement_projector, "α(L)")
        return self.coords_operator(np.zeros(self.m), self.alpha_frame.conj().T @ w.coeffs)

    def rho_matrix(self, v: ModeVector) -> sparse.csr_matrix:
        """ρ_L(v) = √2 (c(P_L v) + a(P_L^⊥ v))."""
        if v.space != self.space:
            raise SpaceMismatchError(f"{v.space} differs from {self.space}")
        return np.sqrt(2) * self.coords_operator(self.frame.conj().T @ v.coeffs,
                                                 self.alpha_frame.conj().T @ v.coeffs)

    def rho_coeffs(self, coeffs: np.ndarray) -> sparse.csr_matrix:
        return np.sqrt(2) * self.coords_operator(self.frame.conj().T @ coeffs,
                                                 self.alpha_frame.conj().T @ coeffs)

    def word_matrix(self, word: CliffordWord) -> sparse.csr_matrix:
        """Represented operator of a Clifford word."""
        if word.space != self.space:
            raise SpaceMismatchError(f"{word.space} differs from {self.space}")
        total = sparse.csr_matrix((self.dim, self.dim), dtype=complex)
        for scalar, letters in word.terms:
            term = scalar * self.eye
            for v in letters:
                term = term @ self.rho_matrix(v)
            total = total + term
        return total

    def _check_member(self, v: ModeVector, projector: np.ndarray, name: str) -> None:
        if v.space != self.space:
            raise SpaceMismatchError(f"{v.space} differs from {self.space}")
        residual = float(np.linalg.norm(v.coeffs - projector @ v.coeffs))
        tol = settings.tolerance('membership')
        if residual > tol:
            raise MembershipError(f"vector is not in {name}", residual, tol)


@dataclass(frozen=True, eq=False)
class FockVector:
    fock: FockSpace
    coeffs: np.ndarray

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=complex)
        if coeffs.shape != (self.fock.dim,):
            raise ParameterError(f"coefficient array of shape {coeffs.shape} does not fit {self.fock}")
        coeffs.setflags(write=False)
        object.__setattr__(self, 'coeffs', coeffs)

    def _check(self, other: 'FockVector') -> None:
        if not self.fock.compatible(other.fock):
            raise SpaceMismatchError(f"{self.fock} and {other.fock} differ")

    def __add__(self, other: 'FockVector') -> 'FockVector':
        self._check(other)
        return FockVector(self.fock, self.coeffs + other.coeffs)

    def __sub__(self, other: 'FockVector') -> 'FockVector':
        self._check(other)
        return FockVector(self.fock, self.coeffs - other.coeffs)

    def __mul__(self, scalar: complex) -> 'FockVector':
        return FockVector(self.fock, complex(scalar) * self.coeffs)

    __rmul__ = __mul__

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    def inner(self, other: 'FockVector') -> complex:
        self._check(other)
        return complex(np.vdot(self.coeffs, other.coeffs))

    def degree_part(self, k: int) -> 'FockVector':
        return FockVector(self.fock, np.where(self.fock.degrees == k, self.coeffs, 0))

    @classmethod
    def basis(cls, fock: FockSpace, subset: Iterable[int]) -> 'FockVector':
        coeffs = np.zeros(fock.dim, dtype=complex)
        coeffs[fock.index(subset)] = 1.0
        return cls(fock, coeffs)

    @classmethod
    def random(cls, fock: FockSpace, rng: np.random.Generator) -> 'FockVector':
        return cls(fock, rng.normal(size=fock.dim) + 1j * rng.normal(size=fock.dim))


def _check_vector(fock: FockSpace, x: FockVector) -> None:
    if not fock.compatible(x.fock):
        raise SpaceMismatchError(f"{x.fock} differs from {fock}")


def vacuum(fock: FockSpace) -> FockVector:
    """Ω, the unit of ΛL."""
    coeffs = np.zeros(fock.dim, dtype=complex)
    coeffs[0] = 1.0
    return FockVector(fock, coeffs)


def create(v: ModeVector, x: FockVector) -> FockVector:
    """c(v)x = v ∧ x for v in L."""
    return FockVector(x.fock, x.fock.create_matrix(v) @ x.coeffs)


def annihilate(w: ModeVector, x: FockVector) -> FockVector:
    """a(w)x, graded contraction with B(·, w) for w in α(L)."""
    return FockVector(x.fock, x.fock.annihilate_matrix(w) @ x.coeffs)


def rho(v: ModeVector, x: FockVector) -> FockVector:
    return FockVector(x.fock, x.fock.rho_matrix(v) @ x.coeffs)


def clifford_act(word: CliffordWord, x: FockVector) -> FockVector:
    """word ⊳ x, letters applied right to left."""
    fock = x.fock
    if word.space != fock.space:
        raise SpaceMismatchError(f"{word.space} differs from {fock.space}")
    total = np.zeros(fock.dim, dtype=complex)
    for scalar, letters in word.terms:
        y = x.coeffs
        for v in reversed(letters):
            y = fock.rho_matrix(v) @ y
        total = total + scalar * y
    return FockVector(fock, total)


def exterior_power(fock: ExteriorAlgebra, M: np.ndarray, target: Optional[ExteriorAlgebra] = None) -> np.ndarray:
    """Λ(M) on monomials: l_S ↦ (M l_{s1}) ∧ ... ∧ (M l_{sk}).

    M is an m x m matrix in frame coordinates (column j = image of l_j).
    Columns are filled by Λ l_S = c(M l_{min S}) Λ l_{S - min S}.
    """
    target = fock if target is None else target
    M = np.asarray(M, dtype=complex)
    if M.shape != (target.m, fock.m):
        raise ParameterError(f"matrix of shape {M.shape} does not map m={fock.m} to m={target.m}")
    out = np.zeros((target.dim, fock.dim), dtype=complex)
    out[0, 0] = 1.0
    for col, s in enumerate(fock.states_list):
        if not s:
            continue
        head, rest = s[0], s[1:]
        prev = out[:, fock.find_index[sum(1 << t for t in rest)]]
        acc = np.zeros(target.dim, dtype=complex)
        for i in range(target.m):
            if M[i, head] != 0:
                acc += M[i, head] * (target.create_ops[i] @ prev)
        out[:, col] = acc
    return out


def second_quantize(X: SkewSymmetricMap, fock: FockSpace) -> sparse.csr_matrix:
    """Normal-ordered X̃ with [X̃, ρ(v)] = ρ(Xv) and ⟨Ω, X̃Ω⟩ = 0.

    X̃ = Σ a_ij c_i a_j + ½ Σ b_ij c_i c_j + ½ Σ c_ij a_i a_j with
    a_ij = ⟨l_i, X l_j⟩, b_ij = ⟨l_i, X αl_j⟩, c_ij = ⟨αl_i, X l_j⟩.
    """
    if X.space != fock.space:
        raise SpaceMismatchError(f"{X.space} differs from {fock.space}")
    F, G = fock.frame, fock.alpha_frame
    a = F.conj().T @ X.matrix @ F
    b = F.conj().T @ X.matrix @ G
    c = G.conj().T @ X.matrix @ F
    cr, an = fock.create_ops, fock.annihilate_ops
    op = sparse.csr_matrix((fock.dim, fock.dim), dtype=complex)
    for i in range(fock.m):
        for j in range(fock.m):
            if abs(a[i, j]) > 0:
                op = op + a[i, j] * (cr[i] @ an[j])
            if i < j:
                # b and c are antisymmetric
                if abs(b[i, j]) > 0:
                    op = op + b[i, j] * (cr[i] @ cr[j])
                if abs(c[i, j]) > 0:
                    op = op + c[i, j] * (an[i] @ an[j])
    return op.tocsr()


def schwinger_term(X1: SkewSymmetricMap, X2: SkewSymmetricMap, fock: FockSpace) -> complex:
    """⟨Ω, [X̃1, X̃2] Ω⟩."""
    t1 = second_quantize(X1, fock)
    t2 = second_quantize(X2, fock)
    omega = vacuum(fock).coeffs
    return complex(np.vdot(omega, t1 @ (t2 @ omega) - t2 @ (t1 @ omega)))


def seminorm_estimate(x: FockVector, n: int, samples: int,
                      lie_basis: Sequence[SkewSymmetricMap], seed: int = 0) -> float:
    """Sampled lower bound of p_n(x) = sup ‖X̃_1 ... X̃_n x‖ over the unit ball.

    Each X is a random convex-signed combination Σ t_b X_b / Σ|t_b| of the
    unit-norm basis maps, so ‖X‖ <= 1. n = 0 returns ‖x‖.
    """
    if n < 0:
        raise ParameterError(f"seminorm order must be non-negative, got {n}")
    if n == 0:
        return x.norm()
    if not lie_basis:
        raise ParameterError("lie_basis must not be empty")
    if samples < 1:
        raise ParameterError(f"samples must be positive, got {samples}")
    fock = x.fock
    tilde = [second_quantize(X.scaled(1.0 / max(X.operator_norm(), 1e-300)), fock) for X in lie_basis]
    rng = np.random.default_rng(seed)
    best = 0.0
    for _ in range(samples):
        y = x.coeffs
        for _ in range(n):
            t = rng.normal(size=len(tilde))
            t = t / max(np.abs(t).sum(), 1e-300)
            y = sum(tk * op @ y for tk, op in zip(t, tilde))
        best = max(best, float(np.linalg.norm(y)))
    logger.debug(f"Seminorm estimate p_{n} over {samples} samples: {best:.6e}")
    return best


def car_residual(fock: FockSpace, v: ModeVector, w: ModeVector) -> float:
    """‖{ρ(v), ρ(w)} - 2B(v, w)·1‖ (Frobenius)."""
    rv, rw = fock.rho_matrix(v), fock.rho_matrix(w)
    anti = (rv @ rw + rw @ rv) - 2 * pairing(v, w) * fock.eye
    return float(sparse_linalg.norm(anti)) if anti.nnz else 0.0


def adjoint_residual(fock: FockSpace, v: ModeVector) -> float:
    """‖ρ(v)* - ρ(αv)‖ (Frobenius)."""
    diff = fock.rho_matrix(v).conj().T - fock.rho_matrix(apply_alpha(v))
    return float(sparse_linalg.norm(diff)) if diff.nnz else 0.0
