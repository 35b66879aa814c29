"""
Truncated one-particle spaces of circle spinors.

A ModeSpace is the span of the Fourier modes kept at cutoff N:

* odd (antiperiodic) parity: ξ_{n,j}(t) = e^{-i(n+1/2)t} e_j with n in {-N, ..., N-1}
* even (periodic) parity:    e^{-int} e_j with n in {-N, ..., N}

for j = 1..d. Both index sets are closed under the real structure α
(pointwise complex conjugation), which maps the odd index (n, j) to
(-n-1, j) and the even index (n, j) to (-n, j).

The inner product is conjugate-linear in the first argument throughout the
package.
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterable, Optional, Tuple, Union

import numpy as np

from .errors import ParameterError, SpaceMismatchError

logger = logging.getLogger(__name__)


class Parity(str, Enum):
    """Boundary condition of the circle spinors."""
    EVEN = "even"
    ODD = "odd"


@dataclass(frozen=True)
class ModeSpace:
    """Finite-mode model of V with its real structure.

    Args:
        parity: even (periodic) or odd (antiperiodic) modes
        d: fibre dimension
        N: mode cutoff
    """
    parity: Parity
    d: int
    N: int
    basis_index: Tuple[Tuple[int, int], ...] = field(init=False, repr=False, compare=False)
    _position: Dict[Tuple[int, int], int] = field(init=False, repr=False, compare=False)
    _sigma: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, 'parity', Parity(self.parity))
        if int(self.d) != self.d or self.d < 1:
            raise ParameterError(f"fibre dimension must be a positive integer, got {self.d}")
        if int(self.N) != self.N or self.N < 1:
            raise ParameterError(f"mode cutoff must be a positive integer, got {self.N}")

        modes = range(-self.N, self.N) if self.parity is Parity.ODD else range(-self.N, self.N + 1)
        index = tuple((n, j) for n in modes for j in range(1, self.d + 1))
        position = {key: k for k, key in enumerate(index)}
        sigma = np.array([position[(self.partner_mode(n), j)] for n, j in index], dtype=int)

        object.__setattr__(self, 'basis_index', index)
        object.__setattr__(self, '_position', position)
        object.__setattr__(self, '_sigma', sigma)

    @property
    def dim(self) -> int:
        return len(self.basis_index)

    @property
    def modes(self) -> np.ndarray:
        """Mode number n of every basis vector, in basis order."""
        return np.array([n for n, _ in self.basis_index], dtype=int)

    @property
    def sigma(self) -> np.ndarray:
        """Index permutation of α: (αv)[k] = conj(v[sigma[k]])."""
        return self._sigma

    def partner_mode(self, n: int) -> int:
        return -n - 1 if self.parity is Parity.ODD else -n

    def position(self, n: int, j: int) -> int:
        try:
            return self._position[(n, j)]
        except KeyError:
            raise ParameterError(f"mode ({n}, {j}) is outside {self}") from None

    def contains(self, n: int, j: int) -> bool:
        return (n, j) in self._position

    def basis_vector(self, n: int, j: int) -> 'ModeVector':
        coeffs = np.zeros(self.dim, dtype=complex)
        coeffs[self.position(n, j)] = 1.0
        return ModeVector(self, coeffs)

    def zero(self) -> 'ModeVector':
        return ModeVector(self, np.zeros(self.dim, dtype=complex))

    def vector(self, coeffs: Iterable[complex]) -> 'ModeVector':
        return ModeVector(self, np.asarray(list(coeffs) if not isinstance(coeffs, np.ndarray) else coeffs, dtype=complex))

    def random_vector(self, rng: np.random.Generator, scale: float = 1.0) -> 'ModeVector':
        coeffs = rng.normal(size=self.dim) + 1j * rng.normal(size=self.dim)
        return ModeVector(self, scale * coeffs)

    # Matrix forms of α

    def alpha_frame(self, frame: np.ndarray) -> np.ndarray:
        """Apply α to every column of ``frame``."""
        return np.conj(frame[self._sigma])

    def conjugate_by_alpha(self, matrix: np.ndarray) -> np.ndarray:
        """The matrix of α∘X∘α for a linear X given as a matrix."""
        return np.conj(matrix[np.ix_(self._sigma, self._sigma)])

    def pairing_matrix(self) -> np.ndarray:
        """Permutation matrix S with B(v, w) = v^T S w."""
        s = np.zeros((self.dim, self.dim))
        s[np.arange(self.dim), self._sigma] = 1.0
        return s

    def compatible(self, other: 'ModeSpace') -> bool:
        return self.parity is other.parity and self.d == other.d

    def __str__(self) -> str:
        return f"ModeSpace({self.parity.value}, d={self.d}, N={self.N})"


@dataclass(frozen=True, eq=False)
class ModeVector:
    """Coefficient vector over the basis of a ModeSpace."""
    space: ModeSpace
    coeffs: np.ndarray

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=complex)
        if coeffs.shape != (self.space.dim,):
            raise ParameterError(
                f"coefficient array of shape {coeffs.shape} does not match {self.space} (dim {self.space.dim})"
            )
        coeffs.setflags(write=False)
        object.__setattr__(self, 'coeffs', coeffs)

    def _check(self, other: 'ModeVector') -> None:
        if other.space != self.space:
            raise SpaceMismatchError(f"{self.space} and {other.space} differ")

    def __add__(self, other: 'ModeVector') -> 'ModeVector':
        self._check(other)
        return ModeVector(self.space, self.coeffs + other.coeffs)

    def __sub__(self, other: 'ModeVector') -> 'ModeVector':
        self._check(other)
        return ModeVector(self.space, self.coeffs - other.coeffs)

    def __mul__(self, scalar: complex) -> 'ModeVector':
        return ModeVector(self.space, complex(scalar) * self.coeffs)

    __rmul__ = __mul__

    def __neg__(self) -> 'ModeVector':
        return ModeVector(self.space, -self.coeffs)

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    def allclose(self, other: 'ModeVector', atol: float = 1e-12) -> bool:
        return other.space == self.space and bool(np.allclose(self.coeffs, other.coeffs, atol=atol, rtol=0))


def build_mode_space(parity: Union[Parity, str], d: int, N: int) -> ModeSpace:
    """Build the truncated mode space of the given parity, fibre dimension and cutoff."""
    try:
        parity = Parity(parity)
    except ValueError:
        raise ParameterError(f"unknown parity {parity!r}, expected 'even' or 'odd'") from None
    space = ModeSpace(parity, d, N)
    logger.debug(f"Built {space} of dimension {space.dim}")
    return space


def apply_alpha(v: ModeVector) -> ModeVector:
    """Real structure: conjugate the coefficients and permute the indices."""
    return ModeVector(v.space, np.conj(v.coeffs[v.space.sigma]))


def inner(v: ModeVector, w: ModeVector) -> complex:
    """Inner product ⟨v, w⟩, conjugate-linear in ``v``."""
    if v.space != w.space:
        raise SpaceMismatchError(f"inner product of vectors on {v.space} and {w.space}")
    return complex(np.vdot(v.coeffs, w.coeffs))


def pairing(v: ModeVector, w: ModeVector) -> complex:
    """Symmetric bilinear Clifford pairing B(v, w) = ⟨α(v), w⟩."""
    return inner(apply_alpha(v), w)


def project(target: ModeSpace, v: ModeVector) -> ModeVector:
    """Truncate ``v`` to a smaller cutoff of the same parity and fibre."""
    source = v.space
    if not source.compatible(target):
        raise SpaceMismatchError(f"cannot project from {source} to {target}")
    if target.N > source.N:
        raise SpaceMismatchError(f"target cutoff {target.N} exceeds source cutoff {source.N}")
    keep = np.array([source.position(n, j) for n, j in target.basis_index], dtype=int)
    return ModeVector(target, v.coeffs[keep])


def projection_matrix(source: ModeSpace, target: ModeSpace) -> np.ndarray:
    """Matrix of ``project`` (target.dim x source.dim)."""
    if not source.compatible(target) or target.N > source.N:
        raise SpaceMismatchError(f"cannot project from {source} to {target}")
    matrix = np.zeros((target.dim, source.dim))
    for row, (n, j) in enumerate(target.basis_index):
        matrix[row, source.position(n, j)] = 1.0
    return matrix


def embed(target: ModeSpace, v: ModeVector) -> ModeVector:
    """Extend ``v`` by zeros to a larger cutoff."""
    source = v.space
    if not source.compatible(target) or target.N < source.N:
        raise SpaceMismatchError(f"cannot embed {source} into {target}")
    coeffs = np.zeros(target.dim, dtype=complex)
    for k, (n, j) in enumerate(source.basis_index):
        coeffs[target.position(n, j)] = v.coeffs[k]
    return ModeVector(target, coeffs)


def as_matrix(vectors: Iterable[ModeVector], space: Optional[ModeSpace] = None) -> np.ndarray:
    """Stack vectors as the columns of a matrix."""
    vectors = list(vectors)
    if space is None:
        if not vectors:
            raise ParameterError("cannot infer the space of an empty vector list")
        space = vectors[0].space
    for v in vectors:
        if v.space != space:
            raise SpaceMismatchError(f"{v.space} differs from {space}")
    if not vectors:
        return np.zeros((space.dim, 0), dtype=complex)
    return np.column_stack([v.coeffs for v in vectors])
