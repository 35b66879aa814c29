"""
Band-limited loops in SO(d) and so(d) and their action on mode spaces.

A loop is a real trigonometric polynomial

    f(t) = Σ_{k>=0} C_k cos(kt) + Σ_{k<0} C_k sin(|k|t)

and acts on V by pointwise multiplication. In the mode basis this shifts
mode n to n - k with block F̂_k, the complex Fourier coefficient of e^{ikt}.
"""
import logging
from dataclasses import dataclass
from typing import Dict, Mapping, Optional

import numpy as np
from scipy import linalg

from . import settings
from .clifford import COMPRESSED, EXACT, OrthogonalMap, SkewSymmetricMap
from .errors import InvariantViolationError, ParameterError, PreconditionError, SpaceMismatchError
from .lagrangian import Lagrangian, standard_lagrangian
from .modespace import ModeSpace, Parity

logger = logging.getLogger(__name__)

GROUP = 'group'
ALGEBRA = 'algebra'

ROTATION_GENERATOR = np.array([[0.0, -1.0], [1.0, 0.0]])


def _sample_times(bandwidth: int) -> np.ndarray:
    count = max(16, 4 * bandwidth + 3)
    return 2 * np.pi * np.arange(count) / count + 0.1234


@dataclass(frozen=True, eq=False)
class TrigPolyMatrix:
    """Real d x d matrix-valued trigonometric polynomial.

    Args:
        d: matrix size
        coeffs: frequency k -> real d x d matrix (k >= 0 cosine, k < 0 sine)
        flavor: 'group' (values in SO(d)) or 'algebra' (values in so(d))
    """
    d: int
    coeffs: Mapping[int, np.ndarray]
    flavor: str = ALGEBRA

    def __post_init__(self):
        if self.flavor not in (GROUP, ALGEBRA):
            raise ParameterError(f"unknown loop flavor {self.flavor!r}")
        clean: Dict[int, np.ndarray] = {}
        for k, c in self.coeffs.items():
            c = np.asarray(c)
            if np.iscomplexobj(c):
                if np.abs(c.imag).max(initial=0.0) > 1e-12 * max(1.0, np.abs(c).max(initial=0.0)):
                    raise ParameterError(f"coefficient at frequency {k} is not real")
                c = c.real
            c = np.array(c, dtype=float)
            if c.shape != (self.d, self.d):
                raise ParameterError(f"coefficient at frequency {k} has shape {c.shape}, expected {(self.d, self.d)}")
            if np.any(c):
                clean[int(k)] = c
        object.__setattr__(self, 'coeffs', clean)
        self._validate()

    def _validate(self) -> None:
        worst = 0.0
        for t in _sample_times(self.bandwidth):
            value = self.evaluate(t)
            if self.flavor == GROUP:
                worst = max(worst, float(np.linalg.norm(value.T @ value - np.eye(self.d))))
            else:
                worst = max(worst, float(np.linalg.norm(value + value.T)))
        tol = settings.tolerance('orthogonality') if self.flavor == GROUP else settings.tolerance('lie')
        if worst > tol:
            kind = "orthogonal" if self.flavor == GROUP else "antisymmetric"
            raise InvariantViolationError(f"loop values are not {kind}", worst, tol)

    @property
    def bandwidth(self) -> int:
        return max((abs(k) for k in self.coeffs), default=0)

    def evaluate(self, t: float) -> np.ndarray:
        value = np.zeros((self.d, self.d))
        for k, c in self.coeffs.items():
            value = value + (c * np.cos(k * t) if k >= 0 else c * np.sin(-k * t))
        return value

    def fourier(self, k: int) -> np.ndarray:
        """Complex coefficient F̂_k of e^{ikt}."""
        zero = np.zeros((self.d, self.d))
        if k == 0:
            return self.coeffs.get(0, zero).astype(complex)
        a = abs(k)
        cos_part = self.coeffs.get(a, zero)
        sin_part = self.coeffs.get(-a, zero)
        return cos_part / 2 + np.sign(k) * sin_part / 2j

    def complex_coeffs(self) -> Dict[int, np.ndarray]:
        bw = self.bandwidth
        return {k: self.fourier(k) for k in range(-bw, bw + 1)}

    @classmethod
    def from_complex(cls, d: int, fourier: Mapping[int, np.ndarray], flavor: str = ALGEBRA) -> 'TrigPolyMatrix':
        """Inverse of ``complex_coeffs`` for a real loop."""
        zero = np.zeros((d, d), dtype=complex)
        coeffs: Dict[int, np.ndarray] = {}
        bw = max((abs(k) for k in fourier), default=0)
        if 0 in fourier:
            coeffs[0] = np.real_if_close(fourier[0])
        for k in range(1, bw + 1):
            plus, minus = fourier.get(k, zero), fourier.get(-k, zero)
            coeffs[k] = plus + minus
            coeffs[-k] = 1j * (plus - minus)
        return cls(d, coeffs, flavor)

    def derivative(self) -> 'TrigPolyMatrix':
        if self.flavor != ALGEBRA:
            raise ParameterError("derivative is only defined for algebra loops")
        coeffs: Dict[int, np.ndarray] = {}
        for k, c in self.coeffs.items():
            if k:
                coeffs[-k] = -k * c
        return TrigPolyMatrix(self.d, coeffs)

    def __add__(self, other: 'TrigPolyMatrix') -> 'TrigPolyMatrix':
        if other.d != self.d or other.flavor != ALGEBRA or self.flavor != ALGEBRA:
            raise ParameterError("only algebra loops of equal size can be added")
        keys = set(self.coeffs) | set(other.coeffs)
        zero = np.zeros((self.d, self.d))
        return TrigPolyMatrix(self.d, {k: self.coeffs.get(k, zero) + other.coeffs.get(k, zero) for k in keys})

    def scale(self, c: float) -> 'TrigPolyMatrix':
        if self.flavor != ALGEBRA:
            raise ParameterError("only algebra loops can be scaled")
        return TrigPolyMatrix(self.d, {k: float(c) * m for k, m in self.coeffs.items()})

    def bracket(self, other: 'TrigPolyMatrix') -> 'TrigPolyMatrix':
        """Pointwise commutator [f, g](t) = f(t)g(t) - g(t)f(t)."""
        if other.d != self.d:
            raise ParameterError("loops of different size")
        a, b = self.complex_coeffs(), other.complex_coeffs()
        out: Dict[int, np.ndarray] = {}
        for k, fa in a.items():
            for m, fb in b.items():
                out[k + m] = out.get(k + m, 0) + fa @ fb - fb @ fa
        return TrigPolyMatrix.from_complex(self.d, out, ALGEBRA)


def constant_loop(matrix: np.ndarray, flavor: str = GROUP) -> TrigPolyMatrix:
    matrix = np.asarray(matrix, dtype=float)
    return TrigPolyMatrix(matrix.shape[0], {0: matrix}, flavor)


def identity_loop(d: int) -> TrigPolyMatrix:
    return constant_loop(np.eye(d), GROUP)


def rotation_loop(winding: int = 1) -> TrigPolyMatrix:
    """t ↦ rotation by winding·t in SO(2)."""
    if winding == 0:
        return identity_loop(2)
    w = abs(int(winding))
    sign = 1.0 if winding > 0 else -1.0
    return TrigPolyMatrix(2, {w: np.eye(2), -w: sign * ROTATION_GENERATOR}, GROUP)


def wave(X: np.ndarray, k: int) -> TrigPolyMatrix:
    """Algebra loop X cos(kt) for k >= 0 or X sin(|k|t) for k < 0."""
    X = np.asarray(X, dtype=float)
    return TrigPolyMatrix(X.shape[0], {int(k): X}, ALGEBRA)


def random_antisymmetric(d: int, rng: np.random.Generator) -> np.ndarray:
    a = rng.normal(size=(d, d))
    return a - a.T


def random_algebra_loop(d: int, bandwidth: int, rng: np.random.Generator, scale: float = 1.0) -> TrigPolyMatrix:
    coeffs = {k: scale * random_antisymmetric(d, rng) for k in range(-bandwidth, bandwidth + 1)}
    return TrigPolyMatrix(d, coeffs, ALGEBRA)


def _check_fibre(f: TrigPolyMatrix, space: ModeSpace) -> None:
    if f.d != space.d:
        raise SpaceMismatchError(f"loop of size {f.d} does not act on fibre dimension {space.d}")


def act_matrix(f: TrigPolyMatrix, space: ModeSpace) -> np.ndarray:
    """Compressed multiplication matrix M[(n-k, i), (n, j)] = (F̂_k)_{ij}."""
    _check_fibre(f, space)
    matrix = np.zeros((space.dim, space.dim), dtype=complex)
    d = space.d
    coeffs = f.complex_coeffs()
    first = {n: space.position(n, 1) for n, _ in space.basis_index}
    for n in sorted(first):
        for k, block in coeffs.items():
            if not np.any(block) or (n - k) not in first:
                continue
            row, col = first[n - k], first[n]
            matrix[row:row + d, col:col + d] += block
    return matrix


def act(f: TrigPolyMatrix, space: ModeSpace) -> OrthogonalMap:
    """Pointwise action of a group loop, exact only for constant loops."""
    if f.flavor != GROUP:
        raise ParameterError("act expects a group loop, use act_algebra for algebra loops")
    matrix = act_matrix(f, space)
    regime = EXACT if f.bandwidth == 0 else COMPRESSED
    g = OrthogonalMap(space, matrix, regime)
    if regime == COMPRESSED:
        logger.warning(f"Loop of bandwidth {f.bandwidth} acts in the compressed regime (defect {g.defect:.3e})")
    return g


def act_algebra(f: TrigPolyMatrix, space: ModeSpace) -> SkewSymmetricMap:
    """Pointwise action of an algebra loop; skew and α-commuting in every truncation."""
    if f.flavor != ALGEBRA:
        raise ParameterError("act_algebra expects an algebra loop")
    return SkewSymmetricMap(space, act_matrix(f, space))


def exp_act(f: TrigPolyMatrix, space: ModeSpace, t: float = 1.0) -> OrthogonalMap:
    """Exactly orthogonal band-limited map expm(t·act_algebra(f))."""
    return OrthogonalMap(space, linalg.expm(float(t) * act_matrix(f, space)))


def _cocycle_lagrangian(space: ModeSpace, lagrangian: Optional[Lagrangian]) -> Lagrangian:
    if lagrangian is None:
        return standard_lagrangian(space)
    if lagrangian.space != space:
        raise SpaceMismatchError(f"{lagrangian.space} differs from {space}")
    return lagrangian


def lie_cocycle_lhs(f1: TrigPolyMatrix, f2: TrigPolyMatrix, space: ModeSpace,
                    lagrangian: Optional[Lagrangian] = None) -> complex:
    """trace([a1, a2] - a3) with a_i = P A_i P and A3 = [A1, A2].

    Evaluated as tr(P A2 P^⊥ A1 P) - tr(P A1 P^⊥ A2 P).
    """
    need = f1.bandwidth + f2.bandwidth + 1
    if space.N < need:
        raise PreconditionError(
            f"cutoff N={space.N} is below bandwidth sum + 1 = {need}",
            {'N': space.N, 'required': need},
        )
    L = _cocycle_lagrangian(space, lagrangian)
    A1 = act_matrix(f1, space)
    A2 = act_matrix(f2, space)
    P, Q = L.projector, L.complement_projector
    return complex(np.trace(P @ A2 @ Q @ A1 @ P) - np.trace(P @ A1 @ Q @ A2 @ P))


def lie_cocycle_rhs(f1: TrigPolyMatrix, f2: TrigPolyMatrix) -> complex:
    """-(1/2πi) ∫ tr(f1(t) f2'(t)) dt = Σ_k k tr(F̂1_k F̂2_{-k})."""
    if f1.d != f2.d:
        raise ParameterError("loops of different size")
    a, b = f1.complex_coeffs(), f2.complex_coeffs()
    total = 0j
    for k, fa in a.items():
        if k and -k in b:
            total += k * np.trace(fa @ b[-k])
    return complex(total)


def lie_cocycle_coboundary(f1: TrigPolyMatrix, f2: TrigPolyMatrix, space: ModeSpace,
                           lagrangian: Optional[Lagrangian] = None) -> complex:
    """Contribution of the constant-mode block: -tr(P_{L0} [f1, f2]^(0)).

    Zero for odd parity; for even parity it is a coboundary.
    """
    if space.parity is Parity.ODD:
        return 0j
    L = _cocycle_lagrangian(space, lagrangian)
    rows = [space.position(0, j) for j in range(1, space.d + 1)]
    p0 = L.projector[np.ix_(rows, rows)]
    a, b = f1.complex_coeffs(), f2.complex_coeffs()
    zero_mode = np.zeros((space.d, space.d), dtype=complex)
    for k, fa in a.items():
        if -k in b:
            zero_mode += fa @ b[-k] - b[-k] @ fa
    return complex(-np.trace(p0 @ zero_mode))


@dataclass(frozen=True)
class LieCocycleCheck:
    lhs: complex
    rhs: complex
    coboundary: complex
    residual: float
    tolerance: float

    @property
    def ok(self) -> bool:
        return self.residual <= self.tolerance

    def to_dict(self) -> dict:
        return {
            'lhs': [self.lhs.real, self.lhs.imag],
            'rhs': [self.rhs.real, self.rhs.imag],
            'coboundary': [self.coboundary.real, self.coboundary.imag],
            'residual': self.residual,
            'tolerance': self.tolerance,
            'pass': self.ok,
        }


def lie_cocycle_check(f1: TrigPolyMatrix, f2: TrigPolyMatrix, space: ModeSpace,
                      lagrangian: Optional[Lagrangian] = None) -> LieCocycleCheck:
    """Compare lhs with rhs + coboundary."""
    lhs = lie_cocycle_lhs(f1, f2, space, lagrangian)
    rhs = lie_cocycle_rhs(f1, f2)
    cob = lie_cocycle_coboundary(f1, f2, space, lagrangian)
    tol = settings.tolerance('lie')
    return LieCocycleCheck(lhs, rhs, cob, float(abs(lhs - rhs - cob)), tol)
