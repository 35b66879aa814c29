"""
Dirac operators along a loop with a connection.

A loop connection A(t) (real antisymmetric d×d, band-limited) is transported
by pt'(t) = -A(t) pt(t), pt(0) = id. With the holonomy pt(2π) diagonalized as
pt(2π) v_j = e^{iφ_j} v_j, φ_j in [-π, π), the functions

    η_{n,j}(t) = e^{-i(n+1/2)t - iφ_j t/2π} pt(t) v_j

are antiperiodic eigenfunctions of D = i(d/dt + A) with eigenvalues
λ_{n,j} = n + 1/2 + φ_j/2π. Functions are stored as samples on the uniform
grid t_k = 2πk/steps, k = 0..steps, and L² products use the rectangle rule on
the periodic part of the grid.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg

from . import settings
from .errors import (InvariantViolationError, NumericalDegeneracyError, ParameterError,
                     ResolutionError, SpaceMismatchError)
from .lagrangian import (Lagrangian, Sublagrangian, Subspace, complete_sublagrangian, growth_verdict,
                         offdiagonal_hs_sq, orthonormalize, standard_lagrangian_odd)
from .loopgroup import ALGEBRA, ROTATION_GENERATOR, TrigPolyMatrix, act_matrix, random_algebra_loop
from .modespace import ModeSpace, ModeVector, Parity, build_mode_space

logger = logging.getLogger(__name__)

DEFAULT_STEPS = 2048


@dataclass(frozen=True, eq=False)
class LoopConnection:
    """Connection form A(t) along the loop, an algebra-flavour trigonometric matrix."""
    A: TrigPolyMatrix

    def __post_init__(self):
        if self.A.flavor != ALGEBRA:
            raise ParameterError("a connection must be an algebra loop of antisymmetric matrices")
        tol = settings.tolerance('lie')
        for t in np.linspace(0, 2 * np.pi, 4 * self.A.bandwidth + 5):
            value = self.A.evaluate(t)
            residual = float(np.linalg.norm(value + value.T))
            if residual > tol:
                raise InvariantViolationError(f"A({t:.3f}) is not antisymmetric", residual, tol)

    @property
    def d(self) -> int:
        return self.A.d

    @property
    def bandwidth(self) -> int:
        return self.A.bandwidth

    def evaluate(self, t: float) -> np.ndarray:
        return self.A.evaluate(t)

    @classmethod
    def flat(cls, d: int) -> 'LoopConnection':
        return cls(TrigPolyMatrix(d, {}, ALGEBRA))

    @classmethod
    def constant(cls, X: np.ndarray) -> 'LoopConnection':
        X = np.asarray(X, dtype=float)
        return cls(TrigPolyMatrix(X.shape[0], {0: X}, ALGEBRA))

    @classmethod
    def rotation(cls, theta: float) -> 'LoopConnection':
        """A = θJ on R², with holonomy the rotation by -2πθ."""
        return cls.constant(theta * ROTATION_GENERATOR)

    @classmethod
    def random(cls, d: int, bandwidth: int, rng: np.random.Generator, scale: float = 1.0) -> 'LoopConnection':
        return cls(random_algebra_loop(d, bandwidth, rng, scale=scale))


@dataclass(frozen=True, eq=False)
class TransportPath:
    """Parallel transport pt(t_k) sampled on the uniform grid of [0, 2π]."""
    connection: LoopConnection
    times: np.ndarray
    matrices: np.ndarray
    steps: int
    max_drift: float = 0.0

    @property
    def holonomy(self) -> np.ndarray:
        return self.matrices[-1]

    def orthogonality_residual(self) -> float:
        eye = np.eye(self.connection.d)
        gram = np.einsum('tki,tkj->tij', self.matrices, self.matrices)
        return float(np.max(np.linalg.norm(gram - eye, axis=(1, 2))))

    def determinant_residual(self) -> float:
        return float(np.max(np.abs(np.linalg.det(self.matrices) - 1.0)))


def _polar(X: np.ndarray) -> np.ndarray:
    U, _, Vh = linalg.svd(X)
    return U @ Vh


def parallel_transport(connection: LoopConnection, steps: int = DEFAULT_STEPS) -> TransportPath:
    """Solve pt' = -A pt with RK4 and periodic re-orthonormalization.

    Args:
        connection: loop connection A
        steps: number of RK4 steps over [0, 2π]

    Returns:
        TransportPath with steps + 1 samples

    Raises:
        ResolutionError: orthogonality drift between re-orthonormalizations
            exceeds the configured limit
    """
    min_steps = int(settings.get('transport.min_steps', 64))
    if int(steps) != steps or steps < min_steps:
        raise ParameterError(f"parallel transport needs at least {min_steps} steps, got {steps}")
    steps = int(steps)
    every = int(settings.get('transport.reorthonormalize', 16))
    drift_limit = float(settings.get('transport.drift', 1e-6))

    d = connection.d
    h = 2 * np.pi / steps
    half_grid = np.linspace(0, 2 * np.pi, 2 * steps + 1)
    A = np.array([connection.evaluate(t) for t in half_grid])
    eye = np.eye(d)

    X = eye.copy()
    samples = np.empty((steps + 1, d, d))
    samples[0] = X
    max_drift = 0.0
    for k in range(steps):
        a0, a_mid, a1 = A[2 * k], A[2 * k + 1], A[2 * k + 2]
        k1 = -a0 @ X
        k2 = -a_mid @ (X + h / 2 * k1)
        k3 = -a_mid @ (X + h / 2 * k2)
        k4 = -a1 @ (X + h * k3)
        X = X + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        if (k + 1) % every == 0 or k + 1 == steps:
            drift = float(np.linalg.norm(X.T @ X - eye))
            max_drift = max(max_drift, drift)
            if drift > drift_limit:
                raise ResolutionError(
                    f"transport drifted by {drift:.3e} from SO({d}); increase the number of steps",
                    {'steps': steps, 'drift': drift, 'limit': drift_limit},
                )
            X = _polar(X)
        samples[k + 1] = X

    det = float(np.linalg.det(X))
    if abs(det - 1.0) > settings.tolerance('orthogonality'):
        raise InvariantViolationError("holonomy left SO(d)", abs(det - 1.0), settings.tolerance('orthogonality'))
    logger.debug(f"RK4 transport with {steps} steps, largest drift {max_drift:.3e}")
    return TransportPath(connection, np.linspace(0, 2 * np.pi, steps + 1), samples, steps, max_drift)


@dataclass(frozen=True, eq=False)
class HolonomySpectrum:
    """Eigen-angles φ_j in [-π, π) and eigenvectors v_j (columns) of pt(2π)."""
    angles: np.ndarray
    vectors: np.ndarray
    partner: np.ndarray
    residual: float

    @property
    def d(self) -> int:
        return len(self.angles)

    def to_dict(self) -> dict:
        return {'phis': [float(p) for p in self.angles], 'residual': self.residual}


def _cluster(angles: np.ndarray, tol: float) -> List[Tuple[float, int]]:
    """(representative angle, multiplicity) for sorted angles."""
    clusters: List[List[float]] = []
    for phi in np.sort(angles):
        if clusters and phi - clusters[-1][-1] <= tol:
            clusters[-1].append(phi)
        else:
            clusters.append([phi])
    return [(float(np.mean(c)), len(c)) for c in clusters]


def _eigenspace(H: np.ndarray, phi: float, size: int) -> np.ndarray:
    """Deterministic orthonormal basis of ker(H - e^{iφ}) via pivoted QR of its projector."""
    if phi in (0.0, -np.pi):
        shifted = H - np.cos(phi) * np.eye(H.shape[0])
    else:
        shifted = H - np.exp(1j * phi) * np.eye(H.shape[0])
    _, _, Vh = linalg.svd(shifted)
    basis = Vh.conj().T[:, -size:]
    projector = basis @ basis.conj().T
    Q, _, _ = linalg.qr(projector, pivoting=True)
    return Q[:, :size]


def holonomy_spectrum(path: TransportPath) -> HolonomySpectrum:
    """Eigen-decomposition of the holonomy with real-structure compatible vectors.

    Angles at 0 and -π get real eigenvectors; a cluster at -φ < 0 gets the
    complex conjugates of the vectors at +φ.
    """
    H = path.holonomy
    d = H.shape[0]
    tol = settings.tolerance('orthogonality')
    raw = np.angle(linalg.eigvals(H))
    raw = np.where(raw >= np.pi - tol, -np.pi, raw)
    raw = np.where(np.abs(raw + np.pi) <= tol, -np.pi, raw)
    raw = np.where(np.abs(raw) <= tol, 0.0, raw)

    clusters = _cluster(raw, tol)
    positive = {}
    for phi, size in clusters:
        if phi > tol:
            positive[phi] = _eigenspace(H, phi, size)

    angles: List[float] = []
    columns: List[np.ndarray] = []
    origin: List[Tuple[float, int]] = []
    for phi, size in clusters:
        if abs(phi + np.pi) <= tol:
            phi, block = -np.pi, _eigenspace(H, -np.pi, size)
        elif abs(phi) <= tol:
            phi, block = 0.0, _eigenspace(H, 0.0, size)
        elif phi > 0:
            block = positive[phi]
        else:
            match = [p for p in positive if abs(p + phi) <= 10 * tol and positive[p].shape[1] == size]
            if not match:
                raise NumericalDegeneracyError("holonomy eigen-angles are not closed under negation",
                                               {'angle': phi, 'size': size})
            phi, block = -match[0], positive[match[0]].conj()
        for r in range(size):
            angles.append(phi)
            columns.append(block[:, r])
            origin.append((abs(phi) if phi != -np.pi else phi, r))

    vectors = np.column_stack(columns) if columns else np.zeros((d, 0), dtype=complex)
    angles_arr = np.array(angles)
    partner = np.arange(d)
    for a in range(d):
        if angles_arr[a] not in (0.0, -np.pi):
            partner[a] = next(b for b in range(d) if origin[b] == origin[a] and angles_arr[b] == -angles_arr[a])

    residual = float(np.linalg.norm(H @ vectors - vectors * np.exp(1j * angles_arr)))
    if residual > tol:
        raise NumericalDegeneracyError("holonomy is not diagonalized to tolerance",
                                       {'residual': residual, 'tolerance': tol})
    logger.debug(f"Holonomy angles {np.round(angles_arr, 12).tolist()}")
    return HolonomySpectrum(angles_arr, vectors, partner, residual)


@dataclass(frozen=True, eq=False)
class DiracEigensystem:
    """Sampled eigenfunctions η_{n,j}, n in {-N, ..., N-1}, in ModeSpace basis order."""
    spectrum: HolonomySpectrum
    path: TransportPath
    N: int
    modes: Tuple[Tuple[int, int], ...]
    eigenvalues: np.ndarray
    samples: np.ndarray
    residuals: np.ndarray = field(repr=False)

    @property
    def d(self) -> int:
        return self.spectrum.d

    @property
    def eigen_residual(self) -> float:
        return float(np.max(self.residuals)) if len(self.residuals) else 0.0

    def index(self, n: int, j: int) -> int:
        return (n + self.N) * self.d + (j - 1)

    def eigenvalue(self, n: int, j: int) -> float:
        return float(self.eigenvalues[self.index(n, j)])

    def partner_mode(self, n: int, j: int) -> Tuple[int, int]:
        """Mode of the complex conjugate of η_{n,j}."""
        phi = self.spectrum.angles[j - 1]
        if phi == -np.pi:
            return -n, j
        return -n - 1, int(self.spectrum.partner[j - 1]) + 1

    def inner_products(self) -> np.ndarray:
        periodic = self.samples[:, :-1, :]
        return np.einsum('atk,btk->ab', periodic.conj(), periodic) / self.path.steps

    def orthonormality_residual(self) -> float:
        gram = self.inner_products()
        return float(np.max(np.abs(gram - np.eye(len(self.modes)))))

    def antiperiodicity_residual(self) -> float:
        return float(np.max(np.abs(self.samples[:, -1, :] + self.samples[:, 0, :])))

    def alpha_residual(self) -> float:
        """max ‖conj(η_{n,j}) - η_partner‖ over modes whose partner is kept."""
        worst = 0.0
        for n, j in self.modes:
            m, k = self.partner_mode(n, j)
            if -self.N <= m < self.N:
                diff = self.samples[self.index(n, j)].conj() - self.samples[self.index(m, k)]
                worst = max(worst, float(np.max(np.abs(diff))))
        return worst

    def spectral_symmetry_residual(self) -> float:
        """max |λ + λ_partner| over modes whose partner is kept."""
        worst = 0.0
        for n, j in self.modes:
            m, k = self.partner_mode(n, j)
            if -self.N <= m < self.N:
                worst = max(worst, abs(self.eigenvalue(n, j) + self.eigenvalue(m, k)))
        return worst

    def to_dict(self) -> dict:
        return {
            'phis': [float(p) for p in self.spectrum.angles],
            'lambdas': {f"{n},{j}": float(lam) for (n, j), lam in zip(self.modes, self.eigenvalues)},
            'residuals': {f"{n},{j}": float(r) for (n, j), r in zip(self.modes, self.residuals)},
        }


def _antiperiodic_shift(values: np.ndarray, s: int) -> np.ndarray:
    """values at grid index k + s, continued by f(t + 2π) = -f(t); axis 1 is time."""
    steps = values.shape[1]
    shifted = np.roll(values, -s, axis=1)
    k = np.arange(steps)
    sign = np.where(((k + s) >= steps) | ((k + s) < 0), -1.0, 1.0)
    return shifted * sign[None, :, None]


def _eigen_residuals(samples: np.ndarray, eigenvalues: np.ndarray, connection: LoopConnection,
                     times: np.ndarray) -> np.ndarray:
    periodic = samples[:, :-1, :]
    steps = periodic.shape[1]
    h = 2 * np.pi / steps
    derivative = (-_antiperiodic_shift(periodic, 2) + 8 * _antiperiodic_shift(periodic, 1)
                  - 8 * _antiperiodic_shift(periodic, -1) + _antiperiodic_shift(periodic, -2)) / (12 * h)
    A = np.array([connection.evaluate(t) for t in times[:-1]])
    dirac = 1j * (derivative + np.einsum('tij,atj->ati', A, periodic))
    error = dirac - eigenvalues[:, None, None] * periodic
    return np.sqrt(np.sum(np.abs(error) ** 2, axis=(1, 2)) / steps)


def dirac_eigenbasis(spectrum: HolonomySpectrum, path: TransportPath, N: int) -> DiracEigensystem:
    """Sampled η_{n,j} and λ_{n,j} for n in {-N, ..., N-1}.

    Raises:
        ResolutionError: the finite-difference eigen-residual exceeds the
            ``dirac_residual`` tolerance
    """
    if int(N) != N or N < 1:
        raise ParameterError(f"mode cutoff must be a positive integer, got {N}")
    if spectrum.d != path.connection.d:
        raise SpaceMismatchError(f"spectrum of size {spectrum.d} does not match the connection")
    d, t = spectrum.d, path.times
    modes = tuple((n, j) for n in range(-N, N) for j in range(1, d + 1))
    n_arr = np.array([n for n, _ in modes], dtype=float)
    phi = np.array([spectrum.angles[j - 1] for _, j in modes])
    eigenvalues = n_arr + 0.5 + phi / (2 * np.pi)

    fibre = path.matrices.astype(complex) @ spectrum.vectors
    phases = np.exp(-1j * np.outer(n_arr + 0.5 + phi / (2 * np.pi), t))
    columns = np.array([j - 1 for _, j in modes])
    samples = phases[:, :, None] * np.transpose(fibre[:, :, columns], (2, 0, 1))

    residuals = _eigen_residuals(samples, eigenvalues, path.connection, t)
    es = DiracEigensystem(spectrum, path, int(N), modes, eigenvalues, samples, residuals)
    tol = settings.tolerance('dirac_residual')
    if es.eigen_residual > tol:
        raise ResolutionError(
            f"Dirac eigen-residual {es.eigen_residual:.3e} exceeds {tol:.1e}; increase the number of steps",
            {'residual': es.eigen_residual, 'steps': path.steps, 'N': int(N)},
        )
    logger.debug(f"Dirac eigensystem with {len(modes)} modes, eigen-residual {es.eigen_residual:.3e}")
    return es


def embed_samples(samples: np.ndarray, space: ModeSpace) -> np.ndarray:
    """Coefficients ⟨ξ_{m,i}, f⟩ of sampled functions (rows) in the basis of ``space`` (columns of the result)."""
    if space.parity is not Parity.ODD:
        raise ParameterError(f"Dirac eigenfunctions live in the odd space, got {space}")
    steps = samples.shape[1] - 1
    t = np.linspace(0, 2 * np.pi, steps + 1)[:-1]
    modes = np.arange(-space.N, space.N)
    kernel = np.exp(1j * np.outer(modes + 0.5, t)) / steps
    coeffs = np.einsum('mt,ati->mia', kernel, samples[:, :-1, :])
    return coeffs.reshape(len(modes) * space.d, samples.shape[0])


@dataclass(frozen=True, eq=False)
class DiracEmbedding:
    """Eigenfunctions expressed in a truncated odd space."""
    space: ModeSpace
    coefficients: np.ndarray
    captured: np.ndarray


def _embed(es: DiracEigensystem, space: ModeSpace) -> DiracEmbedding:
    if space.d != es.d:
        raise SpaceMismatchError(f"{space} does not match eigensystem fibre dimension {es.d}")
    if es.N < space.N:
        raise ParameterError(f"eigensystem cutoff {es.N} is below the target cutoff {space.N}")
    coeffs = embed_samples(es.samples, space)
    norms = np.sum(np.abs(es.samples[:, :-1, :]) ** 2, axis=(1, 2)) / es.path.steps
    lost = norms - np.sum(np.abs(coeffs) ** 2, axis=0)
    captured = lost <= settings.tolerance('capture')
    return DiracEmbedding(space, coeffs, captured)


def dirac_sublagrangian(es: DiracEigensystem, space: ModeSpace) -> Tuple[Sublagrangian, Lagrangian]:
    """Eig_{>0} of the Dirac operator as a sublagrangian of ``space``, and its completion.

    Eigenfunctions captured by the truncation enter the sublagrangian; kernel
    functions (n = 0, φ = -π, real) are paired into an isotropic K and the
    remainder is filled by ``complete_sublagrangian``.
    """
    embedding = _embed(es, space)
    tol = settings.tolerance('kernel')
    positive = embedding.captured & (es.eigenvalues > tol)
    kernel_all = np.abs(es.eigenvalues) <= tol
    if int(np.sum(kernel_all)) % 2:
        raise NumericalDegeneracyError("Dirac kernel has odd dimension", {'kernel_dim': int(np.sum(kernel_all))})

    sub = Sublagrangian(space, orthonormalize(embedding.coefficients[:, positive]))
    kernel = orthonormalize(embedding.coefficients[:, kernel_all & embedding.captured])
    if kernel.shape[1] % 2:
        raise NumericalDegeneracyError("captured Dirac kernel has odd dimension", {'kernel_dim': kernel.shape[1]})
    # kernel functions are real, so their coefficients are α-fixed
    real = [(c + np.conj(c[space.sigma])) / 2 for c in kernel.T]
    real = orthonormalize(np.column_stack(real)) if real else np.zeros((space.dim, 0))
    pairs = [(real[:, 2 * i] + 1j * real[:, 2 * i + 1]) / np.sqrt(2) for i in range(real.shape[1] // 2)]
    frame = np.hstack([sub.frame, np.column_stack(pairs)]) if pairs else sub.frame
    lagrangian = complete_sublagrangian(Sublagrangian(space, orthonormalize(frame)))
    logger.info(f"Dirac sublagrangian of rank {sub.rank} in {space}, kernel {real.shape[1]},"
                f" {int(np.sum(~embedding.captured))} eigenfunctions beyond the cutoff")
    return sub, lagrangian


def dirac_lagrangian(spectrum: HolonomySpectrum, path: TransportPath, space: ModeSpace) -> Tuple[Sublagrangian, Lagrangian]:
    """``dirac_sublagrangian`` with eigenfunctions generated beyond the cutoff by the configured margin."""
    margin = int(settings.get('dirac.margin', 6))
    return dirac_sublagrangian(dirac_eigenbasis(spectrum, path, space.N + margin), space)


@dataclass(frozen=True, eq=False)
class DiracFrame:
    """ψ: truncated V_odd -> sampled functions, ψ(ξ_{n,j}) = η_{n,j}."""
    space: ModeSpace
    eigensystem: DiracEigensystem

    @property
    def steps(self) -> int:
        return self.eigensystem.path.steps

    def apply(self, v: ModeVector) -> np.ndarray:
        if v.space != self.space:
            raise SpaceMismatchError(f"{v.space} differs from {self.space}")
        return np.einsum('a,ati->ti', v.coeffs, self.eigensystem.samples)

    def inverse(self, samples: np.ndarray) -> ModeVector:
        """ψ^{-1} on the image, through L² products with the η_{n,j}."""
        periodic = self.eigensystem.samples[:, :-1, :]
        coeffs = np.einsum('ati,ti->a', periodic.conj(), samples[:-1]) / self.steps
        return ModeVector(self.space, coeffs)

    def gram_residual(self) -> float:
        return self.eigensystem.orthonormality_residual()

    def basis_residual(self) -> float:
        """max |ψ(ξ_{n,j}) - η_{n,j}| with ψ built from the fibre map e^{-iφt/2π} pt(t) v."""
        es = self.eigensystem
        t = es.path.times
        phi = es.spectrum.angles
        fibre = es.path.matrices.astype(complex) @ es.spectrum.vectors
        fibre = fibre * np.exp(-1j * np.outer(t, phi) / (2 * np.pi))[:, None, :]
        worst = 0.0
        for a, (n, j) in enumerate(es.modes):
            xi = np.exp(-1j * (n + 0.5) * t)
            worst = max(worst, float(np.max(np.abs(xi[:, None] * fibre[:, :, j - 1] - es.samples[a]))))
        return worst

    def mode_matrix(self, target: Optional[ModeSpace] = None) -> np.ndarray:
        """Columns ψ(ξ_{n,j}) in the ξ-coordinates of ``target`` (default the source space)."""
        return embed_samples(self.eigensystem.samples, target or self.space)


def dirac_frame(spectrum: HolonomySpectrum, path: TransportPath, space: ModeSpace) -> DiracFrame:
    if space.parity is not Parity.ODD or space.d != spectrum.d:
        raise SpaceMismatchError(f"{space} is not the odd space of fibre dimension {spectrum.d}")
    frame = DiracFrame(space, dirac_eigenbasis(spectrum, path, space.N))
    tol = settings.tolerance('dirac_inclusion')
    residual = frame.basis_residual()
    if residual > tol:
        raise InvariantViolationError("ψ(ξ_{n,j}) differs from η_{n,j}", residual, tol)
    return frame


@dataclass(frozen=True)
class DiracEquivalenceReport:
    cutoffs: List[int]
    inclusion: List[float]
    hs_sq: List[float]
    hs_sq_standard: List[float]
    verdict: str
    tolerance: float

    @property
    def ok(self) -> bool:
        return max(self.inclusion, default=0.0) <= self.tolerance and self.verdict != 'divergent'

    def to_dict(self) -> dict:
        return {
            'cutoffs': list(self.cutoffs),
            'inclusion_residual': list(self.inclusion),
            'hs_sq': list(self.hs_sq),
            'hs_sq_standard': list(self.hs_sq_standard),
            'verdict': self.verdict,
            'tolerance': self.tolerance,
            'ok': self.ok,
        }


def equivalence_class_check(spectrum: HolonomySpectrum, path: TransportPath, cutoffs: Sequence[int]) -> DiracEquivalenceReport:
    """Compare ψ(L_odd) with the completed Dirac Lagrangian across cutoffs.

    At each cutoff the preimage ψ^{-1}(Eig_{>0}) is tested for inclusion in
    L_odd, and ‖P^⊥_{Dirac} P_{ψ(L_odd)}‖₂² is recorded; the standard
    Lagrangian is compared as well.
    """
    cutoffs = [int(n) for n in cutoffs]
    if any(b <= a for a, b in zip(cutoffs, cutoffs[1:])):
        raise ParameterError(f"cutoffs must increase strictly, got {cutoffs}")
    margin = int(settings.get('dirac.margin', 6))
    inclusion, hs, hs_standard = [], [], []
    for N in cutoffs:
        space = build_mode_space(Parity.ODD, spectrum.d, N)
        frame = dirac_frame(spectrum, path, space)
        standard = standard_lagrangian_odd(space)
        es = frame.eigensystem
        worst = 0.0
        for a in np.flatnonzero(es.eigenvalues > settings.tolerance('kernel')):
            v = frame.inverse(es.samples[a])
            worst = max(worst, float(np.linalg.norm(standard.complement_projector @ v.coeffs)))
        inclusion.append(worst)

        wide = dirac_eigenbasis(spectrum, path, N + margin)
        _, lagrangian = dirac_sublagrangian(wide, space)
        embedding = _embed(wide, space)
        image = embedding.captured & (np.array([n for n, _ in wide.modes]) >= 0)
        psi_l = Subspace(space, orthonormalize(embedding.coefficients[:, image]))
        hs.append(offdiagonal_hs_sq(lagrangian, psi_l))
        hs_standard.append(offdiagonal_hs_sq(standard, lagrangian))

    verdict = growth_verdict(hs)
    report = DiracEquivalenceReport(cutoffs, inclusion, hs, hs_standard, verdict, settings.tolerance('dirac_inclusion'))
    logger.info(f"Dirac equivalence check over cutoffs {cutoffs}: {verdict}")
    return report


def truncated_dirac(connection: LoopConnection, space: ModeSpace) -> np.ndarray:
    """Hermitian matrix diag(n + 1/2) + i·act(A) of D on the truncated odd space."""
    if space.parity is not Parity.ODD:
        raise ParameterError(f"the Dirac operator acts on the odd space, got {space}")
    return np.diag(space.modes + 0.5).astype(complex) + 1j * act_matrix(connection.A, space)


def dirac_pipeline(connection: LoopConnection, N: int, steps: int = DEFAULT_STEPS) -> Dict[str, object]:
    """Transport, spectrum and eigensystem in one call."""
    path = parallel_transport(connection, steps)
    spectrum = holonomy_spectrum(path)
    return {'path': path, 'spectrum': spectrum, 'eigensystem': dirac_eigenbasis(spectrum, path, N)}
