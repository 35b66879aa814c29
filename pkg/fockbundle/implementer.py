"""
Implementers of orthogonal maps on Fock space.

An implementer of g is a unitary U of F_L with U ρ(v) U* = ρ(gv) for all v.
``implement_general`` builds one for any g: the transformed vacuum Ω_g is
the kernel vector of the stacked annihilators ρ(g αl_i), and monomials are
mapped by U l_S = 2^{-k/2} ρ(g l_{s1}) ... ρ(g l_{sk}) Ω_g. Implementers of
the same g differ by a phase, which is fixed by a documented rule.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence, Union

import numpy as np
from scipy import linalg

from . import settings
from .clifford import CliffordWord, ModeIsometry, OrthogonalMap, SkewSymmetricMap
from .errors import (InvariantViolationError, NumericalDegeneracyError,
                     ParameterError, SpaceMismatchError)
from .fock import FockSpace, FockVector, exterior_power
from .lagrangian import Lagrangian, embed_unitary

logger = logging.getLogger(__name__)

VACUUM_POSITIVE = 'vacuum-positive'
FIRST_COORD = 'first-coord'
SECTION = 'section'
PRODUCT = 'product'

PHASE_THRESHOLD = 1e-8


@dataclass(frozen=True, eq=False)
class Implementer:
    """Fock unitary U together with the orthogonal map it implements."""
    fock: FockSpace
    matrix: np.ndarray
    implements: OrthogonalMap
    phase_rule: str
    residual: float = field(default=float('nan'))

    def __post_init__(self):
        matrix = np.asarray(self.matrix, dtype=complex)
        if matrix.shape != (self.fock.dim, self.fock.dim):
            raise ParameterError(f"implementer of shape {matrix.shape} does not fit {self.fock}")
        if self.implements.space != self.fock.space:
            raise SpaceMismatchError(f"{self.implements.space} differs from {self.fock.space}")
        matrix.setflags(write=False)
        object.__setattr__(self, 'matrix', matrix)
        if np.isnan(self.residual):
            object.__setattr__(self, 'residual', verify_implements(matrix, self.implements, self.fock))

    def __matmul__(self, other: 'Implementer') -> 'Implementer':
        if not self.fock.compatible(other.fock):
            raise SpaceMismatchError(f"{self.fock} and {other.fock} differ")
        return Implementer(self.fock, self.matrix @ other.matrix, self.implements @ other.implements, PRODUCT)

    def adjoint(self) -> 'Implementer':
        return Implementer(self.fock, self.matrix.conj().T, self.implements.inverse(), self.phase_rule)

    def rephased(self, angle: float) -> 'Implementer':
        """e^{i angle} U, implementing the same map."""
        return Implementer(self.fock, np.exp(1j * angle) * self.matrix, self.implements, PRODUCT, self.residual)

    def unitarity_residual(self) -> float:
        return float(np.linalg.norm(self.matrix.conj().T @ self.matrix - np.eye(self.fock.dim)))

    def apply(self, x: FockVector) -> FockVector:
        if not self.fock.compatible(x.fock):
            raise SpaceMismatchError(f"{x.fock} differs from {self.fock}")
        return FockVector(self.fock, self.matrix @ x.coeffs)


@dataclass(frozen=True)
class CocycleValue:
    """Unit complex number c(g, h) with U_g U_h = c(g, h) U_gh."""
    value: complex
    residual: float

    @property
    def angle(self) -> float:
        return float(np.angle(self.value))

    def to_dict(self) -> dict:
        return {'value': [self.value.real, self.value.imag], 'angle': self.angle, 'residual': self.residual}


def verify_implements(U: Union[np.ndarray, Implementer], g: OrthogonalMap, fock: Optional[FockSpace] = None) -> float:
    """max_k ‖ρ(g e_k) - U ρ(e_k) U*‖ over the basis of V.

    Computed as ‖ρ(g e_k) U - U ρ(e_k)‖, equal for unitary U.
    """
    if isinstance(U, Implementer):
        fock = U.fock if fock is None else fock
        U = U.matrix
    if fock is None:
        raise ParameterError("a Fock space is required for a bare matrix")
    U = np.asarray(U, dtype=complex)
    if U.shape != (fock.dim, fock.dim) or g.space != fock.space:
        raise SpaceMismatchError(f"implementer and map do not fit {fock}")
    worst = 0.0
    for k in range(fock.space.dim):
        lhs = fock.rho_coeffs(g.matrix[:, k]) @ U
        rhs = (fock.rho_coeffs(np.eye(fock.space.dim)[:, k]).T @ U.T).T
        worst = max(worst, float(np.linalg.norm(lhs - rhs)))
    return worst


def section_ul(fock: FockSpace, T: np.ndarray) -> Implementer:
    """Λ_T for a unitary T on L (frame coordinates): l_S ↦ T l_{s1} ∧ ... ∧ T l_{sk}."""
    g = embed_unitary(fock.lagrangian, T)
    matrix = exterior_power(fock, T)
    return Implementer(fock, matrix, g, SECTION)


def transformed_vacuum(g: OrthogonalMap, fock: FockSpace) -> Dict[str, object]:
    """Unit vector annihilated by every ρ(g αl_i), with its conditioning report."""
    G = fock.alpha_frame
    gram = np.zeros((fock.dim, fock.dim), dtype=complex)
    for i in range(fock.m):
        op = fock.rho_coeffs(g.matrix @ G[:, i])
        gram += (op.conj().T @ op).toarray()
    gram = 0.5 * (gram + gram.conj().T)
    count = min(2, fock.dim)
    values, vectors = linalg.eigh(gram, subset_by_index=[0, count - 1])
    values = np.clip(values, 0.0, None)
    report = {
        's_min': float(np.sqrt(values[0])),
        's_next': float(np.sqrt(values[1])) if count > 1 else float('inf'),
        'fock_dim': fock.dim,
    }
    report['gap'] = report['s_next'] - report['s_min']
    logger.debug(f"Transformed vacuum solve: {report}")
    tol = settings.tolerance('kernel')
    if values[0] > tol or (count > 1 and values[1] <= 1e3 * max(values[0], tol)):
        raise NumericalDegeneracyError("transformed vacuum is not a simple kernel vector", report)
    return {'vector': vectors[:, 0], 'report': report}


def _fix_phase(vector: np.ndarray):
    if abs(vector[0]) > PHASE_THRESHOLD:
        return vector * (abs(vector[0]) / vector[0]), VACUUM_POSITIVE
    first = int(np.argmax(np.abs(vector) > PHASE_THRESHOLD))
    logger.warning("Vacuum overlap vanishes, fixing the implementer phase on the first nonzero coordinate")
    return vector * (abs(vector[first]) / vector[first]), FIRST_COORD


def implement_general(g: OrthogonalMap, fock: FockSpace) -> Implementer:
    """Implementer of any exact orthogonal map g on F_L.

    Args:
        g: orthogonal map on the space of the Lagrangian
        fock: Fock space over the Lagrangian

    Returns:
        Implementer with the vacuum-positive phase, or first-coord when
        ⟨Ω, UΩ⟩ vanishes
    """
    if g.space != fock.space:
        raise SpaceMismatchError(f"{g.space} differs from {fock.space}")
    g.require_exact()
    omega, rule = _fix_phase(transformed_vacuum(g, fock)['vector'])

    F = fock.frame
    rho_g = [fock.rho_coeffs(g.matrix @ F[:, i]) for i in range(fock.m)]
    U = np.zeros((fock.dim, fock.dim), dtype=complex)
    U[:, 0] = omega
    for col, s in enumerate(fock.states_list):
        if not s:
            continue
        rest = fock.find_index[sum(1 << t for t in s[1:])]
        U[:, col] = (rho_g[s[0]] @ U[:, rest]) / np.sqrt(2)

    implementer = Implementer(fock, U, g, rule)
    tol = settings.tolerance('implements')
    if implementer.residual > tol:
        raise InvariantViolationError("constructed unitary does not implement g", implementer.residual, tol)
    return implementer


def scalar_residual(U1: Implementer, U2: Implementer) -> float:
    """Distance of U1 U2* from the nearest scalar multiple of the identity."""
    product = U1.matrix @ U2.matrix.conj().T
    z = np.trace(product) / product.shape[0]
    return float(np.linalg.norm(product - z * np.eye(product.shape[0])))


def cocycle_ratio(product: np.ndarray, reference: np.ndarray) -> CocycleValue:
    """Scalar c with product = c·reference, read on the largest entry of ``reference``."""
    idx = np.unravel_index(np.argmax(np.abs(reference)), reference.shape)
    if abs(reference[idx]) < PHASE_THRESHOLD:
        raise NumericalDegeneracyError("reference matrix vanishes", {'max_entry': float(abs(reference[idx]))})
    value = product[idx] / reference[idx]
    residual = float(np.linalg.norm(product - value * reference))
    tol = settings.tolerance('cocycle')
    report = {'modulus': float(abs(value)), 'residual': residual, 'entry': [int(i) for i in idx]}
    if abs(abs(value) - 1.0) > tol or residual > tol * max(1.0, np.sqrt(product.shape[0])):
        raise NumericalDegeneracyError("cocycle ratio is ill-conditioned", report)
    return CocycleValue(complex(value / abs(value)), residual)


def cocycle(g: OrthogonalMap, h: OrthogonalMap, fock: FockSpace) -> CocycleValue:
    """c(g, h) with U_g U_h = c(g, h) U_gh for the phase-fixed implementers."""
    Ug = implement_general(g, fock)
    Uh = implement_general(h, fock)
    Ugh = implement_general(g @ h, fock)
    return cocycle_ratio(Ug.matrix @ Uh.matrix, Ugh.matrix)


def commutator_phase(g: OrthogonalMap, h: OrthogonalMap, fock: FockSpace) -> complex:
    """Scalar U_g U_h U_g* U_h* U_{[g,h]}* for the group commutator [g,h] = g h g⁻¹ h⁻¹."""
    Ug = implement_general(g, fock).matrix
    Uh = implement_general(h, fock).matrix
    comm = g @ h @ g.inverse() @ h.inverse()
    Uc = implement_general(comm, fock).matrix
    return cocycle_ratio(Ug @ Uh @ Ug.conj().T @ Uh.conj().T, Uc).value


def group_cocycle_estimate(X1: SkewSymmetricMap, X2: SkewSymmetricMap, fock: FockSpace, step: float = 1e-3) -> float:
    """Mixed second difference of arg commutator_phase(e^{sX1}, e^{tX2}) at s = t = 0.

    Approximates ⟨Ω, [X̃1, X̃2] Ω⟩ / i; terms even in s or t cancel.
    """
    def angle(s, t):
        return float(np.angle(commutator_phase(X1.exp(s), X2.exp(t), fock)))

    total = angle(step, step) - angle(step, -step) - angle(-step, step) + angle(-step, -step)
    return total / (4 * step * step)


def frame_change(source: FockSpace, target: FockSpace, g: Union[OrthogonalMap, ModeIsometry]) -> np.ndarray:
    """Λ_g: F_L -> F_{gL} in the frames of the two Fock spaces."""
    matrix = g.matrix
    image = matrix @ source.frame
    coords = target.frame.conj().T @ image
    residual = float(np.linalg.norm(image - target.frame @ coords))
    tol = settings.tolerance('membership')
    if residual > tol:
        raise InvariantViolationError("g does not map the source Lagrangian onto the target", residual, tol)
    return exterior_power(source, coords, target=target)


def intertwining_residual(T: np.ndarray, source: FockSpace, target: FockSpace,
                          nu: Optional[Union[OrthogonalMap, ModeIsometry]] = None) -> float:
    """max_k ‖ρ_target(ν e_k) T - T ρ_source(e_k)‖ (ν = identity by default)."""
    dim = source.space.dim
    nu_matrix = np.eye(dim) if nu is None else nu.matrix
    worst = 0.0
    for k in range(dim):
        lhs = target.rho_coeffs(nu_matrix[:, k]) @ T
        rhs = (source.rho_coeffs(np.eye(dim)[:, k]).T @ T.T).T
        worst = max(worst, float(np.linalg.norm(lhs - rhs)))
    return worst


@dataclass(frozen=True, eq=False)
class FockEquivalence:
    """Unitary T: F_{L1} -> F_{L2} intertwining the Clifford actions."""
    source: FockSpace
    target: FockSpace
    matrix: np.ndarray
    residual: float


def equivalence_from_implementer(U: Implementer, g1: OrthogonalMap, g2: OrthogonalMap,
                                 source: FockSpace, target: FockSpace) -> FockEquivalence:
    """T = Λ_{g2} U Λ_{g1}⁻¹ for U implementing g2⁻¹ g1 on F_L.

    Args:
        U: implementer on F_L of g2⁻¹ g1
        g1: map with g1(L) = L1
        g2: map with g2(L) = L2
        source: Fock space over L1
        target: Fock space over L2
    """
    expected = g2.inverse() @ g1
    mismatch = float(np.linalg.norm(U.implements.matrix - expected.matrix))
    tol = settings.tolerance('implements')
    if mismatch > tol:
        raise InvariantViolationError("U does not implement g2⁻¹ g1", mismatch, tol)
    if U.residual > tol:
        raise InvariantViolationError("implementation residual too large", U.residual, tol)
    lam1 = frame_change(U.fock, source, g1)
    lam2 = frame_change(U.fock, target, g2)
    T = lam2 @ U.matrix @ lam1.conj().T
    residual = intertwining_residual(T, source, target)
    logger.debug(f"Equivalence F_L1 -> F_L2 with intertwining residual {residual:.3e}")
    return FockEquivalence(source, target, T, residual)


def compose_equivalences(t12: FockEquivalence, t23: FockEquivalence, t13: FockEquivalence) -> CocycleValue:
    """z with T23 T12 = z T13; |z| = 1 reflects the U(1)-torsor structure."""
    if not (t12.target.compatible(t23.source) and t12.source.compatible(t13.source)
            and t23.target.compatible(t13.target)):
        raise SpaceMismatchError("equivalences do not compose")
    return cocycle_ratio(t23.matrix @ t12.matrix, t13.matrix)


def transport_fock(nu: Union[OrthogonalMap, ModeIsometry], x: FockVector,
                   target: Optional[FockSpace] = None) -> FockVector:
    """Λ_ν x in the Fock space over ν(L).

    Without ``target`` the image frame ν l_i is used, so Λ_ν keeps the
    coordinates.
    """
    if isinstance(nu, OrthogonalMap):
        nu = ModeIsometry.from_orthogonal(nu)
    if x.fock.space != nu.source:
        raise SpaceMismatchError(f"{x.fock.space} differs from {nu.source}")
    if target is None:
        target = FockSpace(Lagrangian(nu.target, nu.matrix @ x.fock.frame))
    return FockVector(target, frame_change(x.fock, target, nu) @ x.coeffs)


def transport_clifford(nu: Union[OrthogonalMap, ModeIsometry], word: CliffordWord) -> CliffordWord:
    """Cl(ν): relabel every letter f(v) as f(νv)."""
    if isinstance(nu, OrthogonalMap):
        nu = ModeIsometry.from_orthogonal(nu)
    if word.space != nu.source:
        raise SpaceMismatchError(f"{word.space} differs from {nu.source}")
    return word.map_letters(nu.apply, space=nu.target)


def phase_covariance_residual(implementers: Sequence[Implementer]) -> float:
    """Largest scalar residual between consecutive implementers of one map."""
    worst = 0.0
    for u1, u2 in zip(implementers, implementers[1:]):
        worst = max(worst, scalar_residual(u1, u2))
    return worst
