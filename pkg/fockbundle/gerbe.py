"""
Čech data over finite covers: lifting gerbes, trivializations, twisted
Fock bundles and their untwisting.

Overlaps are sorted tuples of chart indices. Angle cochains are real
numbers compared modulo 2π, and the coboundary is the alternating face sum

    (δθ)(i_0 ... i_{k+1}) = Σ_r (-1)^r θ(i_0 ... î_r ... i_{k+1}).
"""
import itertools
import logging
from dataclasses import dataclass
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg

from . import settings
from .clifford import OrthogonalMap, random_orthogonal
from .errors import (InvariantViolationError, ParameterError, PreconditionError,
                     SpaceMismatchError)
from .fock import ExteriorAlgebra, FockSpace, exterior_power
from .implementer import Implementer, cocycle_ratio, implement_general, verify_implements

logger = logging.getLogger(__name__)

Simplex = Tuple[int, ...]

TWO_PI = 2 * np.pi


def wrap_angle(theta):
    """Representative in (-π, π]."""
    wrapped = np.mod(np.asarray(theta, dtype=float) + np.pi, TWO_PI) - np.pi
    wrapped = np.where(wrapped <= -np.pi, wrapped + TWO_PI, wrapped)
    return float(wrapped) if np.ndim(wrapped) == 0 else wrapped


def distance_mod_2pi(theta) -> float:
    """Largest distance of the entries from 2πℤ."""
    arr = np.atleast_1d(np.asarray(theta, dtype=float))
    if arr.size == 0:
        return 0.0
    return float(np.max(np.abs(arr - TWO_PI * np.round(arr / TWO_PI))))


def _faces(simplex: Simplex) -> List[Simplex]:
    return [simplex[:r] + simplex[r + 1:] for r in range(len(simplex))]


def _sorted_sign(simplex: Sequence[int]) -> Tuple[Simplex, int]:
    """Sorted simplex and the sign of the sorting permutation (0 if degenerate)."""
    if len(set(simplex)) != len(simplex):
        return tuple(sorted(simplex)), 0
    inversions = sum(1 for a, b in itertools.combinations(simplex, 2) if a > b)
    return tuple(sorted(simplex)), -1 if inversions % 2 else 1


@dataclass(frozen=True)
class Nerve:
    """Finite nerve: charts with their double, triple and quadruple overlaps."""
    charts: int
    doubles: Tuple[Simplex, ...]
    triples: Tuple[Simplex, ...] = ()
    quads: Tuple[Simplex, ...] = ()

    def __post_init__(self):
        if self.charts < 1:
            raise ParameterError(f"a nerve needs at least one chart, got {self.charts}")
        layers = []
        for size, simplices in ((2, self.doubles), (3, self.triples), (4, self.quads)):
            clean = tuple(sorted({tuple(sorted(int(i) for i in s)) for s in simplices}))
            for s in clean:
                if len(s) != size or len(set(s)) != size or s[0] < 0 or s[-1] >= self.charts:
                    raise ParameterError(f"invalid overlap {s} for a nerve of {self.charts} charts")
            layers.append(clean)
        object.__setattr__(self, 'doubles', layers[0])
        object.__setattr__(self, 'triples', layers[1])
        object.__setattr__(self, 'quads', layers[2])
        for lower, upper in ((set(self.doubles), self.triples), (set(self.triples), self.quads)):
            for s in upper:
                missing = [f for f in _faces(s) if f not in lower]
                if missing:
                    raise ParameterError(f"faces {missing} of overlap {s} are not listed")

    @classmethod
    def complete(cls, n: int) -> 'Nerve':
        """All overlaps of n charts (the nerve of a contractible cover)."""
        charts = range(n)
        return cls(n, tuple(itertools.combinations(charts, 2)), tuple(itertools.combinations(charts, 3)),
                   tuple(itertools.combinations(charts, 4)))

    @classmethod
    def simplex_boundary(cls, n: int) -> 'Nerve':
        """All proper faces of the (n-1)-simplex; n = 4 is the boundary of a tetrahedron."""
        charts = range(n)
        layers = [tuple(itertools.combinations(charts, k)) if k < n else () for k in (2, 3, 4)]
        return cls(n, *layers)

    @classmethod
    def from_dict(cls, data: Mapping) -> 'Nerve':
        try:
            return cls(int(data['charts']), tuple(map(tuple, data.get('doubles', []))),
                       tuple(map(tuple, data.get('triples', []))), tuple(map(tuple, data.get('quads', []))))
        except (KeyError, TypeError, ValueError) as e:
            raise ParameterError(f"malformed nerve: {e}") from e

    def to_dict(self) -> dict:
        return {
            'charts': self.charts,
            'doubles': [list(s) for s in self.doubles],
            'triples': [list(s) for s in self.triples],
            'quads': [list(s) for s in self.quads],
        }

    def simplices(self, degree: int) -> Tuple[Simplex, ...]:
        """Overlaps carrying degree-``degree`` cochains."""
        if degree == 0:
            return tuple((i,) for i in range(self.charts))
        if degree in (1, 2, 3):
            return (self.doubles, self.triples, self.quads)[degree - 1]
        raise ParameterError(f"cochain degree {degree} is not supported")

    def coboundary_matrix(self, degree: int) -> np.ndarray:
        """Integer matrix of δ from degree to degree + 1."""
        rows = self.simplices(degree + 1)
        cols = {s: k for k, s in enumerate(self.simplices(degree))}
        matrix = np.zeros((len(rows), len(cols)))
        for r, s in enumerate(rows):
            for sign_index, face in enumerate(_faces(s)):
                matrix[r, cols[face]] += (-1) ** sign_index
        return matrix


@dataclass(frozen=True, eq=False)
class CircleCochain:
    """U(1)-valued Čech cochain stored as angles on the degree-k overlaps."""
    nerve: Nerve
    degree: int
    values: Mapping[Simplex, float]

    def __post_init__(self):
        keys = self.nerve.simplices(self.degree)
        values = {}
        for s in keys:
            theta = float(self.values.get(s, 0.0))
            if not np.isfinite(theta):
                raise ParameterError(f"angle on {s} is not finite")
            values[s] = theta
        extra = set(map(tuple, self.values)) - set(keys)
        if extra:
            raise ParameterError(f"cochain values on unknown overlaps {sorted(extra)}")
        object.__setattr__(self, 'values', values)

    @classmethod
    def zero(cls, nerve: Nerve, degree: int) -> 'CircleCochain':
        return cls(nerve, degree, {})

    @classmethod
    def from_array(cls, nerve: Nerve, degree: int, array: Sequence[float]) -> 'CircleCochain':
        return cls(nerve, degree, dict(zip(nerve.simplices(degree), map(float, array))))

    @classmethod
    def random(cls, nerve: Nerve, degree: int, rng: np.random.Generator, scale: float = np.pi) -> 'CircleCochain':
        return cls.from_array(nerve, degree, rng.uniform(-scale, scale, size=len(nerve.simplices(degree))))

    def as_array(self) -> np.ndarray:
        return np.array([self.values[s] for s in self.nerve.simplices(self.degree)], dtype=float)

    def value(self, simplex: Sequence[int]) -> float:
        """Alternating extension to unsorted and degenerate simplices."""
        key, sign = _sorted_sign(simplex)
        if sign == 0:
            return 0.0
        return sign * self.values[key]

    def delta(self) -> 'CircleCochain':
        matrix = self.nerve.coboundary_matrix(self.degree)
        return CircleCochain.from_array(self.nerve, self.degree + 1, matrix @ self.as_array())

    def wrapped(self) -> 'CircleCochain':
        return CircleCochain.from_array(self.nerve, self.degree, wrap_angle(self.as_array()))

    def _check(self, other: 'CircleCochain') -> None:
        if other.nerve != self.nerve or other.degree != self.degree:
            raise SpaceMismatchError("cochains on different nerves or degrees")

    def __add__(self, other: 'CircleCochain') -> 'CircleCochain':
        self._check(other)
        return CircleCochain.from_array(self.nerve, self.degree, self.as_array() + other.as_array())

    def __sub__(self, other: 'CircleCochain') -> 'CircleCochain':
        self._check(other)
        return CircleCochain.from_array(self.nerve, self.degree, self.as_array() - other.as_array())

    def __neg__(self) -> 'CircleCochain':
        return CircleCochain.from_array(self.nerve, self.degree, -self.as_array())

    def distance_mod_2pi(self, other: Optional['CircleCochain'] = None) -> float:
        diff = self.as_array() if other is None else (self - other).as_array()
        return distance_mod_2pi(diff)

    def to_dict(self) -> dict:
        return {
            'degree': self.degree,
            'values': {','.join(map(str, s)): theta for s, theta in self.values.items()},
        }


class GroupCocycle:
    """Transition maps g_ij on the double overlaps of a nerve.

    g_ii is the identity and g_ji = g_ij⁻¹.
    """

    def __init__(self, nerve: Nerve, transitions: Mapping[Simplex, OrthogonalMap]):
        self.nerve = nerve
        self.transitions: Dict[Simplex, OrthogonalMap] = {}
        spaces = set()
        for s in nerve.doubles:
            if s not in transitions:
                raise ParameterError(f"missing transition on overlap {s}")
            self.transitions[s] = transitions[s]
            spaces.add(transitions[s].space)
        if len(spaces) > 1:
            raise SpaceMismatchError("transitions act on different mode spaces")
        self.space = spaces.pop() if spaces else None
        residual = self.cocycle_residual()
        tol = settings.tolerance('gerbe')
        if residual > tol:
            raise InvariantViolationError("transitions violate g_ij g_jk = g_ik", residual, tol)

    @classmethod
    def from_charts(cls, nerve: Nerve, charts: Sequence[OrthogonalMap]) -> 'GroupCocycle':
        """g_ij = h_i h_j⁻¹ from chart maps h_i."""
        if len(charts) != nerve.charts:
            raise ParameterError(f"expected {nerve.charts} chart maps, got {len(charts)}")
        return cls(nerve, {(i, j): charts[i] @ charts[j].inverse() for i, j in nerve.doubles})

    def transition(self, i: int, j: int) -> OrthogonalMap:
        if i == j:
            return OrthogonalMap.identity(self.space)
        if (i, j) in self.transitions:
            return self.transitions[(i, j)]
        if (j, i) in self.transitions:
            return self.transitions[(j, i)].inverse()
        raise ParameterError(f"charts {i} and {j} do not overlap")

    def cocycle_residual(self) -> float:
        worst = 0.0
        for i, j, k in self.nerve.triples:
            product = self.transitions[(i, j)].matrix @ self.transitions[(j, k)].matrix
            worst = max(worst, float(np.linalg.norm(product - self.transitions[(i, k)].matrix)))
        return worst


@dataclass(frozen=True, eq=False)
class LiftingGerbeData:
    """Group cocycle with chosen implementer lifts and the resulting 2-cocycle."""
    cocycle: GroupCocycle
    fock: FockSpace
    lifts: Mapping[Simplex, Implementer]
    two_cocycle: CircleCochain

    @property
    def nerve(self) -> Nerve:
        return self.cocycle.nerve

    def lift(self, i: int, j: int) -> np.ndarray:
        """Normalized lift: U_ij, the identity for i = j, U_ji* for i > j."""
        if i == j:
            return np.eye(self.fock.dim, dtype=complex)
        if (i, j) in self.lifts:
            return self.lifts[(i, j)].matrix
        if (j, i) in self.lifts:
            return self.lifts[(j, i)].matrix.conj().T
        raise ParameterError(f"charts {i} and {j} do not overlap")

    def delta_residual(self) -> float:
        return self.two_cocycle.delta().distance_mod_2pi() if self.nerve.quads else 0.0


def extract_two_cocycle(nerve: Nerve, lift: Callable[[int, int], np.ndarray]) -> CircleCochain:
    """c_ijk with U_ij U_jk = e^{i c_ijk} U_ik, angles in (-π, π]."""
    values = {}
    for i, j, k in nerve.triples:
        ratio = cocycle_ratio(lift(i, j) @ lift(j, k), lift(i, k))
        values[(i, j, k)] = wrap_angle(ratio.angle)
    return CircleCochain(nerve, 2, values)


def lifting_cocycle(gc: GroupCocycle, fock: FockSpace) -> LiftingGerbeData:
    """Lift every transition with ``implement_general`` and extract the 2-cocycle.

    Args:
        gc: group cocycle of exact orthogonal maps
        fock: Fock space over the polarization

    Returns:
        LiftingGerbeData whose 2-cocycle is closed modulo 2π
    """
    if gc.space != fock.space:
        raise SpaceMismatchError(f"{gc.space} differs from {fock.space}")
    lifts = {s: implement_general(gc.transitions[s], fock) for s in gc.nerve.doubles}
    provisional = LiftingGerbeData(gc, fock, lifts, CircleCochain.zero(gc.nerve, 2))
    c = extract_two_cocycle(gc.nerve, provisional.lift)
    data = LiftingGerbeData(gc, fock, lifts, c)
    residual = data.delta_residual()
    tol = settings.tolerance('gerbe')
    if residual > tol:
        raise InvariantViolationError("lifting 2-cocycle is not closed", residual, tol)
    logger.info(f"Lifting gerbe on {gc.nerve.charts} charts, δc residual {residual:.3e}")
    return data


@dataclass(frozen=True, eq=False)
class Trivialization:
    """Outcome of ``trivialize``: a 1-cochain b with δb ≡ -c, or an obstruction."""
    trivializable: bool
    cochain: Optional[CircleCochain]
    obstruction: CircleCochain
    residual: float

    def to_dict(self) -> dict:
        return {
            'trivializable': self.trivializable,
            'cochain': self.cochain.to_dict() if self.cochain is not None else None,
            'obstruction': self.obstruction.to_dict(),
            'residual': self.residual,
        }


def _cone_primitive(nerve: Nerve, w: Dict[Simplex, int], vertex: int) -> Optional[Dict[Simplex, int]]:
    """Integer 2-cochain z with δz = w, by coning from ``vertex``; None if the cone leaves the nerve."""
    quads = set(nerve.quads)
    z = {}
    for s in nerve.triples:
        if vertex in s:
            z[s] = 0
            continue
        key, sign = _sorted_sign((vertex,) + s)
        if key not in quads:
            return None
        z[s] = sign * w.get(key, 0)
    delta = nerve.coboundary_matrix(2) @ np.array([z[s] for s in nerve.triples], dtype=float)
    target = np.array([w.get(q, 0) for q in nerve.quads], dtype=float)
    return z if np.array_equal(delta, target) else None


def _close_lift(c: CircleCochain) -> CircleCochain:
    """Shift the angles by multiples of 2π so that δc vanishes as real numbers on quads."""
    nerve = c.nerve
    if not nerve.quads:
        return c
    jumps = np.round(c.delta().as_array() / TWO_PI).astype(int)
    if not jumps.any():
        return c
    w = {q: int(n) for q, n in zip(nerve.quads, jumps)}
    for vertex in range(nerve.charts):
        z = _cone_primitive(nerve, w, vertex)
        if z is not None:
            logger.debug(f"Closed the angle lift by coning from chart {vertex}")
            return CircleCochain(nerve, 2, {s: c.values[s] - TWO_PI * z[s] for s in nerve.triples})
    logger.warning("Could not close the angle lift; the trivialization verdict falls back to the raw angles")
    return c


def trivialize(c: CircleCochain) -> Trivialization:
    """Solve δb = -c modulo 2π by least squares.

    The angles are used as given; they are only shifted by multiples of 2π
    where δc fails to vanish as real numbers on quads.

    Args:
        c: closed degree-2 angle cochain

    Returns:
        Trivialization; trivializable iff every least-squares residual entry
        is within the ``trivialize`` tolerance of a multiple of 2π
    """
    if c.degree != 2:
        raise ParameterError(f"trivialize expects a degree-2 cochain, got degree {c.degree}")
    nerve = c.nerve
    closed = c.delta().distance_mod_2pi() if nerve.quads else 0.0
    if closed > settings.tolerance('gerbe'):
        raise PreconditionError("cochain is not closed modulo 2π", {'residual': closed})

    lifted = _close_lift(c)
    D = nerve.coboundary_matrix(1)
    target = -lifted.as_array()
    if D.size:
        b, *_ = linalg.lstsq(D, target)
    else:
        b = np.zeros(len(nerve.doubles))
    residual = D @ b - target if D.size else -target
    distance = distance_mod_2pi(residual)
    tol = settings.tolerance('trivialize')
    ok = distance <= tol
    obstruction = CircleCochain.from_array(nerve, 2, residual)
    logger.info(f"Trivialization on {nerve.charts} charts: {'trivializable' if ok else 'obstructed'}"
                f" (residual distance {distance:.3e})")
    cochain = CircleCochain.from_array(nerve, 1, b) if ok else None
    return Trivialization(ok, cochain, obstruction, distance)


def obstructed_example() -> CircleCochain:
    """Angles ±π/2 on the boundary of a tetrahedron, 2π on the fundamental cycle."""
    nerve = Nerve.simplex_boundary(4)
    half = np.pi / 2
    return CircleCochain(nerve, 2, {(1, 2, 3): half, (0, 2, 3): -half, (0, 1, 3): half, (0, 1, 2): -half})


@dataclass(frozen=True, eq=False)
class TwistedFockBundleData:
    """Fock fibres per chart with implementer transitions twisted by a 2-cocycle."""
    fibres: Tuple[FockSpace, ...]
    transitions: Mapping[Simplex, Implementer]
    two_cocycle: CircleCochain
    cocycle: GroupCocycle

    @property
    def nerve(self) -> Nerve:
        return self.two_cocycle.nerve

    def clifford_residual(self) -> float:
        """Largest verify_implements residual over the transitions."""
        return max((verify_implements(U, U.implements) for U in self.transitions.values()), default=0.0)


def twisted_bundle(data: LiftingGerbeData) -> TwistedFockBundleData:
    fibres = tuple(data.fock for _ in range(data.nerve.charts))
    return TwistedFockBundleData(fibres, dict(data.lifts), data.two_cocycle, data.cocycle)


@dataclass(frozen=True, eq=False)
class UntwistedCocycle:
    """Strict cocycle of implementers Û_ij = e^{i b_ij} U_ij."""
    nerve: Nerve
    transitions: Mapping[Simplex, Implementer]
    trivialization: CircleCochain
    cocycle_residual: float

    def projection_residual(self, gc: GroupCocycle) -> float:
        """max ‖q(Û_ij) - g_ij‖: the untwisted lifts still cover the group cocycle."""
        return max((float(np.linalg.norm(U.implements.matrix - gc.transitions[s].matrix))
                    for s, U in self.transitions.items()), default=0.0)


def _strict_residual(nerve: Nerve, matrices: Mapping[Simplex, np.ndarray]) -> float:
    worst = 0.0
    for i, j, k in nerve.triples:
        product = matrices[(i, j)] @ matrices[(j, k)]
        worst = max(worst, float(np.linalg.norm(product - matrices[(i, k)])))
    return worst


def untwist(tf: TwistedFockBundleData, b: CircleCochain) -> UntwistedCocycle:
    """Multiply each transition by e^{i b_ij}; requires δb ≡ -c."""
    if b.degree != 1 or b.nerve != tf.nerve:
        raise ParameterError("trivialization must be a degree-1 cochain on the same nerve")
    mismatch = (b.delta() + tf.two_cocycle).distance_mod_2pi()
    tol = settings.tolerance('trivialize')
    if mismatch > tol:
        raise PreconditionError("cochain does not trivialize the 2-cocycle", {'residual': mismatch})
    transitions = {s: U.rephased(b.values[s]) for s, U in tf.transitions.items()}
    residual = _strict_residual(tf.nerve, {s: U.matrix for s, U in transitions.items()})
    tol_g = settings.tolerance('gerbe')
    if residual > tol_g:
        raise InvariantViolationError("untwisted transitions are not a strict cocycle", residual, tol_g)
    logger.info(f"Untwisted Fock bundle, strict cocycle residual {residual:.3e}")
    return UntwistedCocycle(tf.nerve, transitions, b, residual)


def retwist(untwisted: UntwistedCocycle) -> Dict[Simplex, Implementer]:
    """Inverse of ``untwist``: e^{-i b_ij} Û_ij."""
    b = untwisted.trivialization
    return {s: U.rephased(-b.values[s]) for s, U in untwisted.transitions.items()}


@dataclass(frozen=True, eq=False)
class Refinement:
    """Lifting data pulled back along a chart map, with the comparison residual."""
    data: LiftingGerbeData
    pullback: CircleCochain
    residual: float


def _check_chart_map(source: Nerve, target: Nerve, chart_map: Mapping[int, int]) -> None:
    if set(chart_map) != set(range(target.charts)):
        raise ParameterError("chart map must be defined on every chart of the refining nerve")
    if any(not 0 <= i < source.charts for i in chart_map.values()):
        raise ParameterError("chart map leaves the refined nerve")
    allowed = {2: set(source.doubles), 3: set(source.triples)}
    for s in target.doubles + target.triples:
        image = tuple(sorted({chart_map[i] for i in s}))
        if len(image) > 1 and image not in allowed[len(image)]:
            raise ParameterError(f"overlap {s} maps to {image}, which is not an overlap of the refined nerve")


def refine(src: LiftingGerbeData, target: Nerve, chart_map: Mapping[int, int],
           conjugator: Optional[Implementer] = None) -> Refinement:
    """Pull lifting data back along f: charts of ``target`` -> charts of the source.

    Args:
        src: lifting gerbe data on the refined nerve
        target: refining nerve
        chart_map: f(a) for every chart a of ``target``
        conjugator: optional implementer of k, applying the homomorphism
            g ↦ k g k⁻¹ and U ↦ U_k U U_k* on the way

    Returns:
        Refinement whose 2-cocycle is compared with the pullback f*c
    """
    chart_map = {int(a): int(i) for a, i in chart_map.items()}
    _check_chart_map(src.nerve, target, chart_map)
    def hom(g: OrthogonalMap) -> OrthogonalMap:
        if conjugator is None:
            return g
        k = conjugator.implements
        return k @ g @ k.inverse()

    def hom_lift(U: np.ndarray) -> np.ndarray:
        if conjugator is None:
            return U
        return conjugator.matrix @ U @ conjugator.matrix.conj().T

    transitions, lifts = {}, {}
    for a, b in target.doubles:
        g = hom(src.cocycle.transition(chart_map[a], chart_map[b]))
        transitions[(a, b)] = g
        lifts[(a, b)] = Implementer(src.fock, hom_lift(src.lift(chart_map[a], chart_map[b])), g, 'pullback')
    gc = GroupCocycle(target, transitions)
    provisional = LiftingGerbeData(gc, src.fock, lifts, CircleCochain.zero(target, 2))
    c = extract_two_cocycle(target, provisional.lift)
    data = LiftingGerbeData(gc, src.fock, lifts, c)

    pulled = CircleCochain(target, 2, {
        s: wrap_angle(src.two_cocycle.value(tuple(chart_map[i] for i in s))) for s in target.triples
    })
    residual = c.distance_mod_2pi(pulled)
    tol = settings.tolerance('gerbe')
    if residual > tol:
        raise InvariantViolationError("pulled-back 2-cocycle differs from the pushed-forward one", residual, tol)
    return Refinement(data, pulled, residual)


@dataclass(frozen=True, eq=False)
class AssociatedCocycle:
    rep: str
    matrices: Mapping[Simplex, np.ndarray]
    discrepancy: CircleCochain
    residual: float


def associated_cocycle(gc: GroupCocycle, rep: str, lifting: Optional[LiftingGerbeData] = None) -> AssociatedCocycle:
    """Transition matrices of an associated bundle.

    rep 'mode' uses g_ij on V, 'clifford' uses θ_{g_ij} on Cl(V) ≅ ΛV and
    'fock-with-lifts' uses the lifts U_ij, whose discrepancy phases are the
    2-cocycle of the twisted Fock bundle.
    """
    nerve = gc.nerve
    if rep == 'mode':
        matrices = {s: g.matrix for s, g in gc.transitions.items()}
    elif rep == 'clifford':
        algebra = ExteriorAlgebra(gc.space.dim)
        matrices = {s: exterior_power(algebra, g.matrix) for s, g in gc.transitions.items()}
    elif rep == 'fock-with-lifts':
        if lifting is None:
            raise PreconditionError("the Fock representation needs lifting data")
        if lifting.nerve != nerve:
            raise SpaceMismatchError("lifting data belongs to another nerve")
        matrices = {s: U.matrix for s, U in lifting.lifts.items()}
    else:
        raise ParameterError(f"unknown representation {rep!r}, expected mode, clifford or fock-with-lifts")

    def lift(i, j):
        if (i, j) in matrices:
            return matrices[(i, j)]
        return matrices[(j, i)].conj().T

    discrepancy = extract_two_cocycle(nerve, lift)
    if rep == 'fock-with-lifts':
        residual = discrepancy.distance_mod_2pi(lifting.two_cocycle)
    else:
        residual = _strict_residual(nerve, matrices)
    return AssociatedCocycle(rep, matrices, discrepancy, residual)


def random_group_cocycle(nerve: Nerve, space, rng: np.random.Generator, scale: float = 0.5) -> GroupCocycle:
    """g_ij = h_i h_j⁻¹ for random exact orthogonal chart maps h_i."""
    charts = [random_orthogonal(space, rng, scale=scale) for _ in range(nerve.charts)]
    return GroupCocycle.from_charts(nerve, charts)
