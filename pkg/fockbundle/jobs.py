"""
Job handlers behind the command line.

Each handler takes the decoded JSON payload of one job, a seeded generator
and the command flags, and returns a Report. Missing fields fall back to
small defaults so that an empty payload runs a demonstration job.
"""
import logging
from typing import Any, Callable, Dict, Mapping, Optional

import numpy as np

from struttura.version import check_version_compatibility, get_version, get_version_info

from . import serialization as codec
from . import settings
from .clifford import OrthogonalMap, random_orthogonal, random_skew
from .dirac import (LoopConnection, dirac_eigenbasis, dirac_lagrangian, equivalence_class_check,
                    holonomy_spectrum, parallel_transport)
from .errors import ParameterError
from .fock import FockSpace, adjoint_residual, annihilate, car_residual, rho, second_quantize, vacuum
from .gerbe import (GroupCocycle, Nerve, associated_cocycle, lifting_cocycle, obstructed_example,
                    retwist, trivialize, twisted_bundle, untwist)
from .implementer import implement_general, transformed_vacuum
from .lagrangian import equivalence_diagnostic, is_lagrangian, standard_lagrangian
from .loopgroup import exp_act, lie_cocycle_check, random_algebra_loop
from .modespace import ModeSpace, ModeVector, Parity, build_mode_space, pairing
from .reports import Report

logger = logging.getLogger(__name__)

Handler = Callable[[Mapping[str, Any], np.random.Generator, Mapping[str, Any]], Report]

DEFAULT_SPACE = {'parity': 'odd', 'd': 2, 'N': 2}


def check_format(payload: Mapping[str, Any]) -> None:
    """Reject payloads written for a newer release."""
    required = payload.get('format')
    if required is None:
        return
    try:
        compatible = check_version_compatibility(str(required))
    except ValueError as e:
        raise ParameterError(str(e), {'format': required}) from e
    if not compatible:
        raise ParameterError(f"job format {required} needs a newer release than {get_version()}",
                             {'format': required, 'installed': get_version_info()})


def _space(payload: Mapping[str, Any], default: Optional[Mapping[str, Any]] = None) -> ModeSpace:
    return codec.space_from_dict(payload.get('space', default or DEFAULT_SPACE))


def _fock(payload: Mapping[str, Any], space: ModeSpace) -> FockSpace:
    if 'lagrangian' in payload:
        lagrangian = codec.lagrangian_from_dict(payload['lagrangian'])
        if lagrangian.space != space:
            raise ParameterError(f"Lagrangian lives on {lagrangian.space}, job space is {space}")
    else:
        lagrangian = standard_lagrangian(space)
    return FockSpace(lagrangian)


def car_check(payload: Mapping[str, Any], rng: np.random.Generator, flags: Mapping[str, Any]) -> Report:
    """CAR relations, adjoints, vacuum annihilation and second quantization on random vectors."""
    report = Report('car-check')
    space = _space(payload)
    fock = _fock(payload, space)
    samples = int(payload.get('samples', 5))
    if samples < 1:
        raise ParameterError(f"samples must be positive, got {samples}")
    tol = settings.tolerance('car')

    car, adj, comm = 0.0, 0.0, 0.0
    for _ in range(samples):
        v, w = space.random_vector(rng), space.random_vector(rng)
        car = max(car, car_residual(fock, v, w))
        adj = max(adj, adjoint_residual(fock, v))
        X = random_skew(space, rng)
        tilde = second_quantize(X, fock)
        lhs = tilde @ fock.rho_matrix(v) - fock.rho_matrix(v) @ tilde
        diff = (lhs - fock.rho_matrix(ModeVector(space, X.matrix @ v.coeffs))).toarray()
        comm = max(comm, float(np.abs(diff).max(initial=0.0)))

    omega = vacuum(fock)
    killed = max((annihilate(ModeVector(space, fock.alpha_frame[:, i]), omega).norm() for i in range(fock.m)),
                 default=0.0)
    v = space.random_vector(rng)
    square = abs(omega.inner(rho(v, rho(v, omega))) - pairing(v, v))

    report.check('car_anticommutator', car, tol)
    report.check('adjoint', adj, tol)
    report.check('vacuum_annihilated', killed, tol)
    report.check('vacuum_rho_squared', square, tol)
    report.check('second_quantization_commutator', comm, tol * max(1, space.dim))
    report.add('space', codec.space_to_dict(space))
    report.add('fock_dim', fock.dim)
    return report


def _orthogonal_from_payload(payload: Mapping[str, Any], space: ModeSpace, rng: np.random.Generator) -> OrthogonalMap:
    if 'g' in payload:
        return codec.orthogonal_from_dict(payload['g'], space)
    if payload.get('identity'):
        return OrthogonalMap.identity(space)
    return random_orthogonal(space, rng, scale=float(payload.get('scale', 0.5)),
                             bandwidth=payload.get('bandwidth'))


def implement(payload: Mapping[str, Any], rng: np.random.Generator, flags: Mapping[str, Any]) -> Report:
    """Build the implementer of g and verify it."""
    report = Report('implement')
    space = _space(payload)
    fock = _fock(payload, space)
    g = _orthogonal_from_payload(payload, space, rng)
    U = implement_general(g, fock)
    vacuum_report = transformed_vacuum(g, fock)

    report.check('implements', U.residual, settings.tolerance('implements'))
    report.check('unitarity', U.unitarity_residual(), settings.tolerance('implements'))
    report.add('implementer', codec.implementer_to_dict(U))
    report.add('diagnostics', g.diagnostics(fock.lagrangian))
    report.add('vacuum', {k: v for k, v in vacuum_report.items() if k != 'vector'})
    return report


def _loop_pairs(payload: Mapping[str, Any], rng: np.random.Generator):
    if 'pairs' in payload:
        return [(codec.loop_from_dict(p['f1'], 'algebra'), codec.loop_from_dict(p['f2'], 'algebra'))
                for p in payload['pairs']]
    if 'f1' in payload and 'f2' in payload:
        return [(codec.loop_from_dict(payload['f1'], 'algebra'), codec.loop_from_dict(payload['f2'], 'algebra'))]
    d = int(payload.get('d', 2))
    bandwidth = int(payload.get('bandwidth', 2))
    count = int(payload.get('count', 3))
    return [(random_algebra_loop(d, bandwidth, rng), random_algebra_loop(d, bandwidth, rng)) for _ in range(count)]


def cocycle_lie(payload: Mapping[str, Any], rng: np.random.Generator, flags: Mapping[str, Any]) -> Report:
    """Table of lhs, rhs and coboundary of the loop-algebra cocycle."""
    report = Report('cocycle-lie')
    pairs = _loop_pairs(payload, rng)
    parity = payload.get('parity', 'odd')
    table = []
    for index, (f1, f2) in enumerate(pairs):
        N = int(payload.get('N', f1.bandwidth + f2.bandwidth + 2))
        space = build_mode_space(parity, f1.d, N)
        result = lie_cocycle_check(f1, f2, space)
        row = result.to_dict()
        row['N'] = N
        table.append(row)
        report.check(f'pair_{index}', result.residual, result.tolerance)
    report.add('table', table)
    return report


def lagrangian_equiv(payload: Mapping[str, Any], rng: np.random.Generator, flags: Mapping[str, Any]) -> Report:
    """Growth of ‖P_{L1}^⊥ P_{L2}‖₂² for the standard Lagrangian against a second family."""
    report = Report('lagrangian-equiv')
    parity = Parity(payload.get('parity', 'odd'))
    d = int(payload.get('d', 2))
    cutoffs = [int(n) for n in payload.get('cutoffs', [2, 4, 6, 8])]
    pair = payload.get('pair', 'alpha')

    def standard(n):
        return standard_lagrangian(build_mode_space(parity, d, n))

    if pair == 'alpha':
        def other(n):
            return standard(n).alpha()
    elif pair == 'standard':
        other = standard
    elif pair == 'loop':
        loop = codec.loop_from_dict(payload['loop'], 'algebra') if 'loop' in payload else \
            random_algebra_loop(d, int(payload.get('bandwidth', 1)), rng, scale=0.5)
        t = float(payload.get('t', 1.0))

        def other(n):
            space = build_mode_space(parity, d, n)
            return standard(n).transform(exp_act(loop, space, t).matrix)
    else:
        raise ParameterError(f"unknown pair {pair!r}, expected alpha, standard or loop")

    result = equivalence_diagnostic(standard, other, cutoffs)
    report.add('diagnostic', result.to_dict())
    expect = payload.get('expect')
    report.verdict('verdict', expect is None or result.verdict == expect, result.hs_sq[-1] if result.hs_sq else 0.0)
    return report


def _group_cocycle(payload: Mapping[str, Any], nerve: Nerve, space: ModeSpace, rng: np.random.Generator) -> GroupCocycle:
    transitions = payload.get('transitions')
    if transitions is None:
        scale = float(payload.get('scale', 0.5))
        charts = [random_orthogonal(space, rng, scale=scale) for _ in range(nerve.charts)]
        return GroupCocycle.from_charts(nerve, charts)
    maps = {}
    for key, value in transitions.items():
        i, j = (int(x) for x in str(key).split(','))
        maps[(i, j)] = codec.orthogonal_from_dict(value, space)
    return GroupCocycle(nerve, maps)


def _nerve(payload: Mapping[str, Any], default_charts: int = 3) -> Nerve:
    if 'nerve' in payload:
        return codec.nerve_from_dict(payload['nerve'])
    return Nerve.complete(int(payload.get('charts', default_charts)))


def _trivialize_and_untwist(report: Report, c, data, flags: Mapping[str, Any]) -> None:
    if not (flags.get('trivialize') or flags.get('untwist')):
        return
    result = trivialize(c)
    report.add('trivialization', result.to_dict())
    report.verdict('trivializable', result.trivializable, result.residual)
    if not flags.get('untwist') or not result.trivializable or data is None:
        return
    tf = twisted_bundle(data)
    untwisted = untwist(tf, result.cochain)
    tol = settings.tolerance('gerbe')
    report.check('untwisted_cocycle', untwisted.cocycle_residual, tol)
    report.check('untwisted_projection', untwisted.projection_residual(data.cocycle), tol)
    report.check('untwisted_clifford', max(U.residual for U in untwisted.transitions.values()),
                 settings.tolerance('implements'))
    restored = retwist(untwisted)
    roundtrip = max(float(np.linalg.norm(restored[s].matrix - tf.transitions[s].matrix)) for s in restored)
    report.check('retwist_roundtrip', roundtrip, tol)


def gerbe(payload: Mapping[str, Any], rng: np.random.Generator, flags: Mapping[str, Any]) -> Report:
    """Lifting 2-cocycle of a group cocycle, or a given cochain, with optional trivialization."""
    report = Report('gerbe')
    data = None
    if payload.get('example') == 'obstructed':
        c = obstructed_example()
    elif 'cochain' in payload:
        c = codec.cochain_from_dict(payload['cochain'], _nerve(payload))
    else:
        nerve = _nerve(payload)
        space = _space(payload)
        fock = _fock(payload, space)
        data = lifting_cocycle(_group_cocycle(payload, nerve, space, rng), fock)
        c = data.two_cocycle
        report.check('delta_two_cocycle', data.delta_residual(), settings.tolerance('gerbe'))
        fock_rep = associated_cocycle(data.cocycle, 'fock-with-lifts', data)
        report.check('fock_discrepancy', fock_rep.residual, settings.tolerance('gerbe'))

    report.add('nerve', c.nerve.to_dict())
    report.add('two_cocycle', c.to_dict())
    _trivialize_and_untwist(report, c, data, flags)
    return report


def dirac(payload: Mapping[str, Any], rng: np.random.Generator, flags: Mapping[str, Any]) -> Report:
    """Transport, holonomy spectrum, eigensystem, Dirac Lagrangian and equivalence check."""
    report = Report('dirac')
    if 'connection' in payload:
        connection = LoopConnection(codec.loop_from_dict(payload['connection'], 'algebra'))
    elif 'theta' in payload:
        connection = LoopConnection.rotation(float(payload['theta']))
    else:
        connection = LoopConnection.random(int(payload.get('d', 2)), int(payload.get('bandwidth', 1)), rng,
                                           scale=float(payload.get('scale', 0.3)))
    steps = int(payload.get('steps', 2048))
    N = int(payload.get('N', 4))
    cutoffs = payload.get('cutoffs')

    path = parallel_transport(connection, steps)
    spectrum = holonomy_spectrum(path)
    es = dirac_eigenbasis(spectrum, path, N)
    space = build_mode_space(Parity.ODD, connection.d, N)
    _, lagrangian = dirac_lagrangian(spectrum, path, space)

    orth = settings.tolerance('orthogonality')
    fine = settings.tolerance('dirac_inclusion')
    report.check('transport_orthogonality', path.orthogonality_residual(), orth)
    report.check('holonomy_diagonalized', spectrum.residual, orth)
    report.check('eigen_residual', es.eigen_residual, settings.tolerance('dirac_residual'))
    report.check('antiperiodicity', es.antiperiodicity_residual(), fine)
    report.check('orthonormality', es.orthonormality_residual(), fine)
    report.check('alpha_compatibility', es.alpha_residual(), fine)
    report.check('spectral_symmetry', es.spectral_symmetry_residual(), fine)
    lagrangian_check = is_lagrangian(space, lagrangian)
    report.verdict('dirac_lagrangian', lagrangian_check.ok, lagrangian_check.isotropy_residual)
    report.add('spectrum', es.to_dict())
    if cutoffs:
        equivalence = equivalence_class_check(spectrum, path, cutoffs)
        report.add('equivalence', equivalence.to_dict())
        report.verdict('equivalence_class', equivalence.ok, max(equivalence.inclusion, default=0.0))
    return report


def fockbundle(payload: Mapping[str, Any], rng: np.random.Generator, flags: Mapping[str, Any]) -> Report:
    """End to end: loops on charts -> transitions -> twisted Fock data -> optional untwist."""
    report = Report('fockbundle')
    nerve = _nerve(payload)
    space = _space(payload)
    fock = _fock(payload, space)
    t = float(payload.get('t', 1.0))
    if 'loops' in payload:
        loops = [codec.loop_from_dict(item, 'algebra') for item in payload['loops']]
        if len(loops) != nerve.charts:
            raise ParameterError(f"expected {nerve.charts} loops, got {len(loops)}")
    else:
        bandwidth = int(payload.get('bandwidth', 1))
        loops = [random_algebra_loop(space.d, bandwidth, rng, scale=float(payload.get('scale', 0.3)))
                 for _ in range(nerve.charts)]
    charts = [exp_act(f, space, t) for f in loops]
    data = lifting_cocycle(GroupCocycle.from_charts(nerve, charts), fock)
    tf = twisted_bundle(data)

    report.check('delta_two_cocycle', data.delta_residual(), settings.tolerance('gerbe'))
    report.check('clifford_compatibility', tf.clifford_residual(), settings.tolerance('implements'))
    mode = associated_cocycle(data.cocycle, 'mode')
    report.check('mode_cocycle', mode.residual, settings.tolerance('gerbe'))
    report.add('nerve', nerve.to_dict())
    report.add('two_cocycle', data.two_cocycle.to_dict())
    _trivialize_and_untwist(report, data.two_cocycle, data, {'trivialize': True, **dict(flags)})
    return report


HANDLERS: Dict[str, Handler] = {
    'car-check': car_check,
    'implement': implement,
    'cocycle-lie': cocycle_lie,
    'lagrangian-equiv': lagrangian_equiv,
    'gerbe': gerbe,
    'dirac': dirac,
    'fockbundle': fockbundle,
}


def run_job(command: str, payload: Mapping[str, Any], seed: int, flags: Optional[Mapping[str, Any]] = None) -> Report:
    """Run one job with a generator seeded from the payload or ``seed``."""
    if command not in HANDLERS:
        raise ParameterError(f"unknown command {command!r}")
    if not isinstance(payload, Mapping):
        raise ParameterError(f"a job is a JSON object, got {type(payload).__name__}")
    check_format(payload)
    job_seed = int(payload.get('seed', seed))
    logger.info(f"Running {command} with seed {job_seed}")
    report = HANDLERS[command](payload, np.random.default_rng(job_seed), flags or {})
    report.seed = job_seed
    return report
