"""
JSON codecs for the objects exchanged by the command line.

Complex numbers are written as [re, im] pairs and matrices as nested
row-major lists of such pairs. Decoders raise ParameterError on malformed
input so the CLI can report it as an input error.
"""
import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, TextIO, Union

import numpy as np

from .clifford import COMPRESSED, EXACT, CliffordWord, OrthogonalMap, SkewSymmetricMap
from .errors import ParameterError
from .fock import FockSpace, FockVector
from .gerbe import CircleCochain, Nerve
from .implementer import Implementer
from .lagrangian import Lagrangian, Subspace, orthonormalize
from .loopgroup import TrigPolyMatrix
from .modespace import ModeSpace, ModeVector, build_mode_space

logger = logging.getLogger(__name__)


def encode_complex(z: complex) -> List[float]:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def decode_complex(value: Any) -> complex:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2:
        try:
            return complex(float(value[0]), float(value[1]))
        except (TypeError, ValueError) as e:
            raise ParameterError(f"malformed complex number {value!r}") from e
    raise ParameterError(f"expected [re, im], got {value!r}")


def encode_array(array: np.ndarray) -> list:
    """Nested lists of [re, im] pairs, row-major."""
    array = np.asarray(array)
    if array.ndim == 0:
        return encode_complex(array.item())
    return [encode_array(row) for row in array]


def decode_array(value: Any, ndim: int) -> np.ndarray:
    """Inverse of ``encode_array`` for an array of ``ndim`` dimensions."""
    def walk(node, depth):
        if depth == 0:
            return decode_complex(node)
        if not isinstance(node, list):
            raise ParameterError(f"expected a nested list of depth {ndim}")
        return [walk(item, depth - 1) for item in node]

    try:
        array = np.array(walk(value, ndim), dtype=complex)
    except ValueError as e:
        raise ParameterError(f"ragged array: {e}") from e
    if array.ndim != ndim:
        if ndim == 2 and array.size == 0:
            return array.reshape(0, 0)
        raise ParameterError(f"expected an array of dimension {ndim}, got {array.ndim}")
    return array


def decode_real_matrix(value: Any) -> np.ndarray:
    """Real matrices may be written with plain numbers or [re, im] pairs."""
    try:
        array = np.array(value, dtype=float)
        if array.ndim == 2:
            return array
    except (TypeError, ValueError):
        pass
    array = decode_array(value, 2)
    if np.abs(array.imag).max(initial=0.0) > 1e-12:
        raise ParameterError("expected a real matrix")
    return array.real


def _require(data: Mapping, *keys: str) -> None:
    if not isinstance(data, Mapping):
        raise ParameterError(f"expected a JSON object, got {type(data).__name__}")
    missing = [k for k in keys if k not in data]
    if missing:
        raise ParameterError(f"missing field(s) {', '.join(missing)}")


def space_to_dict(space: ModeSpace) -> Dict[str, Any]:
    return {'parity': space.parity.value, 'd': space.d, 'N': space.N}


def space_from_dict(data: Mapping) -> ModeSpace:
    _require(data, 'parity', 'd', 'N')
    return build_mode_space(data['parity'], int(data['d']), int(data['N']))


def vector_to_dict(v: ModeVector) -> Dict[str, Any]:
    payload = space_to_dict(v.space)
    payload['coeffs'] = [encode_complex(c) for c in v.coeffs]
    return payload


def vector_from_dict(data: Mapping, space: Optional[ModeSpace] = None) -> ModeVector:
    _require(data, 'coeffs')
    space = space or space_from_dict(data)
    return ModeVector(space, np.array([decode_complex(c) for c in data['coeffs']], dtype=complex))


def lagrangian_to_dict(subspace: Subspace) -> Dict[str, Any]:
    return {'space': space_to_dict(subspace.space), 'frame': encode_array(subspace.frame)}


def lagrangian_from_dict(data: Mapping) -> Lagrangian:
    _require(data, 'space', 'frame')
    space = space_from_dict(data['space'])
    return Lagrangian(space, orthonormalize(decode_array(data['frame'], 2)))


def orthogonal_to_dict(g: OrthogonalMap) -> Dict[str, Any]:
    return {'space': space_to_dict(g.space), 'matrix': encode_array(g.matrix), 'regime': g.regime}


def orthogonal_from_dict(data: Mapping, space: Optional[ModeSpace] = None) -> OrthogonalMap:
    _require(data, 'matrix')
    space = space or space_from_dict(data['space'])
    regime = data.get('regime', EXACT)
    if regime not in (EXACT, COMPRESSED):
        raise ParameterError(f"unknown regime {regime!r}")
    return OrthogonalMap(space, decode_array(data['matrix'], 2), regime)


def skew_from_dict(data: Mapping, space: Optional[ModeSpace] = None) -> SkewSymmetricMap:
    _require(data, 'matrix')
    space = space or space_from_dict(data['space'])
    return SkewSymmetricMap(space, decode_array(data['matrix'], 2))


def word_to_list(word: CliffordWord) -> List[Dict[str, Any]]:
    return [
        {'scalar': encode_complex(scalar), 'letters': [vector_to_dict(v) for v in letters]}
        for scalar, letters in word.terms
    ]


def word_from_list(data: Any, space: ModeSpace) -> CliffordWord:
    if not isinstance(data, list):
        raise ParameterError("a Clifford word is a list of terms")
    terms = []
    for term in data:
        _require(term, 'scalar', 'letters')
        letters = tuple(vector_from_dict(v, space) for v in term['letters'])
        terms.append((decode_complex(term['scalar']), letters))
    return CliffordWord(space, tuple(terms))


def fock_vector_to_dict(x: FockVector) -> Dict[str, Any]:
    return {'m': x.fock.m, 'coeffs': [encode_complex(c) for c in x.coeffs]}


def fock_vector_from_dict(data: Mapping, fock: FockSpace) -> FockVector:
    _require(data, 'coeffs')
    if int(data.get('m', fock.m)) != fock.m:
        raise ParameterError(f"vector over Λ of rank {data['m']} does not fit {fock}")
    return FockVector(fock, np.array([decode_complex(c) for c in data['coeffs']], dtype=complex))


def implementer_to_dict(U: Implementer) -> Dict[str, Any]:
    return {
        'g': encode_array(U.implements.matrix),
        'U': encode_array(U.matrix),
        'residual': float(U.residual),
        'phase_rule': U.phase_rule,
    }


def implementer_from_dict(data: Mapping, fock: FockSpace) -> Implementer:
    _require(data, 'g', 'U')
    g = OrthogonalMap(fock.space, decode_array(data['g'], 2))
    return Implementer(fock, decode_array(data['U'], 2), g, str(data.get('phase_rule', 'product')))


def loop_to_dict(f: TrigPolyMatrix) -> Dict[str, Any]:
    return {
        'd': f.d,
        'coeffs': {str(k): c.tolist() for k, c in sorted(f.coeffs.items())},
        'flavor': f.flavor,
    }


def loop_from_dict(data: Mapping, flavor: Optional[str] = None) -> TrigPolyMatrix:
    _require(data, 'd')
    coeffs = data.get('coeffs', {})
    if not isinstance(coeffs, Mapping):
        raise ParameterError("loop coefficients must be an object keyed by frequency")
    try:
        parsed = {int(k): decode_real_matrix(c) for k, c in coeffs.items()}
    except ValueError as e:
        raise ParameterError(f"malformed loop frequency: {e}") from e
    return TrigPolyMatrix(int(data['d']), parsed, flavor or data.get('flavor', 'algebra'))


def nerve_from_dict(data: Mapping) -> Nerve:
    _require(data, 'charts')
    return Nerve.from_dict(data)


def cochain_from_dict(data: Mapping, nerve: Nerve) -> CircleCochain:
    _require(data, 'degree', 'values')
    values = {}
    for key, theta in data['values'].items():
        try:
            simplex = tuple(int(i) for i in str(key).split(','))
        except ValueError as e:
            raise ParameterError(f"malformed overlap key {key!r}") from e
        values[simplex] = float(theta)
    return CircleCochain(nerve, int(data['degree']), values)


def _default(obj: Any) -> Any:
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return encode_complex(obj)
    if isinstance(obj, np.ndarray):
        return encode_array(obj) if np.iscomplexobj(obj) else obj.tolist()
    if hasattr(obj, 'to_dict'):
        return obj.to_dict()
    raise TypeError(f"{type(obj).__name__} is not JSON serializable")


def dumps(payload: Any) -> str:
    """Deterministic JSON text: sorted keys, fixed separators."""
    return json.dumps(payload, default=_default, sort_keys=True, indent=2, ensure_ascii=False)


def dump(payload: Any, target: Union[str, Path, TextIO]) -> None:
    text = dumps(payload) + '\n'
    if isinstance(target, (str, Path)):
        with open(target, 'w', encoding='utf-8') as handle:
            handle.write(text)
    else:
        target.write(text)


def loads(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ParameterError(f"malformed JSON: {e.msg} at line {e.lineno} column {e.colno}") from e


def load(source: Union[str, Path, TextIO]) -> Any:
    if isinstance(source, (str, Path)):
        try:
            with open(source, 'r', encoding='utf-8') as handle:
                return loads(handle.read())
        except OSError as e:
            raise ParameterError(f"cannot read {source}: {e.strerror}") from e
    return loads(source.read())
