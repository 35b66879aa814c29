"""
fockbundle - finite-mode fermionic Fock spaces over loop groups.

Mode spaces and Lagrangian subspaces, the Clifford algebra and its Fock
representation, implementers of restricted orthogonal maps, the loop-algebra
cocycle, lifting gerbes with their trivializations, and Dirac eigenbases of
loop connections.
"""

from struttura.version import __version__

from .errors import (
    FockBundleError,
    FockDimensionError,
    InvariantViolationError,
    MembershipError,
    NumericalDegeneracyError,
    ParameterError,
    PreconditionError,
    ResolutionError,
    SpaceMismatchError,
)
from .modespace import ModeSpace, ModeVector, Parity, build_mode_space
from .lagrangian import Lagrangian, Sublagrangian, standard_lagrangian
from .clifford import CliffordWord, OrthogonalMap, SkewSymmetricMap
from .fock import FockSpace, FockVector, vacuum
from .implementer import Implementer, cocycle, implement_general
from .loopgroup import TrigPolyMatrix, lie_cocycle_check
from .gerbe import CircleCochain, GroupCocycle, Nerve, lifting_cocycle, trivialize
from .dirac import LoopConnection, dirac_eigenbasis, holonomy_spectrum, parallel_transport

__all__ = [
    '__version__',
    'FockBundleError',
    'FockDimensionError',
    'InvariantViolationError',
    'MembershipError',
    'NumericalDegeneracyError',
    'ParameterError',
    'PreconditionError',
    'ResolutionError',
    'SpaceMismatchError',
    'ModeSpace',
    'ModeVector',
    'Parity',
    'build_mode_space',
    'Lagrangian',
    'Sublagrangian',
    'standard_lagrangian',
    'CliffordWord',
    'OrthogonalMap',
    'SkewSymmetricMap',
    'FockSpace',
    'FockVector',
    'vacuum',
    'Implementer',
    'cocycle',
    'implement_general',
    'TrigPolyMatrix',
    'lie_cocycle_check',
    'CircleCochain',
    'GroupCocycle',
    'Nerve',
    'lifting_cocycle',
    'trivialize',
    'LoopConnection',
    'dirac_eigenbasis',
    'holonomy_spectrum',
    'parallel_transport',
]
