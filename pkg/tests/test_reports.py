"""
Tests for JSON report documents.
"""
import pytest

from fockbundle import settings
from fockbundle.errors import ParameterError, ResolutionError
from fockbundle.reports import Check, Report, error_document
from struttura.version import __version__


def test_check_against_tolerance():
    report = Report('car-check', seed=3)
    assert report.check('small', 1e-12, 1e-9).passed
    assert not report.check('large', 1e-3, 1e-9).passed
    assert not report.passed
    assert report.exit_code == 2


def test_explicit_verdict():
    report = Report('gerbe')
    entry = report.verdict('trivializable', True, 0.1)
    assert entry.passed and entry.tolerance is None
    assert report.exit_code == 0


def test_nan_never_passes():
    report = Report('dirac')
    entry = report.check('residual', float('nan'), 1.0)
    assert not entry.passed
    assert entry.to_dict()['value'] is None


def test_check_to_dict():
    assert Check('x', 0.5, 1.0, True).to_dict() == {'name': 'x', 'value': 0.5, 'tolerance': 1.0, 'pass': True}


def test_document_layout():
    report = Report('implement', seed=11)
    report.check('implements', 0.0, 1e-8)
    report.add('fock_dim', 16)
    with settings.override_tolerances({'implements': 1e-6}):
        doc = report.to_dict()
    assert set(doc) == {'command', 'seed', 'version', 'pass', 'checks', 'tolerances', 'data'}
    assert doc['seed'] == 11
    assert doc['version'] == __version__
    assert doc['pass'] is True
    assert doc['tolerances']['implements'] == 1e-6
    assert doc['data'] == {'fock_dim': 16}


def test_empty_report_passes():
    assert Report('car-check').passed


@pytest.mark.parametrize("exc,kind", [
    (ParameterError("bad cutoff", {'N': 0}), 'ParameterError'),
    (ResolutionError("too coarse", {'steps': 64}), 'ResolutionError'),
    (ValueError("plain"), 'ValueError'),
])
def test_error_document(exc, kind):
    doc = error_document(exc)
    assert doc['error']['type'] == kind
    assert doc['error']['message'] == str(exc)
    assert isinstance(doc['error']['details'], dict)


def test_error_details_survive():
    doc = error_document(ParameterError("bad cutoff", {'N': 0}))
    assert doc['error']['details'] == {'N': 0}
    assert doc == {'error': ParameterError("bad cutoff", {'N': 0}).to_dict()}
