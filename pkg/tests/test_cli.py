"""
End-to-end tests of the command line: JSON in, JSON out, exit codes
0 (pass), 2 (failed check) and 1 (input error).
"""
import json
import logging
import sys

import numpy as np
import pytest
import yaml
from click.testing import CliRunner

from fockbundle import serialization as codec
from fockbundle.cli import cli, execute, parse_tolerances, read_payload, run
from fockbundle.errors import ParameterError
from fockbundle.gerbe import CircleCochain, Nerve
from fockbundle.loopgroup import ROTATION_GENERATOR, wave
from struttura.version import __version__


def invoke(capsys, *argv):
    """Run the CLI and return (exit code, decoded stdout)."""
    code = run(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out) if out.strip() else None


def check_names(doc):
    return {c['name']: c['pass'] for c in doc['checks']}


@pytest.mark.unit
class TestOptions:

    def test_parse_tolerances(self):
        assert parse_tolerances(['car=1e-3', ' gerbe = 2e-7']) == {'car': 1e-3, 'gerbe': 2e-7}

    @pytest.mark.parametrize("item", ['car', 'car=abc', 'car=0', 'car=-1', 'speed=1', '=1'])
    def test_parse_tolerances_rejects(self, item):
        with pytest.raises(ParameterError):
            parse_tolerances([item])

    def test_read_payload(self, tmp_path):
        assert read_payload(None) == {}
        assert read_payload('{"N": 3}') == {'N': 3}
        assert read_payload(' [1, 2]') == [1, 2]
        path = tmp_path / "job.json"
        path.write_text('{"identity": true}', encoding='utf-8')
        assert read_payload(str(path)) == {'identity': True}

    def test_version(self, capsys):
        assert run(['--version']) == 0
        assert __version__ in capsys.readouterr().out

    def test_unknown_subcommand(self, capsys):
        assert run(['teleport']) != 0


@pytest.mark.integration
class TestCommands:

    def test_implement_identity(self, capsys):
        code, doc = invoke(capsys, 'implement', '--in', '{"identity": true}')
        assert code == 0
        assert doc['command'] == 'implement'
        assert doc['pass'] is True
        assert check_names(doc) == {'implements': True, 'unitarity': True}
        assert doc['data']['implementer']['residual'] == pytest.approx(0.0, abs=1e-12)

    def test_implement_random_map_is_seeded(self, capsys):
        _, first = invoke(capsys, 'implement', '--seed', '5')
        _, second = invoke(capsys, 'implement', '--seed', '5')
        assert first['seed'] == 5
        assert first['data']['implementer']['U'] == second['data']['implementer']['U']

    def test_car_check_with_tolerance_override(self, capsys):
        code, doc = invoke(capsys, 'car-check', '--tol', 'car=1e-3', '--in', '{"samples": 2}')
        assert code == 0
        assert doc['tolerances']['car'] == 1e-3
        assert all(c['pass'] for c in doc['checks'])

    def test_cocycle_lie_with_constant_second_loop(self, capsys):
        payload = {
            'f1': codec.loop_to_dict(wave(ROTATION_GENERATOR, 1)),
            'f2': codec.loop_to_dict(wave(ROTATION_GENERATOR, 0)),
            'N': 3,
        }
        code, doc = invoke(capsys, 'cocycle-lie', '--in', codec.dumps(payload))
        assert code == 0
        row = doc['data']['table'][0]
        assert row['N'] == 3
        assert row['residual'] == pytest.approx(0.0, abs=1e-12)

    def test_cocycle_lie_random_pairs(self, capsys):
        code, doc = invoke(capsys, 'cocycle-lie', '--in', '{"d": 2, "bandwidth": 1, "count": 2}')
        assert code == 0
        assert len(doc['data']['table']) == 2

    def test_lagrangian_equiv_verdicts(self, capsys):
        code, doc = invoke(capsys, 'lagrangian-equiv', '--in', '{"pair": "alpha", "expect": "divergent"}')
        assert code == 0
        assert doc['data']['diagnostic']['verdict'] == 'divergent'
        code, _ = invoke(capsys, 'lagrangian-equiv', '--in', '{"pair": "alpha", "expect": "bounded"}')
        assert code == 2

    def test_obstructed_gerbe_fails_trivialization(self, capsys):
        code, doc = invoke(capsys, 'gerbe', '--trivialize', '--in', '{"example": "obstructed"}')
        assert code == 2
        assert check_names(doc) == {'trivializable': False}
        assert doc['data']['trivialization']['trivializable'] is False

    def test_given_coboundary_on_the_tetrahedron_boundary(self, capsys):
        nerve = Nerve.simplex_boundary(4)
        c = CircleCochain.random(nerve, 1, np.random.default_rng(7)).delta()
        payload = json.dumps({'nerve': nerve.to_dict(), 'cochain': c.to_dict()})
        code, doc = invoke(capsys, 'gerbe', '--trivialize', '--in', payload)
        assert code == 0, doc
        assert check_names(doc) == {'trivializable': True}

    def test_gerbe_without_flags_only_reports(self, capsys):
        code, doc = invoke(capsys, 'gerbe', '--in', '{"example": "obstructed"}')
        assert code == 0
        assert doc['data']['two_cocycle']['degree'] == 2

    def test_gerbe_untwist(self, capsys):
        code, doc = invoke(capsys, 'gerbe', '--untwist', '--in', '{"charts": 3, "space": {"parity": "odd", "d": 1, "N": 2}}')
        assert code == 0, doc
        names = check_names(doc)
        assert names['trivializable'] and names['untwisted_cocycle'] and names['retwist_roundtrip']

    def test_dirac_rotation(self, capsys):
        code, doc = invoke(capsys, 'dirac', '--in', '{"theta": 0.125, "N": 2, "cutoffs": [1, 2, 3]}')
        assert code == 0, doc
        assert doc['data']['spectrum']['lambdas']['0,2'] == pytest.approx(0.625)
        assert doc['data']['equivalence']['verdict'] == 'bounded'

    def test_dirac_coarse_grid_is_an_input_error(self, capsys):
        code, doc = invoke(capsys, 'dirac', '--in', '{"theta": 0.1, "steps": 8}')
        assert code == 1
        assert doc['error']['type'] == 'ParameterError'

    @pytest.mark.slow
    def test_fockbundle_end_to_end(self, capsys):
        code, doc = invoke(capsys, 'fockbundle', '--untwist', '--in', '{"charts": 3}')
        assert code == 0, doc
        assert 'untwisted_projection' in check_names(doc)


@pytest.mark.integration
class TestErrorsAndBatches:

    def test_malformed_json(self, capsys):
        code, doc = invoke(capsys, 'implement', '--in', '{not json')
        assert code == 1
        assert doc['error']['type'] == 'ParameterError'
        assert 'malformed JSON' in doc['error']['message']

    def test_invalid_parameters(self, capsys):
        code, doc = invoke(capsys, 'implement', '--in', '{"space": {"parity": "odd", "d": 0, "N": 1}}')
        assert code == 1
        assert 'error' in doc

    def test_unknown_tolerance(self, capsys):
        code, doc = invoke(capsys, 'car-check', '--tol', 'speed=1')
        assert code == 1
        assert 'known' in doc['error']['details']

    def test_newer_format_is_refused(self, capsys):
        code, doc = invoke(capsys, 'implement', '--in', '{"format": "99.0.0"}')
        assert code == 1
        assert 'newer release' in doc['error']['message']
        assert doc['error']['details']['installed']['full_version'] == __version__

    def test_malformed_format(self, capsys):
        code, doc = invoke(capsys, 'implement', '--in', '{"format": "latest"}')
        assert code == 1
        assert doc['error']['type'] == 'ParameterError'

    def test_batch(self, capsys):
        code, doc = invoke(capsys, 'implement', '--jobs', '2', '--in',
                           '[{"identity": true}, {"identity": true, "seed": 9}]')
        assert code == 0
        assert doc['pass'] is True
        assert [job['seed'] for job in doc['jobs']] == [0, 9]

    def test_batch_exit_code_prefers_input_errors(self):
        doc, code = execute('gerbe', [{'example': 'obstructed'}, {'cochain': 'oops'}], flags={'trivialize': True})
        assert code == 1
        assert doc['pass'] is False
        assert 'error' in doc['jobs'][1]

    def test_batch_of_failed_checks(self):
        doc, code = execute('gerbe', [{'example': 'obstructed'}], flags={'trivialize': True})
        assert code == 2

    def test_unknown_command_and_non_object_job(self):
        assert execute('teleport', {})[1] == 1
        assert execute('implement', 5)[1] == 1

    def test_out_file(self, capsys, tmp_path):
        target = tmp_path / "report.json"
        code = run(['implement', '--in', '{"identity": true}', '--out', str(target)])
        assert code == 0
        assert capsys.readouterr().out == ''
        assert json.loads(target.read_text(encoding='utf-8'))['pass'] is True

    def test_config_file(self, capsys, tmp_path):
        path = tmp_path / "lab.yaml"
        path.write_text(yaml.safe_dump({'tolerances': {'implements': 1e-3}}), encoding='utf-8')
        code, doc = invoke(capsys, 'implement', '--config', str(path), '--in', '{"identity": true}')
        assert code == 0
        assert doc['tolerances']['implements'] == 1e-3
        # the configuration does not outlive the command
        _, again = invoke(capsys, 'implement', '--in', '{"identity": true}')
        assert again['tolerances']['implements'] == 1e-8

    def test_stdin(self):
        result = CliRunner().invoke(cli, ['implement', '--in', '-'], input='{"identity": true}')
        assert result.exit_code == 0
        assert '"command": "implement"' in result.stdout


@pytest.fixture
def restore_logging(monkeypatch):
    monkeypatch.setattr(sys, 'excepthook', sys.excepthook)
    yield
    log = logging.getLogger('fockbundle')
    for handler in log.handlers[:]:
        log.removeHandler(handler)
        handler.close()
    log.propagate = True


def test_main_entry_point(capsys, tmp_path, monkeypatch, restore_logging):
    import main
    monkeypatch.setattr(main.Config, 'LOG_DIR', str(tmp_path))
    assert main.main(['cocycle-lie', '--in', '{"count": 1, "bandwidth": 1}']) == 0
    assert json.loads(capsys.readouterr().out)['pass'] is True
    assert list(tmp_path.glob('fockbundle_*.log'))
