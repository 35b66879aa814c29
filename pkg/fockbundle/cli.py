"""
Command line front end.

Every subcommand reads one JSON job (or a JSON array of jobs) and writes one
JSON document. Exit codes: 0 when every check passes, 2 when a check or
verdict fails, 1 on input errors.
"""
import contextvars
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Dict, List, Optional, Sequence, Tuple

import click

from config import Config
from struttura.config import ConfigManager
from struttura.version import __version__

from . import serialization as codec
from . import settings
from .errors import FockBundleError, ParameterError
from .jobs import run_job
from .reports import error_document

logger = logging.getLogger(__name__)

INPUT_ERRORS = (FockBundleError, ValueError, KeyError, TypeError)


def parse_tolerances(values: Sequence[str]) -> Dict[str, float]:
    """KEY=VAL pairs for known tolerance names."""
    overrides = {}
    for item in values:
        key, sep, raw = item.partition('=')
        key = key.strip()
        if not sep or not key:
            raise ParameterError(f"tolerance override {item!r} is not KEY=VAL")
        if key not in Config.TOLERANCES:
            raise ParameterError(f"unknown tolerance {key!r}", {'known': sorted(Config.TOLERANCES)})
        try:
            value = float(raw)
        except ValueError as e:
            raise ParameterError(f"tolerance {key} must be a number, got {raw!r}") from e
        if value <= 0:
            raise ParameterError(f"tolerance {key} must be positive, got {value}")
        overrides[key] = value
    return overrides


def read_payload(source: Optional[str]) -> Any:
    """Inline JSON, '-' for stdin, a file path, or an empty job."""
    if source is None:
        return {}
    text = source.strip()
    if text == '-':
        return codec.loads(click.get_text_stream('stdin').read())
    if text.startswith('{') or text.startswith('['):
        return codec.loads(text)
    return codec.load(source)


def _run_one(command: str, payload: Any, seed: int, flags: Dict[str, Any]) -> Tuple[Dict[str, Any], int]:
    try:
        report = run_job(command, payload, seed, flags)
    except INPUT_ERRORS as e:
        logger.error(f"{command} failed: {e}", exc_info=not isinstance(e, FockBundleError))
        return error_document(e), 1
    return report.to_dict(), report.exit_code


def execute(command: str, payload: Any, seed: int = 0, jobs: int = 1,
            flags: Optional[Dict[str, Any]] = None) -> Tuple[Dict[str, Any], int]:
    """Run a job or a batch of jobs; returns the document and the exit code."""
    flags = flags or {}
    if not isinstance(payload, list):
        return _run_one(command, payload, seed, flags)

    with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
        futures = [pool.submit(contextvars.copy_context().run, _run_one, command, item, seed, flags)
                   for item in payload]
        results: List[Tuple[Dict[str, Any], int]] = [f.result() for f in futures]
    codes = [code for _, code in results]
    document = {'command': command, 'jobs': [doc for doc, _ in results], 'pass': all(c == 0 for c in codes)}
    exit_code = 1 if 1 in codes else max(codes, default=0)
    return document, exit_code


JOB_OPTIONS = (
    click.option('--in', 'source', default=None, metavar='PATH|JSON|-',
                 help='Job file, inline JSON, or - for stdin.'),
    click.option('--out', 'out', type=click.Path(dir_okay=False, writable=True), default=None,
                 help='Write the report here instead of stdout.'),
    click.option('--seed', type=int, default=0, show_default=True, help='Seed of the random generator.'),
    click.option('--tol', 'tolerances', multiple=True, metavar='KEY=VAL', help='Override a tolerance.'),
    click.option('--jobs', type=click.IntRange(min=1), default=1, show_default=True,
                 help='Worker threads for a batch of jobs.'),
    click.option('--config', 'config_file', type=click.Path(exists=True, dir_okay=False), default=None,
                 help='JSON or YAML configuration file.'),
)


def job_options(func):
    """Options shared by every subcommand."""
    for option in reversed(JOB_OPTIONS):
        func = option(func)
    return func


def _finish(command: str, source: Optional[str], out: Optional[str], seed: int, tolerances: Sequence[str],
            jobs: int, config_file: Optional[str], flags: Dict[str, Any]) -> None:
    previous = settings.manager()
    try:
        if config_file:
            settings.install(ConfigManager(config_file=config_file))
        overrides = parse_tolerances(tolerances)
        payload = read_payload(source)
        with settings.override_tolerances(overrides):
            document, code = execute(command, payload, seed, jobs, flags)
    except INPUT_ERRORS as e:
        logger.error(f"{command}: {e}")
        document, code = error_document(e), 1
    finally:
        settings.install(previous)

    if out:
        codec.dump(document, out)
    else:
        click.echo(codec.dumps(document))
    raise click.exceptions.Exit(code)


@click.group(context_settings={'help_option_names': ['-h', '--help']})
@click.version_option(__version__, prog_name='fockbundle')
def cli():
    """Finite-mode Fock spaces, implementers, loop cocycles, gerbes and Dirac operators."""


@cli.command('car-check')
@job_options
def car_check(**options):
    """Check the CAR relations of the Fock representation."""
    _finish('car-check', flags={}, **options)


@cli.command('implement')
@job_options
def implement(**options):
    """Build and verify the implementer of an orthogonal map."""
    _finish('implement', flags={}, **options)


@cli.command('cocycle-lie')
@job_options
def cocycle_lie(**options):
    """Compare both sides of the loop-algebra cocycle identity."""
    _finish('cocycle-lie', flags={}, **options)


@cli.command('lagrangian-equiv')
@job_options
def lagrangian_equiv(**options):
    """Report the equivalence diagnostic of two Lagrangian families."""
    _finish('lagrangian-equiv', flags={}, **options)


@cli.command('gerbe')
@job_options
@click.option('--trivialize', is_flag=True, help='Look for a trivialization of the 2-cocycle.')
@click.option('--untwist', is_flag=True, help='Untwist the Fock transitions with the trivialization.')
def gerbe(trivialize, untwist, **options):
    """Lifting 2-cocycle of a group cocycle over a nerve."""
    _finish('gerbe', flags={'trivialize': trivialize, 'untwist': untwist}, **options)


@cli.command('dirac')
@job_options
def dirac(**options):
    """Transport, holonomy spectrum and Dirac eigensystem of a loop connection."""
    _finish('dirac', flags={}, **options)


@cli.command('fockbundle')
@job_options
@click.option('--untwist', is_flag=True, help='Untwist the twisted Fock data when possible.')
def fockbundle(untwist, **options):
    """End-to-end twisted Fock bundle over a nerve."""
    _finish('fockbundle', flags={'untwist': untwist}, **options)


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Invoke the CLI without click's own exit handling; usage errors give exit code 1."""
    try:
        result = cli.main(args=list(argv) if argv is not None else None, prog_name='fockbundle',
                          standalone_mode=False)
    except click.exceptions.Exit as e:
        return e.exit_code
    except click.ClickException as e:
        click.echo(codec.dumps(error_document(e)))
        return 1
    except click.exceptions.Abort:
        return 1
    return result if isinstance(result, int) else 0
