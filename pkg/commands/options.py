"""
Shared options and helpers for the command modules
"""

import json
import logging

import click

import config
from errors import ParameterError, TauSetError
from runlog import log_run
from text_model import FORMATS, MODES, load_text, params_for_text, params_from_b

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


def input_options(f):
    """--input and --format."""
    f = click.option('--format', 'fmt', type=click.Choice(FORMATS), default='bytes',
                     show_default=True, help='Input encoding')(f)
    f = click.option('--input', 'input_path', type=click.Path(dir_okay=False), required=True,
                     help='Text file')(f)
    return f


def param_options(f):
    """--tau | --b, --mode and the desk-mode overrides."""
    for decorator in reversed([
        click.option('--tau', type=int, help='Partitioning parameter (4 <= tau <= n/2)'),
        click.option('--b', type=int, help='Target size; tau = n // b'),
        click.option('--mode', type=click.Choice(MODES), default=config.DEFAULT_MODE,
                     show_default=True),
        click.option('--lambda3', type=int, help='Desk mode: vbit range stand-in'),
        click.option('--lambda4', type=int, help='Desk mode: top recompression exponent'),
        click.option('--shrink-slack', type=int,
                     help='Desk mode: recompression threshold exponent offset'),
    ]):
        f = decorator(f)
    return f


def load_input(input_path, fmt):
    try:
        with open(input_path, 'rb') as handle:
            raw = handle.read()
    except OSError as e:
        raise click.UsageError(f"cannot read {input_path}: {e.strerror}")
    try:
        return load_text(raw, fmt)
    except TauSetError as e:
        raise click.UsageError(str(e))


def resolve_params(text, tau, b, mode, lambda3=None, lambda4=None, shrink_slack=None):
    """ParamEnv from the flags; exactly one of tau and b must be given."""
    if (tau is None) == (b is None):
        raise click.UsageError("give exactly one of --tau and --b")
    overrides = {}
    if lambda3 is not None:
        overrides['lambda3'] = lambda3
    if lambda4 is not None:
        overrides['lambda4'] = lambda4
    if shrink_slack is not None:
        overrides['shrink_slack'] = shrink_slack
    try:
        if tau is None:
            return params_from_b(text.n, b, mode, symbol_bits=text.w, **overrides)
        return params_for_text(text, tau, mode, **overrides)
    except ParameterError as e:
        raise click.UsageError(str(e))


def write_lines(out_path, lines):
    body = ''.join(f"{line}\n" for line in lines)
    if out_path:
        with open(out_path, 'w') as handle:
            handle.write(body)
    else:
        click.echo(body, nl=False)


def write_stats(stats_path, stats):
    if stats_path:
        with open(stats_path, 'w') as handle:
            json.dump(stats, handle, indent=2)
            handle.write('\n')


def abort(ctx, command, code, message, params=None):
    """Log the run, report the message on stderr and exit with code."""
    status = 'failed' if code == EXIT_FAILED else 'error'
    log_run(command, status, params, details=message)
    click.echo(f"Error: {message}", err=True)
    ctx.exit(code)
