"""
sst command
"""

import logging

import click

from commands.options import (EXIT_FAILED, EXIT_USAGE, abort, input_options, load_input,
                              param_options, resolve_params, write_lines)
from errors import InvariantBreach, PipelineOrderError
from runlog import log_run
from sparsify import build_partition
from sst_user import build_user_sst

logger = logging.getLogger(__name__)


def read_positions(handle):
    """Newline-delimited decimal positions; blank lines are skipped."""
    positions = []
    for number, line in enumerate(handle, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            positions.append(int(line))
        except ValueError:
            raise ValueError(f"line {number}: {line!r} is not a position") from None
    return positions


@click.command('sst')
@input_options
@param_options
@click.option('--suffixes', type=click.File('r'), required=True,
              help='Suffix start positions, one per line')
@click.option('--out', 'out_path', type=click.Path(dir_okay=False), help='Tree file (default: stdout)')
@click.pass_context
def sst_cmd(ctx, input_path, fmt, tau, b, mode, lambda3, lambda4, shrink_slack, suffixes, out_path):
    """Build the sparse suffix tree of chosen suffixes."""
    text = load_input(input_path, fmt)
    params = resolve_params(text, tau, b, mode, lambda3, lambda4, shrink_slack)

    try:
        chosen = read_positions(suffixes)
    except ValueError as e:
        abort(ctx, 'sst', EXIT_USAGE, str(e), params.as_dict())
        return

    try:
        sstar = build_partition(text, params).sstar.positions
        tree = build_user_sst(text, chosen, sstar, params.tau)
    except (PipelineOrderError, IndexError) as e:
        abort(ctx, 'sst', EXIT_USAGE, str(e), params.as_dict())
        return
    except InvariantBreach as e:
        abort(ctx, 'sst', EXIT_FAILED, f"{type(e).__name__}: {e}", params.as_dict())
        return

    write_lines(out_path, tree.serialize())
    log_run('sst', 'ok', params.as_dict(), {'suffixes': len(chosen), 'nodes': tree.node_count},
            f"{len(chosen)} suffixes of {input_path}")
