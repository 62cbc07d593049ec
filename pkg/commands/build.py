"""
build-partition command
"""

import logging

import click

from commands.options import (EXIT_FAILED, abort, input_options, load_input, param_options,
                              resolve_params, write_lines, write_stats)
from errors import InvariantBreach
from runlog import log_run
from sparsify import build_partition

logger = logging.getLogger(__name__)


@click.command('build-partition')
@input_options
@param_options
@click.option('--out', 'out_path', type=click.Path(dir_okay=False), help='Positions file (default: stdout)')
@click.option('--stats', 'stats_path', type=click.Path(dir_okay=False), help='Stats JSON file')
@click.option('--replay/--no-replay', default=None,
              help='Recover S* by rerunning the pipeline (default: reference mode only)')
@click.pass_context
def build_partition_cmd(ctx, input_path, fmt, tau, b, mode, lambda3, lambda4, shrink_slack,
                        out_path, stats_path, replay):
    """Build the partitioning set S* and write its positions."""
    text = load_input(input_path, fmt)
    params = resolve_params(text, tau, b, mode, lambda3, lambda4, shrink_slack)

    try:
        result = build_partition(text, params, replay=replay)
    except InvariantBreach as e:
        abort(ctx, 'build-partition', EXIT_FAILED, f"{type(e).__name__}: {e}", params.as_dict())
        return

    write_lines(out_path, result.sstar.lines())
    write_stats(stats_path, result.stats)
    sizes = result.stats['sizes']
    log_run('build-partition', 'ok', params.as_dict(), result.stats,
            f"{input_path}: |S*|={sizes['s_star']} of n={text.n}")
    logger.info("wrote %d positions", sizes['s_star'])
