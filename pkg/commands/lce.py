"""
lce command
"""

import logging

import click

from commands.options import (EXIT_FAILED, EXIT_USAGE, abort, input_options, load_input,
                              param_options, resolve_params, write_stats)
from errors import InvariantBreach
from lce_index import build_lce_index
from runlog import log_run
from sparsify import build_partition

logger = logging.getLogger(__name__)


def parse_query(line, n):
    """
    Parse one "p q" line.

    Returns:
        (p, q) or None for a blank line

    Raises:
        ValueError: malformed line or position outside [0..n)
    """
    parts = line.split()
    if not parts:
        return None
    if len(parts) != 2:
        raise ValueError(f"expected 'p q', got {line.strip()!r}")
    p, q = int(parts[0]), int(parts[1])
    if not (0 <= p < n and 0 <= q < n):
        raise ValueError(f"positions {p} {q} outside [0..{n})")
    return p, q


@click.command('lce')
@input_options
@param_options
@click.option('--queries', 'queries', type=click.File('r'), default='-',
              help='Query lines "p q" (default: stdin)')
@click.option('--out', 'out_path', type=click.Path(dir_okay=False), help='Answers file (default: stdout)')
@click.option('--stats', 'stats_path', type=click.Path(dir_okay=False), help='Stats JSON file')
@click.pass_context
def lce_cmd(ctx, input_path, fmt, tau, b, mode, lambda3, lambda4, shrink_slack,
            queries, out_path, stats_path):
    """Answer longest-common-extension queries."""
    text = load_input(input_path, fmt)
    params = resolve_params(text, tau, b, mode, lambda3, lambda4, shrink_slack)

    try:
        result = build_partition(text, params)
        index = build_lce_index(text, result.sstar.positions, params.tau)
    except InvariantBreach as e:
        abort(ctx, 'lce', EXIT_FAILED, f"{type(e).__name__}: {e}", params.as_dict())
        return

    handle = open(out_path, 'w') if out_path else None
    answered = 0
    try:
        for number, line in enumerate(queries, start=1):
            try:
                pair = parse_query(line, text.n)
            except ValueError as e:
                abort(ctx, 'lce', EXIT_USAGE, f"query line {number}: {e}", params.as_dict())
                return
            if pair is None:
                continue
            try:
                answer = index.query(*pair)
            except InvariantBreach as e:
                abort(ctx, 'lce', EXIT_FAILED, f"{type(e).__name__}: {e}", params.as_dict())
                return
            # answer before reading the next line
            if handle is None:
                click.echo(answer)
            else:
                handle.write(f"{answer}\n")
                handle.flush()
            answered += 1
    finally:
        if handle is not None:
            handle.close()

    stats = dict(result.stats)
    stats['queries'] = index.stats()
    write_stats(stats_path, stats)
    log_run('lce', 'ok', params.as_dict(), stats['queries'], f"{answered} queries on {input_path}")
