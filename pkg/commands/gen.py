"""
gen command
"""

import click

import config
from corpus import KINDS, encode, format_for, generate
from runlog import log_run


@click.command('gen')
@click.option('--kind', type=click.Choice(KINDS), default='random', show_default=True)
@click.option('--n', type=int, required=True, help='Text length')
@click.option('--sigma', type=int, default=config.DEFAULT_SIGMA, show_default=True,
              help='Alphabet size (fibonacci always uses 2)')
@click.option('--seed', type=int, default=config.DEFAULT_SEED, show_default=True)
@click.option('--out', 'out_path', type=click.Path(dir_okay=False), help='Output file (default: stdout)')
def gen_cmd(kind, n, sigma, seed, out_path):
    """Write a deterministic corpus text."""
    if n < 1:
        raise click.UsageError("--n must be positive")
    if sigma < 1:
        raise click.UsageError("--sigma must be positive")
    if kind == 'fibonacci':
        sigma = 2
    data = encode(generate(kind, n, sigma, seed), sigma)
    fmt = format_for(sigma)
    if out_path:
        with open(out_path, 'wb') as handle:
            handle.write(data)
        click.echo(f"wrote {n} symbols to {out_path} (read with --format {fmt})", err=True)
    else:
        click.get_binary_stream('stdout').write(data)
    log_run('gen', 'ok', {'kind': kind, 'n': n, 'sigma': sigma, 'seed': seed, 'format': fmt},
            details=f"{len(data)} bytes")
