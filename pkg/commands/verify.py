"""
verify command
"""

import logging
from collections import Counter

import click

import config
from commands.options import EXIT_FAILED, load_input
from corpus import Instance, default_corpus
from runlog import log_run
from suites import LEVELS, run_level

logger = logging.getLogger(__name__)


@click.command('verify')
@click.option('--level', type=click.Choice(LEVELS + ('all',)), required=True, help='Check group to run')
@click.option('--input', 'input_path', type=click.Path(dir_okay=False),
              help='Verify one text instead of the default corpus')
@click.option('--format', 'fmt', type=click.Choice(('bytes', 'u32le')), default='bytes')
@click.option('--tau', type=int, help='tau for --input')
@click.option('--seed', type=int, default=config.DEFAULT_SEED, show_default=True)
@click.option('--n', 'lengths', type=int, multiple=True, help='Corpus text lengths (repeatable)')
@click.option('--lambda3', type=int)
@click.option('--lambda4', type=int)
@click.option('--shrink-slack', type=int)
@click.option('--queries', type=int, default=2000, show_default=True, help='LCE queries per instance')
@click.option('--suffixes', type=int, default=32, show_default=True, help='Chosen suffixes per instance')
@click.pass_context
def verify_cmd(ctx, level, input_path, fmt, tau, seed, lengths, lambda3, lambda4, shrink_slack,
               queries, suffixes):
    """Run a group of property checks; exit 0 iff all hold."""
    if input_path:
        if tau is None:
            raise click.UsageError("--input needs --tau")
        text = load_input(input_path, fmt)
        if not 4 <= tau <= text.n // 2:
            raise click.UsageError(f"tau={tau} outside [4..{text.n // 2}]")
        instances = [Instance(input_path, text, tau)]
    else:
        instances = default_corpus(seed, lengths or config.DEFAULT_CORPUS_LENGTHS)

    options = {
        'lambda3': lambda3,
        'lambda4': lambda4,
        'shrink_slack': shrink_slack,
        'queries': queries,
        'suffixes': suffixes,
        'seed': seed,
    }
    levels = LEVELS if level == 'all' else (level,)
    checked = Counter()
    failed = Counter()
    notes = {name: Counter() for name in levels}
    for name in levels:
        for instance_name, report in run_level(name, instances, **options):
            checked[name] += 1
            notes[name].update(report.notes)
            if not report.holds:
                failed[name] += 1
                for line in report.lines():
                    click.echo(f"{name} {instance_name} {line}")

    for name in levels:
        extra = ''.join(f" {key}={value}" for key, value in sorted(notes[name].items()))
        click.echo(f"level={name} instances={len(instances)} checks={checked[name]} failed={failed[name]}{extra}")

    total_failed = sum(failed.values())
    summary = {'levels': list(levels), 'checked': dict(checked), 'failed': dict(failed),
               'notes': {name: dict(counts) for name, counts in notes.items()}}
    log_run('verify', 'ok' if total_failed == 0 else 'failed', options, summary,
            f"{len(instances)} instances, {total_failed} failing checks")
    if total_failed:
        ctx.exit(EXIT_FAILED)
