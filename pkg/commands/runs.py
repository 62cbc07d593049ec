"""
runs command
"""

import click

from runlog import get_run_stats, get_runs, set_logging_enabled


@click.command('runs')
@click.option('--command', 'command_name', help='Only runs of this command')
@click.option('--status', type=click.Choice(('ok', 'failed', 'error')))
@click.option('--limit', type=int, default=20, show_default=True)
@click.option('--stats', 'show_stats', is_flag=True, help='Print totals instead of rows')
@click.option('--pause', is_flag=True, help='Stop recording runs')
@click.option('--resume', is_flag=True, help='Record runs again')
def runs_cmd(command_name, status, limit, show_stats, pause, resume):
    """List recent runs from the run log."""
    if pause and resume:
        raise click.UsageError("--pause and --resume are exclusive")
    if pause or resume:
        success, message = set_logging_enabled(resume)
        if not success:
            raise click.ClickException(message)
        click.echo(f"run logging {'resumed' if resume else 'paused'}")
        return

    if show_stats:
        stats = get_run_stats()
        click.echo(f"total {stats.get('total', 0)}")
        for key, count in stats.get('by_command', {}).items():
            click.echo(f"command {key} {count}")
        for key, count in stats.get('by_status', {}).items():
            click.echo(f"status {key} {count}")
        return

    for run in get_runs(command_name, status, limit):
        click.echo(f"{run['id']} {run['started_at']} {run['command']} {run['status']} {run['details'] or ''}".rstrip())
