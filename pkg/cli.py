#!/usr/bin/env python3
"""
TauSet - Partitioning sets, LCE queries and sparse suffix trees
Command-line entry point
"""

import logging

import click

from commands import (
    build_partition_cmd,
    lce_cmd,
    sst_cmd,
    verify_cmd,
    gen_cmd,
    runs_cmd
)


@click.group()
@click.option('-v', '--verbose', count=True, help='-v for info, -vv for debug')
@click.option('-q', '--quiet', is_flag=True, help='Errors only')
def cli(verbose, quiet):
    """Build tau-partitioning sets and the indexes built on them."""
    if quiet:
        level = logging.ERROR
    elif verbose >= 2:
        level = logging.DEBUG
    elif verbose == 1:
        level = logging.INFO
    else:
        level = logging.WARNING
    logging.basicConfig(level=level, format='%(asctime)s %(levelname)s %(name)s: %(message)s')


# Register commands
cli.add_command(build_partition_cmd)
cli.add_command(lce_cmd)
cli.add_command(sst_cmd)
cli.add_command(verify_cmd)
cli.add_command(gen_cmd)
cli.add_command(runs_cmd)


if __name__ == '__main__':
    cli()
