"""
Commands package for TauSet
One click command per module, registered on the group in cli.py.
"""

from commands.build import build_partition_cmd
from commands.lce import lce_cmd
from commands.sst import sst_cmd
from commands.verify import verify_cmd
from commands.gen import gen_cmd
from commands.runs import runs_cmd

__all__ = [
    'build_partition_cmd',
    'lce_cmd',
    'sst_cmd',
    'verify_cmd',
    'gen_cmd',
    'runs_cmd'
]
