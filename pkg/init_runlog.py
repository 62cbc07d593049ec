#!/usr/bin/env python3
"""
Run Log Initialization Script
Run this script to create the run-log database file.
"""

import config
from runlog import init_runlog, is_logging_enabled


def main():
    print("=" * 60)
    print("TauSet - Run Log Initialization")
    print("=" * 60)
    print()

    print("Initializing run log...")
    try:
        init_runlog()
        print(f"✓ Run log ({config.RUNLOG_DB_PATH}) created successfully")
        print(f"  Logging enabled: {'yes' if is_logging_enabled() else 'no'}")
        print()
    except Exception as e:
        print(f"✗ Error creating run log: {e}")
        return False

    print("=" * 60)
    print("Run log initialization complete!")
    print("=" * 60)
    print()
    print("Next steps:")
    print("1. Generate a text: python cli.py gen --kind random --n 4096 --out text.txt")
    print("2. Build S*: python cli.py build-partition --input text.txt --tau 64 --out s.txt")
    print("3. Check it: python cli.py verify --level final")
    print()

    return True


if __name__ == '__main__':
    main()
