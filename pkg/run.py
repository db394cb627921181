#!/usr/bin/env python3
"""
bgraph - Quick launch script

Runs the command-line front end from a source checkout.
Example: python run.py exact --degrees 2,2,2,2
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from src.cli.main import run  # noqa: E402


def main():
    """Launch the CLI and exit with its status."""
    try:
        sys.exit(run(sys.argv[1:]))
    except KeyboardInterrupt:
        print("\nInterrupted", file=sys.stderr)
        sys.exit(130)


if __name__ == "__main__":
    main()
