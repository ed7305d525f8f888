import sys

from tsac.cli.app import run


def main() -> None:
    sys.exit(run())
