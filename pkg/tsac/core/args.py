import argparse
from pathlib import Path
from collections.abc import Sequence

import tsac
from tsac.core.agents.registry import CONTROLLERS
from tsac.core.bench.runner import FORMATS
from tsac.core.sim.plant import PLANTS

APP_NAME = "tsac"
APP_DESC = "Thompson-sampling adaptive LQR control and benchmarks"


class ArgsInit:
    def __init__(self, argv: Sequence[str] | None = None):
        self.args = self.build_parser().parse_args(argv)

    @staticmethod
    def _add_system(parser: argparse.ArgumentParser) -> None:
        parser.add_argument(
            "--a", dest="matrix_a",
            default=None,
            help="Inline A as row-major nested arrays, e.g. '[[2.0]]'",
            metavar="JSON"
        )
        parser.add_argument(
            "--b", dest="matrix_b",
            default=None,
            help="Inline B as row-major nested arrays",
            metavar="JSON"
        )

    @classmethod
    def build_parser(cls) -> argparse.ArgumentParser:
        parser = argparse.ArgumentParser(
            prog=APP_NAME,
            description=APP_DESC,
            formatter_class=argparse.RawDescriptionHelpFormatter
        )

        # Version argument
        parser.add_argument(
            "-V", "--version",
            action="version",
            version=f"%(prog)s {tsac.__version__}",
            help="Show version information and exit"
        )

        # Config file path
        parser.add_argument(
            "-c", "--config",
            type=Path,
            default=None,
            help="Path to configuration file",
            metavar="FILE"
        )

        parser.add_argument("--seed", type=int, default=None, help="Base seed")
        parser.add_argument("--out-dir", type=Path, default=None, help="Output directory", metavar="DIR")
        parser.add_argument("--threads", type=int, default=None, help="Worker processes for bench")
        parser.add_argument("--format", dest="fmt", choices=FORMATS, default=None, help="Per-step output format")
        parser.add_argument("--plant", choices=PLANTS, default=None, help="Override [plant].name")
        parser.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING or ERROR")

        sub = parser.add_subparsers(dest="command", metavar="COMMAND", required=True)

        run = sub.add_parser("run", help="Run a single episode and write its step CSV")
        run.add_argument("--controller", choices=CONTROLLERS, default="tsac")
        run.add_argument("--horizon", type=int, default=None)

        bench = sub.add_parser("bench", help="Run the multi-run benchmark protocol")
        bench.add_argument("--runs", type=int, default=None)
        bench.add_argument("--horizon", type=int, default=None)
        bench.add_argument("--controllers", nargs="+", choices=CONTROLLERS, default=None, metavar="NAME")

        dare = sub.add_parser("dare", help="Print P, K, J and the closed-loop spectral radius")
        cls._add_system(dare)

        check = sub.add_parser("check-system", help="Membership report and schedule constants")
        cls._add_system(check)
        check.add_argument("--horizon", type=int, default=None)

        optimism = sub.add_parser("optimism", help="Monte-Carlo estimate of the optimistic probability")
        cls._add_system(optimism)
        optimism.add_argument("--samples", type=int, default=None)
        optimism.add_argument("--steps", type=int, default=None)

        slope = sub.add_parser("slope", help="Fit the regret growth exponent on existing outputs")
        slope.add_argument("paths", nargs="+", type=Path, metavar="PATH",
                           help="Step CSV / run JSON files, or directories holding them")
        slope.add_argument("--t-min", type=int, default=None)
        slope.add_argument("--bootstrap", type=int, default=1000)

        cache = sub.add_parser("cache", help="Inspect or clear the run cache")
        cache.add_argument("action", choices=("list", "clear", "prune"))
        cache.add_argument("--max-age-days", type=float, default=30.0,
                           help="prune: drop entries older than this")

        return parser


def parse_args(argv: Sequence[str] | None = None) -> argparse.Namespace:
    return ArgsInit(argv).args
