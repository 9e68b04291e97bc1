import argparse
import logging
import sys
from typing import List, Optional

from .config import ExperimentConfig
from .experiments import EXPERIMENTS, run
from .version import banner


def parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(
        prog="python -m LPLab",
        description="Run Littlewood-Paley norm experiments and write norms.csv "
        "plus a pass/fail report.",
    )
    parser.add_argument("experiment", choices=list(EXPERIMENTS) + ["all"])
    parser.add_argument("--config", help="flat JSON file with config keys")
    parser.add_argument("--out", help="output directory (overrides the config)")
    parser.add_argument("--seed", type=int, help="seed of the randomized checks")
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true")
    verbosity.add_argument("-q", "--quiet", action="store_true")
    return parser.parse_args(argv)


def main(argv: Optional[List[str]] = None) -> int:
    args = parse_args(argv)
    level = logging.INFO
    if args.verbose:
        level = logging.DEBUG
    elif args.quiet:
        level = logging.WARNING
    logging.basicConfig(level=level, format="%(levelname)s %(message)s")
    logging.info("%s", banner)

    try:
        if args.config:
            config = ExperimentConfig.fromFile(args.config)
        else:
            config = ExperimentConfig()
        overrides = {}
        if args.out is not None:
            overrides["out"] = args.out
        if args.seed is not None:
            overrides["seed"] = args.seed
        if overrides:
            config = config.replace(**overrides)
        table, report = run(config, args.experiment)
    except (ValueError, TypeError, NotImplementedError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2

    for line in report.lines():
        print(line)
    if not report.passed:
        logging.warning("%s of %s checks failed", len(report.failures), len(report))
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
