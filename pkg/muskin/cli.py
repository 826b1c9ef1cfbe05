"""
Command line harness

::

    mu-skin rates --config rates.json --out results/rates --threads 4

Every run writes one CSV file per result table, ``report.json``,
``summary.txt`` and the sidecar ``run_meta.json``. The exit status is 0
when every verdict passed, 1 when a verdict failed, 2 for configuration
errors and 3 for solver errors.
"""

import argparse
import datetime
import json
import logging
import os
import time
from typing import List, Optional

from muskin import __version__, config
from muskin.errors import ConfigError, MuSkinError
from muskin.experiments import Experiments, ExperimentResult
from muskin.parser import ExperimentConfig, load_config


logger = logging.getLogger(__name__)

EXIT_PASSED = 0
EXIT_FAILED = 1
EXIT_CONFIG = 2
EXIT_SOLVER = 3


def resolve_threads(flag: Optional[int], cfg: ExperimentConfig) -> int:
    """
    Number of worker processes

    ``MU_SKIN_THREADS`` wins over ``--threads``, which wins over the
    ``threads`` field of the configuration. The default is the number of
    CPUs.

    Raises
    ------
    ConfigError
        If the environment variable is not a positive integer
    """
    env = os.environ.get(config.THREADS_ENV)
    if env is not None:
        try:
            threads = int(env)
        except ValueError as err:
            raise ConfigError(f"{config.THREADS_ENV} must be an integer, got {env!r}") from err
    elif flag is not None:
        threads = flag
    elif cfg.threads is not None:
        threads = cfg.threads
    else:
        threads = os.cpu_count() or 1
    if threads < 1:
        raise ConfigError(f"Thread count must be at least 1, got {threads}")
    return threads


def write_result(result: ExperimentResult, directory: str) -> List[str]:
    """
    Writes the deterministic output files of a run

    Returns
    -------
    list
        Paths of the written files
    """
    os.makedirs(directory, exist_ok=True)
    written = []
    for name in sorted(result.tables):
        path = os.path.join(directory, f"{name}.csv")
        result.tables[name].to_csv(path, index=False, float_format=config.FLOAT_FORMAT)
        written.append(path)
    report = dict(result.report)
    report["kind"] = result.kind
    report["verdicts"] = result.verdicts
    report["passed"] = result.passed
    path = os.path.join(directory, "report.json")
    with open(path, "w") as fh:
        fh.write(json.dumps(report, sort_keys=True, indent=2))
        fh.write("\n")
    written.append(path)
    path = os.path.join(directory, "summary.txt")
    with open(path, "w") as fh:
        fh.write(result.summary_text())
    written.append(path)
    return written


def write_meta(directory: str, kind: str, threads: int, wall_time: float) -> None:
    meta = {
        "version": __version__,
        "kind": kind,
        "threads": threads,
        "wall_time": wall_time,
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
    }
    with open(os.path.join(directory, "run_meta.json"), "w") as fh:
        fh.write(json.dumps(meta, sort_keys=True, indent=2))
        fh.write("\n")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mu-skin",
        description="Verification experiments for high-contrast Maxwell transmission",
    )
    parser.add_argument("kind", choices=Experiments.kinds(), help="Experiment kind")
    parser.add_argument("--config", required=True, help="JSON configuration file")
    parser.add_argument(
        "--out", default=None, help="Output directory (default: output.directory of the config)"
    )
    parser.add_argument("--threads", type=int, default=None, help="Number of worker processes")
    parser.add_argument("--verbose", action="store_true", help="Log debug messages")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        cfg = load_config(args.config)
        if cfg.experiment is not None and cfg.experiment != args.kind:
            raise ConfigError(
                f"experiment: configuration is for {cfg.experiment}, not {args.kind}"
            )
        threads = resolve_threads(args.threads, cfg)
    except ConfigError as err:
        logger.error("%s", err)
        return EXIT_CONFIG

    directory = args.out or cfg.output.directory
    start = time.perf_counter()
    try:
        result = Experiments(args.kind, cfg, threads)
    except ConfigError as err:
        logger.error("%s", err)
        return EXIT_CONFIG
    except (MuSkinError, NotImplementedError) as err:
        logger.error("%s failed: %s", args.kind, err)
        return EXIT_SOLVER
    wall_time = time.perf_counter() - start

    for path in write_result(result, directory):
        logger.debug("Wrote %s", path)
    write_meta(directory, args.kind, threads, wall_time)
    for name, passed in sorted(result.verdicts.items()):
        if not passed:
            logger.warning("Verdict %s failed", name)
    logger.info("%s %s in %.1f s", args.kind, "passed" if result.passed else "failed", wall_time)
    return EXIT_PASSED if result.passed else EXIT_FAILED


if __name__ == "__main__":
    raise SystemExit(main())
