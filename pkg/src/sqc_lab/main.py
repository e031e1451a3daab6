"""Main entry point for sqc-lab."""

import argparse
import json
import logging
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import Any

from dotenv import load_dotenv
from pydantic import ValidationError

from sqc_lab.config import COMMANDS, RunConfig, load_config, parse_run_config
from sqc_lab.engine.dump import dump_rows, rows_to_csv
from sqc_lab.engine.estimators import certify, sigma_hat, sweep
from sqc_lab.errors import NumericFailureError
from sqc_lab.logging.progress import SuiteProgress, create_file_handler
from sqc_lab.logging.reporter import (
    FAIL,
    PASS,
    CheckRecord,
    Report,
    emit_report,
    exit_code,
    hypothesis_warnings,
    print_summary,
)
from sqc_lab.suite.registry import CHECK_NAMES, CheckSpec, SuiteRunner

logger = logging.getLogger(__name__)

USAGE_ERROR = 2


class UsageError(Exception):
    """Malformed command line or configuration; exits with code 2."""


def setup_logging(log_dir: Path | None, verbose: bool = False) -> None:
    """Configure logging for a run.

    Args:
        log_dir: Directory for the detailed log file; no file when None.
        verbose: If True, also show WARNING logs on the terminal.
    """
    root_logger = logging.getLogger()
    root_logger.setLevel(logging.DEBUG)
    root_logger.handlers.clear()

    if log_dir is not None:
        root_logger.addHandler(create_file_handler(log_dir, level=logging.DEBUG))

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(logging.ERROR if not verbose else logging.WARNING)
    console_handler.setFormatter(logging.Formatter("%(levelname)s: %(message)s"))
    root_logger.addHandler(console_handler)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sqclab",
        description="sqc-lab - numerical certification of strong quasiconvexity",
    )
    parser.add_argument("command", choices=COMMANDS, help="What to run")
    parser.add_argument("--config", "-c", type=str, help="JSON file with function, region and run settings")
    parser.add_argument(
        "--check",
        action="append",
        choices=CHECK_NAMES,
        help="Registered check to run (repeatable; default: all)",
    )
    parser.add_argument("--param", action="append", default=[], metavar="K=V", help="Check parameter override")
    parser.add_argument("--sigma", type=float, help="Modulus to certify")
    parser.add_argument("--seed", type=int, help="Root seed (default: 0)")
    parser.add_argument("--samples", type=int, help="Sampled pairs per sweep (default: 10000)")
    parser.add_argument("--out", type=str, help="Write the report here instead of stdout")
    parser.add_argument("--format", choices=("json", "csv"), help="Report format (default: json)")
    parser.add_argument("--verbose", "-v", action="store_true", help="Show warning logs in terminal")
    parser.add_argument("--log-dir", type=str, help="Write a detailed sqclab.log into this directory")
    return parser


def parse_params(pairs: Sequence[str]) -> dict[str, float]:
    """Parse repeated K=V flags into a mapping of floats."""
    params: dict[str, float] = {}
    for pair in pairs:
        key, sep, value = pair.partition("=")
        if not sep or not key:
            raise UsageError(f"param: expected K=V, got '{pair}'")
        try:
            params[key] = float(value)
        except ValueError as e:
            raise UsageError(f"param {key}: not a number: '{value}'") from e
    return params


def describe_validation_error(error: ValidationError) -> str:
    """One line naming the first offending key."""
    first = error.errors()[0]
    where = ".".join(str(part) for part in first["loc"])
    message = first["msg"].removeprefix("Value error, ")
    return f"{where}: {message}" if where else message


def parse_config(argv: Sequence[str] | None = None) -> tuple[RunConfig, argparse.Namespace]:
    """Build a validated RunConfig from the command line and an optional --config file.

    Command-line values override file values.

    Raises:
        UsageError: On malformed input, naming the offending key.
    """
    args = build_parser().parse_args(argv)
    data: dict[str, Any] = {}
    if args.config:
        try:
            data = load_config(args.config)
        except FileNotFoundError as e:
            raise UsageError(f"config: {e}") from e
        except ValueError as e:
            raise UsageError(f"config: {e}") from e

    data["command"] = args.command
    overrides = {
        "sigma": args.sigma,
        "seed": args.seed,
        "samples": args.samples,
        "out_path": args.out,
        "format": args.format,
        "check": args.check,
    }
    data.update({key: value for key, value in overrides.items() if value is not None})
    if args.param:
        data["params"] = {**data.get("params", {}), **parse_params(args.param)}

    try:
        return parse_run_config(data), args
    except ValidationError as e:
        raise UsageError(describe_validation_error(e)) from e


def run_certify(config: RunConfig) -> Report:
    f, region, cfg = config.function.to_spec(), config.region.to_spec(), config.sampler()
    result = certify(f, region, config.sigma, cfg, config.tol)
    record = CheckRecord(
        name="certify",
        params={"sigma": config.sigma, "tol": config.tol},
        status=PASS if result.passed else FAIL,
        sigma=config.sigma,
        witness=result.witness,
        n_samples=result.n_triples,
        seed=cfg.seed,
        runtime_ms=0.0,
        details={"max_defect": result.max_defect, "function": f.to_json(), "region": region.to_json()},
    )
    return Report(suite="sqclab-certify", checks=[record])


def run_estimate(config: RunConfig) -> Report:
    f, region, cfg = config.function.to_spec(), config.region.to_spec(), config.sampler()
    estimate = sigma_hat(f, region, cfg)
    if estimate.clamped:
        logger.warning(f"sigma_hat clamped to {estimate.sigma_hat:.3g}")
    record = CheckRecord(
        name="estimate",
        params={},
        status=PASS,
        sigma=estimate.sigma_hat,
        witness=estimate.witness,
        n_samples=estimate.n_triples,
        seed=cfg.seed,
        runtime_ms=0.0,
        details={"clamped": estimate.clamped, "function": f.to_json(), "region": region.to_json()},
    )
    return Report(suite="sqclab-estimate", checks=[record])


def run_dump(config: RunConfig) -> bytes:
    f, region, cfg = config.function.to_spec(), config.region.to_spec(), config.sampler()
    rows = dump_rows(sweep(f, region, cfg), config.sigma or 0.0)
    if config.format == "csv":
        return rows_to_csv(rows).encode("utf-8")
    return (json.dumps(list(rows), indent=2) + "\n").encode("utf-8")


def run_paper(config: RunConfig) -> Report:
    names = config.check or list(CHECK_NAMES)
    specs = [CheckSpec.resolve(name, config.params) for name in names]
    progress = SuiteProgress([spec.name for spec in specs])
    runner = SuiteRunner(specs, config.sampler(), on_start=progress.start_check, on_finish=progress.end_check)
    progress.start()
    try:
        report = runner.run_all()
    finally:
        progress.stop()
    logger.info(f"Suite finished in {progress.elapsed:.1f}s")
    print_summary(report)
    return report


def write_output(payload: bytes, out_path: str | None) -> None:
    if out_path is None:
        sys.stdout.buffer.write(payload)
        sys.stdout.flush()
        return
    try:
        Path(out_path).write_bytes(payload)
    except OSError as e:
        raise UsageError(f"out: cannot write {out_path}: {e.strerror}") from e


def run(config: RunConfig) -> int:
    """Execute a validated configuration and return the process exit code."""
    if config.command == "dump":
        write_output(run_dump(config), config.out_path)
        return 0
    runners = {"certify": run_certify, "estimate": run_estimate, "paper": run_paper}
    report = runners[config.command](config)
    write_output(emit_report(report, config.format), config.out_path)
    for line in hypothesis_warnings(report):
        print(line, file=sys.stderr)
    return exit_code(report)


def main(argv: Sequence[str] | None = None) -> None:
    """Main entry point."""
    load_dotenv()
    try:
        config, args = parse_config(argv)
        setup_logging(Path(args.log_dir) if args.log_dir else None, verbose=args.verbose)
        logger.info(f"sqclab {config.command} with seed={config.seed}, samples={config.samples}")
        sys.exit(run(config))
    except UsageError as e:
        print(f"Error: {e}", file=sys.stderr)
        sys.exit(USAGE_ERROR)
    except ValueError as e:
        print(f"Error: {e}", file=sys.stderr)
        sys.exit(USAGE_ERROR)
    except NumericFailureError as e:
        print(f"Numeric failure: {e}", file=sys.stderr)
        sys.exit(1)
    except KeyboardInterrupt:
        print("\nInterrupted by user", file=sys.stderr)
        sys.exit(1)


if __name__ == "__main__":
    main()
