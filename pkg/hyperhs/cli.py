"""Command-line entry point: `hyperhs verify`, `hyperhs suite` and `hyperhs list`."""

import argparse
import sys
from typing import Any, Dict, List, Optional

import yaml
from loguru import logger

from hyperhs import __version__
from hyperhs.domain.identities import REGISTRY, run_identity
from hyperhs.domain.report import RunSettings
from hyperhs.exceptions import ConfigError, HyperHSError
from hyperhs.logging_config import configure_logging
from hyperhs.reporting import SuiteResult, emit_report
from hyperhs.runner import run_suite
from hyperhs.settings import env_seed, load_config


def parse_param(text: str) -> tuple:
    """key=value with the value read as YAML: 0.5, [1.0, -0.3], "1+2j", true."""
    key, sep, value = text.partition("=")
    if not sep or not key.strip():
        raise ConfigError(f"expected key=value, got '{text}'", field="--param")
    try:
        return key.strip(), yaml.safe_load(value)
    except yaml.YAMLError as e:
        raise ConfigError(f"cannot parse value of '{key}': {e}", field=key.strip())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hyperhs", description="Numerical verification of HS identities")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", default=None, help="Log level (default: HYPERHS_LOG_LEVEL or INFO).")
    sub = parser.add_subparsers(dest="command", required=True)

    verify = sub.add_parser("verify", help="Run a single identity check.")
    verify.add_argument("identity_id", help="Registered identity id (see `hyperhs list`).")
    verify.add_argument("--param", action="append", default=[], metavar="KEY=VALUE",
                        help="Check parameter; repeatable.")
    verify.add_argument("--seed", type=int, default=None, help="Base seed (default: HYPERHS_SEED or 20240101).")
    verify.add_argument("--samples", type=int, default=None, help="Monte Carlo sample budget.")
    verify.add_argument("--eps", type=float, default=None, help="Regulator for eps-modified checks.")
    verify.add_argument("--tol", type=float, default=None, help="Override the check's tolerance.")
    verify.add_argument("--workers", type=int, default=1, help="Threads for Monte Carlo chunks.")
    verify.add_argument("--json", default=None, metavar="PATH", help="Write the report as JSON.")
    verify.add_argument("--deterministic", action="store_true", help="Write runtime_ms as 0 for byte-identical output.")

    suite = sub.add_parser("suite", help="Run a suite configuration.")
    suite.add_argument("--config", default=None, help="Suite YAML (default: config/default_suite.yaml).")
    suite.add_argument("--format", choices=["json", "csv"], default=None, help="Report format.")
    suite.add_argument("--workers", type=int, default=None, help="Checks run concurrently.")
    suite.add_argument("--output", default=None, metavar="PATH", help="Report path (overrides output_path).")
    suite.add_argument("--deterministic", action="store_true", help="Write runtime_ms as 0 for byte-identical output.")

    sub.add_parser("list", help="List registered identity ids.")
    return parser


def cmd_verify(args: argparse.Namespace) -> int:
    params: Dict[str, Any] = dict(parse_param(p) for p in args.param)
    settings = RunSettings(seed=args.seed if args.seed is not None else env_seed()).with_overrides(
        samples=args.samples, eps=args.eps, tolerance=args.tol, workers=args.workers)
    report = run_identity(args.identity_id, params, settings)
    result = SuiteResult(reports=[report], config_digest="", tool_version=__version__)
    payload = emit_report(result, "json", args.json, args.deterministic)
    if args.json is None:
        sys.stdout.write(payload.decode("utf-8") + "\n")
    return 0 if report.passed else 1


def cmd_suite(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    fmt = args.format or config.format
    result = run_suite(config, args.workers)
    payload = emit_report(result, fmt, args.output or config.output_path, args.deterministic)
    if not (args.output or config.output_path):
        sys.stdout.write(payload.decode("utf-8") + "\n")
    return 0 if result.all_passed else 1


def cmd_list(args: argparse.Namespace) -> int:
    for identity_id, check in REGISTRY.items():
        sys.stdout.write(f"{identity_id:<16} {check.description}\n")
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    # reports go to stdout, logs to stderr
    configure_logging(level=args.log_level, stream=sys.stderr)
    try:
        if args.command == "verify":
            return cmd_verify(args)
        elif args.command == "suite":
            return cmd_suite(args)
        elif args.command == "list":
            return cmd_list(args)
        else:
            logger.warning(f"Unknown command: {args.command}")
            return 2
    except ConfigError as e:
        logger.error(f"Configuration error: {e}")
        return 2
    except HyperHSError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
