"""
Command-line entry point.

Usage:
  python -m app.cli session.wd [--max-degree D] [--zpower K] [--stats]
  cat session.wd | python -m app.cli -

The report goes to standard output as one JSON document; logs go to
standard error. The process exit code is the report's ``exit_code``.
"""

from __future__ import annotations

import argparse
import logging
import sys
from typing import List, Optional

from app.session.runner import run_source
from app.settings import get_settings, use_settings


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="weylfiber", description="Run one weylfiber session.")
    parser.add_argument("input", nargs="?", default="-", help="session file, or - for standard input")
    parser.add_argument("--max-degree", type=int, default=None, help="oracle truncation bound (default 40)")
    parser.add_argument("--zpower", type=int, default=None, help="lattice containment search bound (default 8)")
    parser.add_argument("--stats", action="store_true", help="attach engine statistics to the report")
    parser.add_argument("--log-level", default=None, help="override WEYLFIBER_LOG_LEVEL")
    return parser


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        settings = get_settings().with_overrides(
            max_degree=args.max_degree,
            zpower=args.zpower,
            stats=True if args.stats else None,
            log_level=args.log_level.upper() if args.log_level else None,
        )
    except ValueError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1
    use_settings(settings)
    logging.basicConfig(
        level=settings.log_level,
        format="[%(levelname)s] %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        source = _read(args.input)
    except OSError as exc:
        print(f"cannot read {args.input}: {exc}", file=sys.stderr)
        return 1
    report = run_source(source, stats=settings.stats)
    sys.stdout.write(report.model_dump_json(indent=2) + "\n")
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
