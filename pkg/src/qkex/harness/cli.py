"""Command-line entry point: ``qkex run``, ``qkex verify``, ``qkex report``."""

from __future__ import annotations

import argparse
import configparser
import sys
from pathlib import Path

from .runner import REPORT_FILE, report_from_transcripts, run_experiment
from .spec import load_spec, spec_from_parser
from .verify import format_checks, verify_suite


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qkex", description="Key-expansion protocol simulator.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an experiment")
    run.add_argument("config", nargs="?", help="INI experiment file (defaults apply when omitted)")
    run.add_argument("--seed", type=int)
    run.add_argument("--sessions", type=int)
    run.add_argument("--out-dir")
    run.add_argument("--adversary", help="strategy, e.g. intercept_fraction:f=0.1")
    run.add_argument("--protocol", choices=["p1", "p2", "p3", "naive", "naive_baseline"])
    run.add_argument("--workers", type=int, default=1, help="worker processes (fresh key mode only)")

    ver = sub.add_parser("verify", help="run the identity and oracle suite")
    ver.add_argument("--seed", type=int, default=0)

    rep = sub.add_parser("report", help="re-aggregate a transcript log")
    rep.add_argument("path", help="transcripts.log or the directory holding it")
    rep.add_argument("--out-dir", help="also write report.txt here")
    return parser


def _cmd_run(args) -> int:
    overrides = dict(
        seed=args.seed,
        sessions=args.sessions,
        out_dir=args.out_dir,
        adversary=args.adversary,
        protocol=args.protocol,
    )
    if args.config:
        spec = load_spec(args.config, **overrides)
    else:
        spec = spec_from_parser(configparser.ConfigParser(), **overrides)
    result = run_experiment(spec, workers=args.workers)
    sys.stdout.write(result.report_text())
    return 0


def _cmd_verify(args) -> int:
    checks = verify_suite(seed=args.seed)
    sys.stdout.write(format_checks(checks))
    return 0 if all(c.passed for c in checks) else 1


def _cmd_report(args) -> int:
    text = report_from_transcripts(args.path).to_text()
    sys.stdout.write(text)
    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / REPORT_FILE).write_text(text, encoding="utf-8")
    return 0


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    handler = {"run": _cmd_run, "verify": _cmd_verify, "report": _cmd_report}[args.command]
    try:
        return handler(args)
    except (ValueError, OSError) as exc:
        print(f"qkex: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
