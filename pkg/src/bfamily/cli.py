"""Command-line entry point: ``bfamily run <config>`` and ``bfamily verify <suite>``.

Exit codes: 0 pass, 1 check failure, 2 usage or configuration error,
3 numeric breakdown, 4 output I/O error.
"""

import argparse
import sys
from pathlib import Path

from . import acceptance, config, runner
from .errors import ConstraintViolation, PreconditionError


def _parser():
    ap = argparse.ArgumentParser(prog="bfamily", description="Periodic b-family solver and property audits.")
    sub = ap.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="evolve one configuration and write its artifacts")
    run.add_argument("config", help="path to a key = value configuration file")
    verify = sub.add_parser("verify", help="run an acceptance suite")
    verify.add_argument("suite", choices=sorted(acceptance.SUITES), help="suite name")
    for p in (run, verify):
        p.add_argument("--output-dir", default=None, help="artifact directory (run: ./out, verify: ./verify-out)")
        p.add_argument("--quiet", action="store_true", help="print only errors")
    return ap


def _run(args, say):
    try:
        cfg = config.load(args.config)
    except FileNotFoundError:
        print(f"error: config file not found: {args.config}", file=sys.stderr)
        return runner.EXIT_USAGE
    except config.ConfigError as err:
        print(f"error: {err}", file=sys.stderr)
        return runner.EXIT_USAGE
    out_dir = args.output_dir or "out"
    try:
        outcome = runner.execute(cfg, out_dir, log=say)
    except (ConstraintViolation, PreconditionError) as err:
        print(f"error: {err}", file=sys.stderr)
        return runner.EXIT_USAGE
    except OSError as err:
        print(f"error: cannot write artifacts: {err}", file=sys.stderr)
        return runner.EXIT_IO
    s = outcome.summary
    say(f"status: {s['status']}")
    for name, check in s["checks"].items():
        say(f"  {name}: {'pass' if check['passed'] else 'FAIL'}")
    for name, value in s["drifts"].items():
        say(f"  drift {name}: {value:.3e}")
    return outcome.exit_code


def _verify(args, say):
    out = Path(args.output_dir or "verify-out")
    report = out / f"verify-{args.suite}.txt"
    try:
        out.mkdir(parents=True, exist_ok=True)
        report.write_text("", encoding="utf-8")
    except OSError as err:
        print(f"error: cannot write verification report: {err}", file=sys.stderr)
        return runner.EXIT_IO
    lines = []

    def emit(res):
        lines.append(res.line())
        print(res.line(), flush=True)

    results = acceptance.run_suite(args.suite, emit)
    ok = all(r.passed for r in results)
    lines.append(f"suite {args.suite}: {'PASS' if ok else 'FAIL'} ({sum(r.passed for r in results)}/{len(results)})")
    say(lines[-1])
    try:
        report.write_text("\n".join(lines) + "\n", encoding="utf-8")
    except OSError as err:
        print(f"error: cannot write verification report: {err}", file=sys.stderr)
        return runner.EXIT_IO
    return runner.EXIT_PASS if ok else runner.EXIT_FAIL


def main(argv=None) -> int:
    args = _parser().parse_args(argv)

    def say(msg):
        if not args.quiet:
            print(msg, flush=True)

    if args.command == "run":
        return _run(args, say)
    return _verify(args, say)


if __name__ == "__main__":
    sys.exit(main())
