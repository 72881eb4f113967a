"""Command line entry point: ``brcsmud run | roc | selftest``."""

from __future__ import annotations

import argparse
import logging
import sys

from .harness import ConfigError, TrialError, emit_roc, load_config, oracle_equivalence, run_sweep

EXIT_OK, EXIT_CONFIG, EXIT_IO, EXIT_INTERNAL = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage, which is reserved for I/O errors here
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="brcsmud", description="Bayes-risk sparse multi-user detection experiments.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="run a Monte Carlo sweep and write the sweep CSV")
    run.add_argument("--config", required=True, help="key=value experiment file")
    run.add_argument("--out", help="output CSV (overrides output_path)")
    run.add_argument("--seed", help="base seed, unsigned 64-bit")
    run.add_argument("--trials", help="trials per sweep point")
    run.add_argument("--snr", help="comma separated SNR list in dB")
    run.add_argument("--omega", help="comma separated Bayes factors")
    run.add_argument("--gain", help="comma separated spreading gains")
    run.add_argument("--detectors", help="comma separated subset of brcsmud,bpdn")

    roc = sub.add_parser("roc", help="turn a sweep CSV into per-omega ROC traces")
    roc.add_argument("--in", dest="csv_in", required=True)
    roc.add_argument("--out", dest="csv_out", required=True)
    roc.add_argument("--detector", default="brcsmud")

    st = sub.add_parser("selftest", help="check the sphere search against exhaustive enumeration")
    st.add_argument("--instances", type=int, default=1000)
    st.add_argument("--seed", type=int, default=0)
    return parser


_OVERRIDES = {
    "out": "output_path",
    "seed": "base_seed",
    "trials": "trials_per_point",
    "snr": "snr_db_list",
    "omega": "omega_list",
    "gain": "spreading_gain_list",
    "detectors": "detectors",
}


def _cmd_run(args) -> int:
    overrides = {key: getattr(args, opt) for opt, key in _OVERRIDES.items() if getattr(args, opt) is not None}
    config = load_config(args.config, overrides)
    path = run_sweep(config)
    print(path)
    return EXIT_OK


def _cmd_roc(args) -> int:
    dropped = emit_roc(args.csv_in, args.csv_out, args.detector)
    if dropped:
        print(f"dropped {dropped} rows with missing rates", file=sys.stderr)
    print(args.csv_out)
    return EXIT_OK


def _cmd_selftest(args) -> int:
    failures = oracle_equivalence(args.instances, args.seed)
    for line in failures:
        print(line)
    print(f"{args.instances - len(failures)}/{args.instances} instances agree with exhaustive search")
    return EXIT_OK if not failures else EXIT_INTERNAL


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    handler = {"run": _cmd_run, "roc": _cmd_roc, "selftest": _cmd_selftest}[args.command]
    try:
        return handler(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (AssertionError, TrialError) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
