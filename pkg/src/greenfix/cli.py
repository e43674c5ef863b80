"""Command-line front end.

Exit codes: 0 success, 2 hypothesis fails, 3 no convergence,
4 invalid interval length, 5 verification failed, 64 bad input.
"""

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from .config import check_state_matches, load_config, read_state_csv, write_state_csv
from .errors import (EnvelopeViolation, InvalidInterval, MalformedConfig, MeshMismatch,
                     UnknownSystem)
from .hypothesis import FAILS, assess
from .solver import solve
from .verifier import verify

EXIT_OK = 0
EXIT_HYPOTHESIS = 2
EXIT_NO_CONVERGENCE = 3
EXIT_INTERVAL = 4
EXIT_VERIFY = 5
EXIT_USAGE = 64

log = logging.getLogger("greenfix")


def _threads(args):
    if args.threads is not None:
        return max(1, args.threads)
    env = os.environ.get("GREENFIX_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            log.warning("ignoring non-integer GREENFIX_THREADS=%r", env)
    return os.cpu_count() or 1


def _emit(obj):
    json.dump(obj, sys.stdout, indent=2)
    sys.stdout.write("\n")


def _setup(args):
    cfg = load_config(args.config)
    kernel = cfg.kernel()
    spec = cfg.system()
    report = assess(spec, cfg.T, cfg.params, cfg.hypothesis_J, cfg.t_samples)
    return cfg, kernel, spec, report


def cmd_check(args):
    cfg, kernel, spec, report = _setup(args)
    _emit(report.to_json())
    return EXIT_HYPOTHESIS if report.verdict == FAILS else EXIT_OK


def cmd_solve(args):
    cfg, kernel, spec, report = _setup(args)
    result = solve(spec, kernel, cfg.solver, cfg.params, radius=report.r)
    out = {"system": cfg.label, "hypothesis": report.to_json(), "solve": result.to_json()}
    if args.out is not None:
        outdir = Path(args.out)
        outdir.mkdir(parents=True, exist_ok=True)
        with open(outdir / "report.json", "w") as fh:
            json.dump(out, fh, indent=2)
        write_state_csv(result.state, outdir / "state.csv")
    _emit(out)
    return EXIT_OK if result.converged else EXIT_NO_CONVERGENCE


def cmd_verify(args):
    cfg, kernel, spec, report = _setup(args)
    state = read_state_csv(args.state)
    check_state_matches(state, cfg)
    vr = verify(spec, kernel, cfg.solver, cfg.params, state, report,
                thresholds=cfg.thresholds, seed=args.seed, threads=_threads(args))
    _emit(vr.to_json())
    for msg in vr.failures:
        log.error("%s", msg)
    return EXIT_OK if vr.passed else EXIT_VERIFY


def build_parser():
    parser = argparse.ArgumentParser(
        prog="greenfix",
        description="Fixed-point solver for truncated infinite systems v'' + v = f(t, v), v(0) = v(T) = 0.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True, help="run configuration (JSON)")
        p.add_argument("--threads", type=int, default=None,
                       help="worker threads (default: $GREENFIX_THREADS or all cores)")
        p.add_argument("--seed", type=int, default=0, help="seed for verifier randomness")

    p = sub.add_parser("check", help="compute existence constants and conditions")
    common(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("solve", help="iterate the integral operator to a fixed point")
    common(p)
    p.add_argument("--out", default=None, help="directory for report.json and state.csv")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="check a state CSV against the config's system")
    common(p)
    p.add_argument("--state", required=True, help="state CSV written by 'solve'")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except InvalidInterval as exc:
        log.error("%s", exc)
        return EXIT_INTERVAL
    except (MalformedConfig, UnknownSystem, EnvelopeViolation, MeshMismatch) as exc:
        log.error("%s", exc)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
