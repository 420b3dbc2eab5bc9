"""``hqs-accred`` command line.

Exit codes: 0 ok, 1 a check failed, 2 parse error, 3 validation error,
4 capacity exceeded.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__, oracle
from .config import load_channel_fixture, load_config
from .errors import CapacityError, ConfigError, HqsError, NotTwoColourable
from .hamiltonian import from_pauli_sum
from .inversion import (
    synthesize_inversion,
    synthesize_inversion_xy_model,
    verify_inversion_numeric,
    verify_inversion_symbolic,
)
from .kernels import BACKEND
from .pauli import format_pauli_sum, parse_pauli_sum
from .protocol import ProtocolRunner, compute_n_traps, validate_bound

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_PARSE = 2
EXIT_VALIDATION = 3
EXIT_CAPACITY = 4

THREADS_ENV = "HQS_ACCRED_THREADS"
REPORT_FORMAT = 1


def default_threads() -> int:
    raw = os.environ.get(THREADS_ENV, "")
    try:
        return max(1, int(raw)) if raw else 1
    except ValueError:
        return 1


def dump_report(report: dict, out: str | None) -> None:
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _meta(start: float, **extra) -> dict:
    return {
        "duration_s": round(time.perf_counter() - start, 6),
        "finished_utc": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        **extra,
    }


def build_run_report(run_cfg, threads: int = 1, keep_log: bool = True) -> dict:
    """Run every repetition of ``run_cfg``. Volatile data lives under ``timing``."""
    start = time.perf_counter()
    runner = ProtocolRunner(run_cfg.protocol, threads)
    results = runner.batch(run_cfg.repetitions, keep_log)
    return {
        "format": REPORT_FORMAT,
        "tool": "hqs-accred",
        "version": __version__,
        "seed": run_cfg.seed,
        "config": run_cfg.echo,
        "n_qubits": run_cfg.protocol.n,
        "n_traps": run_cfg.protocol.n_traps,
        "theta": run_cfg.protocol.theta,
        "alpha": run_cfg.protocol.alpha,
        "repetitions": run_cfg.repetitions,
        "results": [r.as_dict() for r in results],
        "timing": _meta(start, backend=BACKEND, threads=threads),
    }


# --- commands -----------------------------------------------------------------

def cmd_run(args) -> int:
    run_cfg = load_config(args.config, args.seed)
    if args.repetitions is not None:
        run_cfg = type(run_cfg)(run_cfg.protocol, args.repetitions, run_cfg.echo, run_cfg.source)
    dump_report(build_run_report(run_cfg, args.threads, not args.no_log), args.out)
    return EXIT_OK


def cmd_ntraps(args) -> int:
    print(compute_n_traps(args.theta, args.alpha))
    return EXIT_OK


def invert_check(text: str, times) -> dict:
    h = parse_pauli_sum(text)
    ham = from_pauli_sum(h)
    circ = synthesize_inversion_xy_model(ham) if ham.has_onsite else synthesize_inversion(ham)
    symbolic = verify_inversion_symbolic(h, circ)
    max_error = max(verify_inversion_numeric(h, circ, t) for t in times)
    return {
        "hamiltonian": format_pauli_sum(h).strip().splitlines(),
        "n_qubits": ham.n,
        "basis": circ.basis.value,
        "circuit": circ.letters,
        "phase_exponent": circ.string.phase,
        "symbolic_pass": symbolic,
        "numeric_max_error": max_error,
        "times": list(times),
    }


def cmd_invert_check(args) -> int:
    start = time.perf_counter()
    try:
        text = Path(args.fixture).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {args.fixture}: {exc.strerror}", "parse") from None
    times = [float(x) for x in np.linspace(-args.t_max, args.t_max, args.t_points)]
    try:
        report = invert_check(text, times)
    except NotTwoColourable as exc:
        dump_report({"error": "not_two_colourable", "witness": list(exc.witness), "message": str(exc)}, args.out)
        return EXIT_VALIDATION
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    report["timing"] = _meta(start)
    dump_report(report, args.out)
    ok = report["symbolic_pass"] and report["numeric_max_error"] <= args.tol
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def _read_dist(path):
    try:
        return oracle.parse_distribution(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}", "parse") from None
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def cmd_oracle(args) -> int:
    start = time.perf_counter()
    if args.oracle_cmd == "vd":
        report = {"vd": oracle.variation_distance(_read_dist(args.a), _read_dist(args.b))}
    elif args.oracle_cmd == "twirl":
        ch = load_channel_fixture(args.channel)
        tw = oracle.twirl(ch)
        chi = oracle.process_matrix(tw)
        report = {
            "channel": ch.label,
            "qubits": list(ch.qubits),
            "input_max_offdiagonal": oracle.max_offdiagonal(oracle.process_matrix(ch)),
            "twirled_pauli_weights": oracle.pauli_weights(tw),
            "twirled_max_offdiagonal": oracle.max_offdiagonal(chi),
            "diagonal": oracle.max_offdiagonal(chi) <= args.tol,
        }
    else:
        cfg = load_config(args.config, args.seed).protocol
        if args.oracle_cmd == "p-inco":
            if cfg.n <= oracle.ENUMERATION_CAP and not args.monte_carlo:
                report = {"method": "enumeration", "p_inco": oracle.exact_p_inco(cfg.hamiltonian, cfg.t, cfg.error)}
            else:
                est = oracle.p_inco_monte_carlo(cfg.hamiltonian, cfg.t, cfg.error, args.draws, cfg.master_seed)
                report = {"method": "monte_carlo", "p_inco": est.value, "stderr": est.stderr, "samples": est.samples}
        elif args.oracle_cmd == "detect":
            est = oracle.detection_rate_empirical(cfg.hamiltonian, cfg.t, cfg.error, args.samples, cfg.master_seed)
            report = {"rate": est.value, "stderr": est.stderr, "samples": est.samples, "seed": cfg.master_seed}
        else:  # bound
            report = validate_bound(cfg).as_dict()
    report["timing"] = _meta(start)
    dump_report(report, args.out)
    return EXIT_OK


# --- parser -------------------------------------------------------------------

def _probability(text):
    return float(text)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hqs-accred", description="Accreditation of hybrid quantum simulators")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute the protocol from a config file")
    run.add_argument("--config", required=True)
    run.add_argument("--seed", type=int, default=None, help="overrides the config seed")
    run.add_argument("--out", default=None, help="report path (default stdout)")
    run.add_argument(
        "--threads",
        type=int,
        default=default_threads(),
        help=f"worker threads; affects speed only (default ${THREADS_ENV} or 1)",
    )
    run.add_argument("--repetitions", type=int, default=None, help="overrides protocol.repetitions")
    run.add_argument("--no-log", action="store_true", help="omit the per-run log")
    run.set_defaults(func=cmd_run)

    nt = sub.add_parser("ntraps", help="trap count for accuracy theta and confidence alpha")
    nt.add_argument("theta", type=_probability)
    nt.add_argument("alpha", type=_probability)
    nt.set_defaults(func=cmd_ntraps)

    inv = sub.add_parser("invert-check", help="synthesize and verify the time-inversion layer")
    inv.add_argument("fixture", help="Pauli-sum file: '<coeff> <letters>' per line")
    inv.add_argument("--t-max", type=float, default=10.0)
    inv.add_argument("--t-points", type=int, default=21)
    inv.add_argument("--tol", type=float, default=1e-9)
    inv.add_argument("--out", default=None)
    inv.set_defaults(func=cmd_invert_check)

    orc = sub.add_parser("oracle", help="brute-force reference computations")
    osub = orc.add_subparsers(dest="oracle_cmd", required=True)
    vd = osub.add_parser("vd", help="variation distance of two .dist files")
    vd.add_argument("a")
    vd.add_argument("b")
    tw = osub.add_parser("twirl", help="Pauli twirl of a channel fixture")
    tw.add_argument("channel")
    tw.add_argument("--tol", type=float, default=1e-9)
    pi = osub.add_parser("p-inco", help="trap failure probability for a run config")
    pi.add_argument("--config", required=True)
    pi.add_argument("--monte-carlo", action="store_true")
    pi.add_argument("--draws", type=int, default=2000)
    det = osub.add_parser("detect", help="sampled trap detection rate for a run config")
    det.add_argument("--config", required=True)
    det.add_argument("--samples", type=int, default=10000)
    bd = osub.add_parser("bound", help="exact VD against twice p_inco for a run config")
    bd.add_argument("--config", required=True)
    for sp in (vd, tw, pi, det, bd):
        sp.add_argument("--out", default=None)
        sp.add_argument("--seed", type=int, default=None)
    orc.set_defaults(func=cmd_oracle)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "threads", 1) is not None and getattr(args, "threads", 1) < 1:
        parser.error("--threads must be at least 1")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE if exc.kind == "parse" else EXIT_VALIDATION
    except CapacityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except NotTwoColourable as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (HqsError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
