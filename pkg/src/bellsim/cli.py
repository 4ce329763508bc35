"""Command-line entry point.

Exit codes: 0 when every gate passes, 1 on usage errors, 2 when a
statistical gate fails. Records go to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time

import numpy as np

from . import harness as H
from . import quantum as Q
from .geom import UnitVector3
from .records import OutputRecord, to_csv, to_json
from .verify import ENTROPY_CONSTANT, REFERENCE_N, run_suite



def _diag(msg: str) -> None:
    print(f"bellsim: {msg}", file=sys.stderr)

EXIT_OK, EXIT_USAGE, EXIT_GATE = 0, 1, 2

PROTOCOL_NAMES = {
    "toner-bacon": "toner_bacon",
    "bell-local": "bell_local",
    "teleport": "classical_teleportation",
    "partial": "partial_entanglement",
    "maximally-entangled": "maximally_entangled",
}

DEFAULTS = {
    "simulate": {"protocol": "toner-bacon", "n": 100_000, "seed": 0, "randomize": False, "format": "json"},
    "chsh": {"protocol": "toner-bacon", "n": 100_000, "seed": 0, "preset": "optimal", "format": "json"},
    "entropy": {"n": 100_000, "seed": 0, "quadrature_only": False, "format": "json"},
    "verify": {"suite": "quick", "seed": 7, "format": "json"},
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="bellsim", description="Classical simulation of Bell-pair measurement statistics.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, n=True):
        if n:
            sp.add_argument("--n", type=int, help="rounds per estimate")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--format", choices=("json", "csv"))
        sp.add_argument("--threads", type=int, help="worker cap (overrides BELLSIM_THREADS)")
        sp.add_argument("--config", help="JSON file with the same fields as the flags")
        sp.add_argument("--timing", action="store_true", default=None, help="add wall_time to records")

    sim = sub.add_parser("simulate", help="estimate one protocol against its prediction")
    sim.add_argument("--protocol", choices=tuple(PROTOCOL_NAMES))
    g = sim.add_mutually_exclusive_group()
    g.add_argument("--angle", type=float, nargs="+", help="angle(s) between a and b, degrees")
    g.add_argument("--axes", type=float, nargs=6, metavar=("AX", "AY", "AZ", "BX", "BY", "BZ"))
    sim.add_argument("--state", type=complex, nargs=4, metavar="AMP",
                     help="amplitudes of |00>,|01>,|10>,|11> (partial, maximally-entangled)")
    sim.add_argument("--randomize", action="store_true", default=None, help="random rotation of both axes per round")
    common(sim)

    ch = sub.add_parser("chsh", help="CHSH value at a preset of settings")
    ch.add_argument("--protocol", choices=("toner-bacon", "bell-local"))
    ch.add_argument("--preset", choices=("optimal", "degenerate"))
    common(ch)

    en = sub.add_parser("entropy", help="communication entropy and transcript statistics")
    en.add_argument("--quadrature-only", action="store_true", default=None)
    common(en)

    ve = sub.add_parser("verify", help="run every acceptance gate")
    ve.add_argument("--suite", choices=("quick", "full"))
    common(ve, n=False)
    return p


def _resolve(args) -> argparse.Namespace:
    """Fill unset flags from --config, then from DEFAULTS."""
    cfg = {}
    if args.config:
        try:
            with open(args.config) as fh:
                cfg = json.load(fh)
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(cfg, dict):
            raise UsageError("config file must hold a JSON object")
    known = vars(args)
    for key, value in cfg.items():
        key = key.replace("-", "_")
        if key not in known:
            raise UsageError(f"unknown config field {key!r}")
        if known[key] is None:
            setattr(args, key, value)
    for key, value in DEFAULTS[args.command].items():
        if getattr(args, key, None) is None:
            setattr(args, key, value)
    return args


def _unit(v, label) -> UnitVector3:
    v = np.asarray(v, dtype=float)
    norm = float(np.linalg.norm(v))
    if norm == 0 or not math.isfinite(norm):
        raise UsageError(f"axis {label} must be a finite non-zero vector")
    if abs(norm - 1.0) > 1e-6:
        _diag(f"axis {label} has norm {norm:.6g}; normalising")
    return UnitVector3.normalized(v)


def _axes_list(args):
    if args.axes is not None:
        a = _unit(args.axes[:3], "a")
        b = _unit(args.axes[3:], "b")
        return [({"a": [a.x, a.y, a.z], "b": [b.x, b.y, b.z]}, a, b)]
    if args.angle is None:
        raise UsageError("simulate needs --angle or --axes")
    out = []
    a = UnitVector3(0.0, 0.0, 1.0)
    for deg in args.angle:
        if not 0.0 <= deg <= 180.0:
            raise UsageError(f"angle {deg} outside [0, 180] degrees")
        out.append(({"angle_deg": deg}, a, UnitVector3.from_angle(math.radians(deg))))
    return out


def _state(args):
    if args.state is None:
        return None
    try:
        return Q.TwoQubitPureState.normalized(args.state)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _mean_gate(mean, stderr, oracle, n):
    """5 standard errors of a +/-1 mean at the predicted value."""
    tol = max(5.0 * math.sqrt(max(0.0, 1.0 - oracle * oracle) / n), 1e-12)
    return tol, abs(mean - oracle) < tol


def cmd_simulate(args):
    protocol = PROTOCOL_NAMES[args.protocol]
    state = _state(args)
    if protocol in ("partial_entanglement", "maximally_entangled"):
        state = state or Q.SINGLET
        if protocol == "maximally_entangled" and not Q.is_maximally_entangled(state):
            raise UsageError("--state is not maximally entangled")
    elif state is not None:
        raise UsageError(f"--state does not apply to --protocol {args.protocol}")
    if args.randomize and protocol == "partial_entanglement":
        raise UsageError("--randomize is not supported for --protocol partial")
    if args.n < 1:
        raise UsageError("--n must be positive")
    cfg = H.ScenarioConfig(protocol, args.n, args.seed, bool(args.randomize), state, args.threads)
    base = {"protocol": args.protocol, "randomize": bool(args.randomize)}
    for params, a, b in _axes_list(args):
        params = {**base, **params}
        if protocol in H.CORRELATOR_PROTOCOLS:
            est = H.estimate_correlator(cfg, a, b)
            oracle = H.correlator_oracle(cfg, a, b)
            tol, ok = _mean_gate(est.mean, est.stderr, oracle, cfg.n)
            details = {"quantum_oracle": Q.singlet_correlator(a, b)} if protocol == "bell_local" else {}
            yield OutputRecord(f"simulate/{args.protocol}", args.seed, cfg.n, est.mean, oracle, tol, ok,
                               est.stderr, params, details)
        elif protocol == "classical_teleportation":
            est = H.estimate_teleportation(cfg, a, b)
            oracle = a.x * b.x + a.y * b.y + a.z * b.z
            tol, ok = _mean_gate(est.mean, est.stderr, oracle, cfg.n)
            yield OutputRecord("simulate/teleport", args.seed, cfg.n, est.mean, oracle, tol, ok, est.stderr, params)
        else:
            rep = H.compare_joint_distribution(cfg, state, a, b)
            cells = {f"{c.alpha:+d}{c.beta:+d}": {"empirical": c.empirical, "oracle": c.oracle, "z": c.z}
                     for c in rep.cells}
            params["state"] = [[z.real, z.imag] for z in state.amplitudes]
            yield OutputRecord("simulate/partial", args.seed, cfg.n, rep.max_abs_z, 0.0, 5.0, rep.max_abs_z < 5.0,
                               None, params, {"cells": cells})


def cmd_chsh(args):
    protocol = PROTOCOL_NAMES[args.protocol]
    if args.n < 1:
        raise UsageError("--n must be positive")
    cfg = H.ScenarioConfig(protocol, args.n, args.seed, threads=args.threads)
    z = UnitVector3(0.0, 0.0, 1.0)
    settings = Q.CHSH_OPTIMAL if args.preset == "optimal" else {"a": z, "a2": z, "b": z, "b2": z}
    S, err, parts = H.estimate_chsh(cfg, settings)
    oracle = Q.chsh_value(lambda a, b: H.correlator_oracle(cfg, a, b), settings["a"], settings["a2"], settings["b"], settings["b2"])
    tol = max(5 * err, 1e-12)
    details = {
        "classical_bound": Q.CLASSICAL_BOUND,
        "tsirelson": Q.TSIRELSON,
        "correlators": {k: {"mean": r.mean, "stderr": r.stderr} for k, r in parts.items()},
    }
    yield OutputRecord(f"chsh/{args.protocol}", args.seed, 4 * cfg.n, S, oracle, tol, abs(S - oracle) < tol, err,
                       {"preset": args.preset}, details)


def cmd_entropy(args):
    q = H.entropy_integral()
    yield OutputRecord("entropy/quadrature", None, 0, q, ENTROPY_CONSTANT, 1e-4, abs(q - ENTROPY_CONSTANT) < 1e-4)
    if args.quadrature_only:
        return
    if args.n < 1:
        raise UsageError("--n must be positive unless --quadrature-only")
    cfg = H.ScenarioConfig("toner_bacon", args.n, args.seed, threads=args.threads)
    cs = H.channel_statistics(cfg, args.n)
    scale = math.sqrt(REFERENCE_N / args.n)
    tol = 0.01 * scale
    yield OutputRecord("entropy/empirical", args.seed, args.n, cs.mean_conditional_entropy, q, tol,
                       abs(cs.mean_conditional_entropy - q) < tol,
                       details={"bit_counts": {str(k): v for k, v in cs.bit_counts.items()}})
    tol = 0.005 * scale
    yield OutputRecord("entropy/p_minus", args.seed, args.n, cs.p_minus, 0.5, tol, abs(cs.p_minus - 0.5) < tol)
    mi = H.mutual_information_transcript(cfg, args.n)
    tol = 1e-4 * scale**2
    yield OutputRecord("entropy/mutual_information", args.seed, args.n, mi, 0.0, tol, mi < tol)


def cmd_verify(args):
    yield from run_suite(args.suite, args.seed, args.threads)


COMMANDS = {"simulate": cmd_simulate, "chsh": cmd_chsh, "entropy": cmd_entropy, "verify": cmd_verify}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args = _resolve(args)
        if args.command in ("simulate", "chsh") and args.protocol not in PROTOCOL_NAMES:
            raise UsageError(f"unknown protocol {args.protocol!r}")
        records = []
        t0 = time.perf_counter()
        for rec in COMMANDS[args.command](args):
            if args.timing:
                rec.wall_time = time.perf_counter() - t0
                t0 = time.perf_counter()
            records.append(rec)
            if args.format == "json":
                sys.stdout.write(to_json(rec) + "\n")
                sys.stdout.flush()
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"bellsim: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.format == "csv":
        sys.stdout.write(to_csv(records))
    failed = [r.scenario for r in records if not r.passed]
    if failed:
        _diag(f"{len(failed)} of {len(records)} gates failed: {', '.join(failed)}")
        return EXIT_GATE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
