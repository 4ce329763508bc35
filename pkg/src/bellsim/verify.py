"""The acceptance gates, runnable as one suite.

Absolute tolerances are pinned at n = 10**6. The quick suite runs at
n = 10**5 and widens each statistical tolerance by the matching power of
sqrt(10**6 / n), so both suites gate at the same number of standard errors.
"""

from __future__ import annotations

import math
from dataclasses import replace

import numpy as np

from . import harness as H
from . import quantum as Q
from .geom import UnitVector3
from .records import OutputRecord

SUITES = {"quick": 10**5, "full": 10**6}
REFERENCE_N = 10**6

# four-decimal regression constant for the communication-entropy integral
ENTROPY_CONSTANT = 0.8505

Z = UnitVector3(0.0, 0.0, 1.0)
X = UnitVector3(1.0, 0.0, 0.0)
SKEW = UnitVector3(0.48, 0.6, 0.64)


def _deg(d):
    return UnitVector3.from_angle(math.radians(d))


def _at_dot(a: UnitVector3, d: float) -> UnitVector3:
    """A unit vector with a . b = d, tilted away from ``a`` in a fixed way."""
    av = a.as_array()
    helper = np.array([0.0, 0.0, 1.0]) if abs(av[2]) < 0.9 else np.array([1.0, 0.0, 0.0])
    w = np.cross(av, helper)
    w /= np.linalg.norm(w)
    return UnitVector3.normalized(d * av + math.sqrt(max(0.0, 1 - d * d)) * w)


def _vec(u: UnitVector3):
    return [u.x, u.y, u.z]


class Suite:
    def __init__(self, suite: str = "full", seed: int = 7, threads=None):
        if suite not in SUITES:
            raise ValueError(f"unknown suite {suite!r}")
        self.suite = suite
        self.seed = seed
        self.n = SUITES[suite]
        self.threads = threads
        self.scale = math.sqrt(REFERENCE_N / self.n)

    def cfg(self, protocol, **kw) -> H.ScenarioConfig:
        return H.ScenarioConfig(protocol, self.n, self.seed, threads=self.threads, **kw)

    def rec(self, criterion, scenario, result, oracle, tol, passed, **kw) -> OutputRecord:
        params = {"criterion": criterion, **kw.pop("params", {})}
        return OutputRecord(
            scenario=scenario, seed=self.seed, n=kw.pop("n", self.n), result=float(result),
            oracle=None if oracle is None else float(oracle),
            tolerance=None if tol is None else float(tol), passed=bool(passed), params=params, **kw,
        )

    # 1
    def correlator_curve(self):
        tol = 0.005 * self.scale
        cfg = self.cfg("toner_bacon")
        for theta, est, oracle in H.sweep_correlator(cfg, [math.radians(d) for d in (0, 30, 45, 60, 90, 120, 150, 180)]):
            yield self.rec(1, "correlator_curve", est.mean, oracle, tol, abs(est.mean - oracle) < tol,
                           stderr=est.stderr, params={"angle_deg": round(math.degrees(theta), 9)})

    # 2
    def perfect_anticorrelation(self):
        for a in (Z, SKEW):
            r = H.simulate_rounds(self.cfg("toner_bacon"), a, a)
            bad = int(np.count_nonzero(r["alpha"].astype(np.int64) * r["beta"] != -1))
            yield self.rec(2, "perfect_anticorrelation", bad, 0, 0, bad == 0,
                           params={"a": _vec(a)}, details={"rounds_violating": bad})

    # 3
    def zero_marginals(self):
        tol = 0.005 * self.scale
        for a, b in ((Z, Z), (Z, X), (SKEW, _deg(60))):
            ea, eb = H.estimate_marginals(self.cfg("toner_bacon"), a, b)
            for name, e in (("alpha", ea), ("beta", eb)):
                yield self.rec(3, f"zero_marginal_{name}", e.mean, 0.0, tol, abs(e.mean) < tol,
                               stderr=e.stderr, params={"a": _vec(a), "b": _vec(b)})

    # 4
    def chsh(self):
        tol = 0.02 * self.scale
        s = Q.CHSH_OPTIMAL
        for protocol in ("toner_bacon", "bell_local"):
            cfg = self.cfg(protocol)
            S, err, _ = H.estimate_chsh(cfg)
            oracle = Q.chsh_value(lambda a, b: H.correlator_oracle(cfg, a, b), s["a"], s["a2"], s["b"], s["b2"])
            yield self.rec(4, f"chsh_{protocol}", S, oracle, tol, abs(S - oracle) < tol, stderr=err,
                           n=4 * self.n, details={"classical_bound": Q.CLASSICAL_BOUND, "tsirelson": Q.TSIRELSON})

    # 5
    def teleportation(self):
        tol = 0.005 * self.scale
        for d in (1.0, 0.5, 0.0, -0.5, -1.0):
            b = _deg(math.degrees(math.acos(d)))
            e = H.estimate_teleportation(self.cfg("classical_teleportation"), Z, b)
            oracle = Z.x * b.x + Z.y * b.y + Z.z * b.z
            yield self.rec(5, "teleportation", e.mean, oracle, tol, abs(e.mean - oracle) < tol,
                           stderr=e.stderr, params={"a_dot_b": d})

    # 6
    def partial_entanglement(self):
        states = {
            "singlet": Q.SINGLET,
            "product_00": Q.PRODUCT_UP_UP,
            "cos_pi8_00_sin_pi8_11": Q.partially_entangled(math.pi / 8),
        }
        pairs = ((Z, Z), (X, Z), (SKEW, _deg(60)))
        for name, st in states.items():
            for a, b in pairs:
                rep = H.compare_joint_distribution(self.cfg("partial_entanglement"), st, a, b)
                cells = {f"{c.alpha:+d}{c.beta:+d}": {"empirical": c.empirical, "oracle": c.oracle, "z": c.z}
                         for c in rep.cells}
                yield self.rec(6, "partial_entanglement_max_abs_z", rep.max_abs_z, 0.0, 5.0, rep.max_abs_z < 5.0,
                               params={"state": name, "a": _vec(a), "b": _vec(b)}, details={"cells": cells})

    # 7
    def entropy(self):
        q = H.entropy_integral()
        yield self.rec(7, "entropy_quadrature", q, ENTROPY_CONSTANT, 1e-4, abs(q - ENTROPY_CONSTANT) < 1e-4, n=0)
        tol = 0.01 * self.scale
        cs = H.channel_statistics(self.cfg("toner_bacon"), self.n)
        yield self.rec(7, "entropy_empirical", cs.mean_conditional_entropy, q, tol,
                       abs(cs.mean_conditional_entropy - q) < tol)
        ok = cs.bin_counts >= H.MIN_BIN_COUNT
        centers = 0.5 * (cs.bin_edges[:-1] + cs.bin_edges[1:])
        dev = float(np.max(np.abs(cs.bin_freq_minus[ok] - centers[ok] / math.pi)))
        yield self.rec(7, "channel_bias_tracks_eta_over_pi", dev, 0.0, 0.03, dev < 0.03,
                       details={"bins_used": int(ok.sum())})

    # 8
    def transcript_opacity(self):
        cfg = self.cfg("toner_bacon")
        cs = H.channel_statistics(cfg, self.n)
        tol = 0.005 * self.scale
        yield self.rec(8, "transcript_p_minus", cs.p_minus, 0.5, tol, abs(cs.p_minus - 0.5) < tol)
        mi = H.mutual_information_transcript(cfg, self.n)
        tol_mi = 1e-4 * self.scale**2
        yield self.rec(8, "transcript_mutual_information", mi, 0.0, tol_mi, mi < tol_mi)

    # 9
    def eq2_equivalence(self):
        for d in (0, 45, 90, 135, 180):
            b = _deg(d)
            e2 = H.eq2_estimate(Z, b, self.n, self.seed, threads=self.threads)
            tb = H.estimate_correlator(self.cfg("toner_bacon"), Z, b)
            tol = 5 * math.hypot(e2.stderr, tb.stderr)
            diff = e2.mean - tb.mean
            yield self.rec(9, "eq2_vs_protocol", diff, 0.0, tol, abs(diff) < tol, params={"angle_deg": d},
                           details={"eq2": e2.mean, "eq2_stderr": e2.stderr, "protocol": tb.mean,
                                    "protocol_stderr": tb.stderr})

    # 10
    def rotational_invariance(self):
        pairs = [(Z, _deg(60)), (X, UnitVector3(0.5, math.sqrt(3) / 2, 0.0)), (SKEW, _at_dot(SKEW, 0.5))]
        ests = []
        for k, (a, b) in enumerate(pairs):
            cfg = replace(self.cfg("toner_bacon"), stream_offset=k * self.n)
            ests.append(H.estimate_correlator(cfg, a, b))
        for i in range(3):
            for j in range(i + 1, 3):
                diff = ests[i].mean - ests[j].mean
                tol = 5 * math.hypot(ests[i].stderr, ests[j].stderr)
                yield self.rec(10, "rotational_invariance", diff, 0.0, tol, abs(diff) < tol,
                               params={"pair": [i, j]}, details={"means": [ests[i].mean, ests[j].mean]})

    GATES = (
        correlator_curve, perfect_anticorrelation, zero_marginals, chsh, teleportation,
        partial_entanglement, entropy, transcript_opacity, eq2_equivalence, rotational_invariance,
    )

    def run(self):
        for gate in self.GATES:
            yield from gate(self)


def run_suite(suite: str = "full", seed: int = 7, threads=None) -> list[OutputRecord]:
    return list(Suite(suite, seed, threads).run())
