"""Monte Carlo estimators and their comparison against exact predictions.

Round ``i`` of a scenario reads its randomness from substream
``stream_offset + i`` of ``seed``. Rounds are computed in fixed-size chunks
that may run on several threads, then reduced over the full array, so a
result depends only on the configuration, never on the worker count.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy import integrate

from . import protocols as P
from . import quantum
from .geom import UnitVector3, sphere_from_uniforms, rotation_from_uniforms, uniform_block

CHUNK = 1 << 16
PROTOCOLS = (
    "toner_bacon",
    "bell_local",
    "classical_teleportation",
    "partial_entanglement",
    "maximally_entangled",
)
CORRELATOR_PROTOCOLS = ("toner_bacon", "bell_local", "maximally_entangled")
ETA_BINS = 50
MIN_BIN_COUNT = 1000


@dataclass(frozen=True)
class EstimatorResult:
    mean: float
    stderr: float
    n: int

    @classmethod
    def from_samples(cls, x: np.ndarray) -> EstimatorResult:
        n = len(x)
        if n < 1:
            raise ValueError("need at least one sample")
        if np.issubdtype(x.dtype, np.integer):
            mean = int(np.sum(x, dtype=np.int64)) / n
        else:
            mean = float(np.sum(x)) / n
        if n == 1:
            return cls(mean, 0.0, 1)
        dev = x.astype(np.float64) - mean
        var = float(np.dot(dev, dev)) / (n - 1)
        return cls(mean, math.sqrt(var / n), n)

    def z_against(self, target: float) -> float:
        diff = self.mean - target
        if self.stderr == 0.0:
            return 0.0 if diff == 0.0 else math.copysign(math.inf, diff)
        return diff / self.stderr


@dataclass(frozen=True)
class ScenarioConfig:
    protocol: str
    n: int
    seed: int = 0
    randomize: bool = False
    state: Optional[quantum.TwoQubitPureState] = None
    threads: Optional[int] = None
    stream_offset: int = 0

    def __post_init__(self):
        if self.protocol not in PROTOCOLS:
            raise ValueError(f"unknown protocol {self.protocol!r}; choose from {PROTOCOLS}")
        if self.n < 1:
            raise ValueError("n must be at least 1")


def worker_count(cfg: ScenarioConfig) -> int:
    if cfg.threads:
        return max(1, int(cfg.threads))
    env = os.environ.get("BELLSIM_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _map_chunks(cfg: ScenarioConfig, n: int, fn) -> list:
    """Run ``fn(streams)`` over consecutive chunks of stream indices; results in order."""
    bounds = [(s, min(s + CHUNK, n)) for s in range(0, n, CHUNK)]
    streams = [np.arange(cfg.stream_offset + s, cfg.stream_offset + e, dtype=np.uint64) for s, e in bounds]
    workers = min(worker_count(cfg), len(bounds))
    if workers <= 1:
        return [fn(s) for s in streams]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, streams))


def _collect(parts: list) -> tuple:
    return tuple(np.concatenate(cols) for cols in zip(*parts))


def _lambdas(seed, streams, randomize=False):
    u = uniform_block(seed, streams, 0, 7 if randomize else 4)
    lam1 = sphere_from_uniforms(u[:, P.SLOT_LAMBDA1 : P.SLOT_LAMBDA1 + 2])
    lam2 = sphere_from_uniforms(u[:, P.SLOT_LAMBDA2 : P.SLOT_LAMBDA2 + 2])
    rot = rotation_from_uniforms(u[:, P.SLOT_ROTATION : P.SLOT_ROTATION + 3]) if randomize else None
    return lam1, lam2, rot


# ---------------------------------------------------------------------------
# raw rounds


def simulate_rounds(cfg: ScenarioConfig, a: UnitVector3, b: UnitVector3) -> dict:
    """Per-round outputs as arrays: ``alpha``, ``beta`` and ``transcript`` (n, k)."""
    av, bv = a.as_array(), b.as_array()
    if cfg.protocol == "maximally_entangled":
        if cfg.state is None:
            raise ValueError("maximally_entangled needs a state")
        _, b2 = P.maximally_entangled_inputs(cfg.state, a, b)
        bv = b2.as_array()
    if cfg.protocol == "partial_entanglement" and cfg.state is None:
        raise ValueError("partial_entanglement needs a state")

    def chunk(streams):
        lam1, lam2, rot = _lambdas(cfg.seed, streams, cfg.randomize)
        aa, bb = (av, bv) if rot is None else (P.rotate_batch(rot, av), P.rotate_batch(rot, bv))
        m = len(streams)
        if cfg.protocol in ("toner_bacon", "maximally_entangled"):
            alpha, beta, c = P.toner_bacon_batch(aa, bb, lam1, lam2)
            return alpha, beta, c[:, None]
        if cfg.protocol == "bell_local":
            alpha, beta = P.bell_local_batch(aa, bb, lam1)
            return alpha, beta, np.empty((m, 0), dtype=np.int8)
        if cfg.protocol == "classical_teleportation":
            beta, c1, c2 = P.teleportation_batch(aa, bb, lam1, lam2)
            return np.ones(m, dtype=np.int8), beta, np.stack([c1, c2], axis=1)
        # partial entanglement: axes are used as given, rotation is not applied
        u = uniform_block(cfg.seed, streams, P.SLOT_ALICE_OUTCOME, 1)[:, 0]
        alpha, beta, c1, c2 = P.partial_entanglement_batch(cfg.state, a, bv, lam1, lam2, u)
        return alpha, beta, np.stack([c1, c2], axis=1)

    alpha, beta, transcript = _collect(_map_chunks(cfg, cfg.n, chunk))
    return {"alpha": alpha, "beta": beta, "transcript": transcript}


# ---------------------------------------------------------------------------
# oracles


@lru_cache(maxsize=None)
def bell_local_oracle(theta: float) -> float:
    """Correlator of the single-vector local model at angle ``theta``, by quadrature.

    With a along z, integrates over z = a.lambda the azimuthal fraction on
    which b.lambda >= 0. The result tracks -1 + 2 theta / pi.
    """
    st, ct = math.sin(theta), math.cos(theta)

    def azimuthal_mean_sign_b(z):
        r = math.sqrt(max(0.0, 1.0 - z * z))
        if st * r < 1e-300:
            return 1.0 if ct * z >= 0 else -1.0
        t = -z * ct / (st * r)
        frac = math.acos(min(1.0, max(-1.0, t))) / math.pi
        return 2.0 * frac - 1.0

    pts = sorted({-abs(st), 0.0, abs(st)} - {-1.0, 1.0})
    val, _ = integrate.quad(
        lambda z: (1.0 if z >= 0 else -1.0) * azimuthal_mean_sign_b(z),
        -1.0,
        1.0,
        points=pts,
        epsabs=1e-13,
        epsrel=1e-13,
        limit=200,
    )
    return -0.5 * val


def correlator_oracle(cfg: ScenarioConfig, a: UnitVector3, b: UnitVector3) -> float:
    if cfg.protocol == "bell_local":
        return bell_local_oracle(math.acos(max(-1.0, min(1.0, a.x * b.x + a.y * b.y + a.z * b.z))))
    if cfg.protocol == "maximally_entangled":
        return quantum.correlator(cfg.state, a, b)
    return quantum.singlet_correlator(a, b)


# ---------------------------------------------------------------------------
# estimators


def estimate_correlator(cfg: ScenarioConfig, a: UnitVector3, b: UnitVector3) -> EstimatorResult:
    if cfg.protocol not in CORRELATOR_PROTOCOLS:
        raise ValueError(f"correlator estimation not defined for {cfg.protocol!r}")
    r = simulate_rounds(cfg, a, b)
    return EstimatorResult.from_samples(r["alpha"].astype(np.int64) * r["beta"])


def estimate_marginals(cfg: ScenarioConfig, a: UnitVector3, b: UnitVector3) -> tuple[EstimatorResult, EstimatorResult]:
    r = simulate_rounds(cfg, a, b)
    return EstimatorResult.from_samples(r["alpha"]), EstimatorResult.from_samples(r["beta"])


def sweep_correlator(cfg: ScenarioConfig, angles) -> list[tuple[float, EstimatorResult, float]]:
    """Estimate at a = z, b = (sin t, 0, cos t) for each angle ``t`` in radians."""
    a = UnitVector3(0.0, 0.0, 1.0)
    out = []
    for theta in angles:
        if not 0.0 <= theta <= math.pi:
            raise ValueError(f"angle {theta} outside [0, pi]")
        b = UnitVector3.from_angle(theta)
        out.append((theta, estimate_correlator(cfg, a, b), correlator_oracle(cfg, a, b)))
    return out


def estimate_teleportation(cfg: ScenarioConfig, a: UnitVector3, b: UnitVector3) -> EstimatorResult:
    if cfg.protocol != "classical_teleportation":
        raise ValueError("estimate_teleportation needs protocol='classical_teleportation'")
    return EstimatorResult.from_samples(simulate_rounds(cfg, a, b)["beta"])


def estimate_chsh(cfg: ScenarioConfig, settings: Optional[dict] = None) -> tuple[float, float, dict]:
    """CHSH value from four independent correlator estimates.

    Each setting pair uses its own block of ``cfg.n`` substreams. Returns
    ``(S, stderr, {name: EstimatorResult})``.
    """
    s = settings or quantum.CHSH_OPTIMAL
    pairs = {"ab": (s["a"], s["b"]), "ab2": (s["a"], s["b2"]), "a2b": (s["a2"], s["b"]), "a2b2": (s["a2"], s["b2"])}
    res = {}
    for k, (x, y) in enumerate(pairs.values()):
        sub = replace(cfg, stream_offset=cfg.stream_offset + k * cfg.n)
        res[list(pairs)[k]] = estimate_correlator(sub, x, y)
    S = abs(res["ab"].mean - res["ab2"].mean + res["a2b"].mean + res["a2b2"].mean)
    err = math.sqrt(sum(r.stderr**2 for r in res.values()))
    return S, err, res


@dataclass(frozen=True)
class CellComparison:
    alpha: int
    beta: int
    empirical: float
    oracle: float
    z: float


@dataclass(frozen=True)
class JointReport:
    cells: tuple
    n: int

    @property
    def max_abs_z(self) -> float:
        return max(abs(c.z) for c in self.cells)


def _is_singlet(state: quantum.TwoQubitPureState) -> bool:
    return abs(abs(np.vdot(quantum.SINGLET.as_array(), state.as_array())) - 1.0) < 1e-9


def compare_joint_distribution(
    cfg: ScenarioConfig, state: quantum.TwoQubitPureState, a: UnitVector3, b: UnitVector3
) -> JointReport:
    """Empirical (alpha, beta) frequencies against the quantum joint probabilities.

    z-scores use the binomial standard error at the predicted probability.
    """
    if cfg.protocol == "toner_bacon" and not _is_singlet(state):
        raise ValueError("toner_bacon only simulates the singlet; use partial_entanglement")
    if cfg.protocol not in ("toner_bacon", "partial_entanglement", "maximally_entangled"):
        raise ValueError(f"joint distribution not defined for {cfg.protocol!r}")
    run_cfg = cfg if cfg.protocol == "toner_bacon" else replace(cfg, state=state)
    r = simulate_rounds(run_cfg, a, b)
    n = cfg.n
    cells = []
    for s in (1, -1):
        for t in (1, -1):
            count = int(np.count_nonzero((r["alpha"] == s) & (r["beta"] == t)))
            emp = count / n
            p = quantum.joint_prob(state, a, b, s, t)
            p = min(1.0, max(0.0, p))
            se = math.sqrt(p * (1 - p) / n)
            if se < 1e-15:
                z = 0.0 if abs(emp - p) < 1e-12 else math.inf
            else:
                z = (emp - p) / se
            cells.append(CellComparison(s, t, emp, p, z))
    return JointReport(tuple(cells), n)


def eq2_estimate(a: UnitVector3, b: UnitVector3, n: int, seed: int, threads: Optional[int] = None) -> EstimatorResult:
    """Monte Carlo mean of 2 sgn(a.l1) sgn(b.(l2 - l1)) over independent uniform l1, l2.

    Draws from a slot range disjoint from the protocol's hidden variables.
    """
    cfg = ScenarioConfig("toner_bacon", n, seed, threads=threads)
    av, bv = a.as_array(), b.as_array()

    def chunk(streams):
        u = uniform_block(seed, streams, P.SLOT_EQ2, 4)
        lam1 = sphere_from_uniforms(u[:, 0:2])
        lam2 = sphere_from_uniforms(u[:, 2:4])
        return (P.eq2_integrand_batch(av, bv, lam1, lam2),)

    (vals,) = _collect(_map_chunks(cfg, n, chunk))
    return EstimatorResult.from_samples(vals)


# ---------------------------------------------------------------------------
# communication cost


def binary_entropy(p):
    """Shannon entropy in bits of a bit with bias ``p``; array-friendly, H(0) = H(1) = 0."""
    p = np.asarray(p, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        h = -p * np.log2(p) - (1 - p) * np.log2(1 - p)
    h = np.where((p <= 0) | (p >= 1), 0.0, h)
    return float(h) if h.ndim == 0 else h


def entropy_integrand(eta):
    return np.sin(eta) * binary_entropy(np.asarray(eta) / np.pi)


def _simpson(f, lo, hi, intervals):
    x = np.linspace(lo, hi, intervals + 1)
    y = f(x)
    h = (hi - lo) / intervals
    return h / 3 * (y[0] + y[-1] + 4 * y[1:-1:2].sum() + 2 * y[2:-1:2].sum())


def entropy_integral(points: int = 64, tol: float = 1e-10, max_doublings: int = 20) -> float:
    """Integral of sin(eta) H(eta/pi) over [0, pi/2], in bits.

    Composite Simpson starting at ``points`` intervals, doubled until
    successive estimates agree to ``tol``, then Richardson-extrapolated.
    """
    if points < 10:
        raise ValueError("need at least 10 quadrature points")
    m = points + (points % 2)
    prev = _simpson(entropy_integrand, 0.0, math.pi / 2, m)
    for _ in range(max_doublings):
        m *= 2
        cur = _simpson(entropy_integrand, 0.0, math.pi / 2, m)
        if abs(cur - prev) < tol:
            return float(cur + (cur - prev) / 15)
        prev = cur
    raise RuntimeError("entropy quadrature did not converge")


@dataclass(frozen=True)
class ChannelStats:
    bit_counts: dict  # transcript bit -> count
    bin_edges: np.ndarray
    bin_counts: np.ndarray
    bin_freq_minus: np.ndarray  # NaN where a bin is empty
    mean_conditional_entropy: float
    p_minus: float
    n: int = field(default=0)


def _uniform_alice_rounds(cfg: ScenarioConfig, n: int):
    """Toner-Bacon rounds with Alice's axis uniform per round: (alpha, c, eta)."""

    def chunk(streams):
        u = uniform_block(cfg.seed, streams, 0, P.SLOT_ALICE_AXIS + 2)
        lam1 = sphere_from_uniforms(u[:, P.SLOT_LAMBDA1 : P.SLOT_LAMBDA1 + 2])
        lam2 = sphere_from_uniforms(u[:, P.SLOT_LAMBDA2 : P.SLOT_LAMBDA2 + 2])
        a = sphere_from_uniforms(u[:, P.SLOT_ALICE_AXIS : P.SLOT_ALICE_AXIS + 2])
        alpha, _, c = P.toner_bacon_batch(a, a, lam1, lam2)
        eta = np.arccos(np.clip(np.einsum("ni,ni->n", lam1, lam2), -1.0, 1.0))
        return alpha, c, eta

    return _collect(_map_chunks(replace(cfg, n=n), n, chunk))


def channel_statistics(cfg: ScenarioConfig, n: int) -> ChannelStats:
    if cfg.protocol != "toner_bacon":
        raise ValueError("channel statistics are defined for the toner_bacon protocol")
    _, c, eta = _uniform_alice_rounds(cfg, n)
    edges = np.linspace(0.0, math.pi, ETA_BINS + 1)
    idx = np.minimum(np.searchsorted(edges, eta, side="right") - 1, ETA_BINS - 1)
    counts = np.bincount(idx, minlength=ETA_BINS)
    minus = np.bincount(idx, weights=(c == -1), minlength=ETA_BINS)
    with np.errstate(invalid="ignore", divide="ignore"):
        freq = np.where(counts > 0, minus / np.maximum(counts, 1), np.nan)
    h = binary_entropy(np.nan_to_num(freq))
    mean_h = float(np.dot(counts, h)) / n
    n_minus = int(np.count_nonzero(c == -1))
    return ChannelStats(
        bit_counts={1: n - n_minus, -1: n_minus},
        bin_edges=edges,
        bin_counts=counts,
        bin_freq_minus=freq,
        mean_conditional_entropy=mean_h,
        p_minus=n_minus / n,
        n=n,
    )


def plugin_mutual_information(x: np.ndarray, y: np.ndarray) -> float:
    """Plug-in I(x; y) in bits for two +/-1 sequences."""
    n = len(x)
    table = np.array([[np.count_nonzero((x == s) & (y == t)) for t in (1, -1)] for s in (1, -1)], dtype=float) / n
    px, py = table.sum(axis=1), table.sum(axis=0)
    mi = 0.0
    for i in range(2):
        for j in range(2):
            if table[i, j] > 0:
                mi += table[i, j] * math.log2(table[i, j] / (px[i] * py[j]))
    return max(0.0, mi)


def mutual_information_transcript(cfg: ScenarioConfig, n: int) -> float:
    """Plug-in I(c; alpha) with Alice's axis uniform per round."""
    if cfg.protocol != "toner_bacon":
        raise ValueError("transcript information is defined for the toner_bacon protocol")
    alpha, c, _ = _uniform_alice_rounds(cfg, n)
    return plugin_mutual_information(c, alpha)
