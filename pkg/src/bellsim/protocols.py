"""Classical protocols that reproduce quantum spin statistics.

Each ``*_round`` function runs one execution as a pure function of the
measurement axes and the shared randomness. The ``*_batch`` functions do
the same arithmetic on arrays of rounds and are what the estimators use;
the test-suite checks the two agree round by round.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import quantum
from .geom import (
    Rotation3,
    RngStream,
    UnitVector3,
    dot,
    sample_rotation,
    sample_unit_vector,
    sgn,
    sgn_array,
)

# Per-round draw layout inside a round's substream. Fixed offsets keep the
# scalar path (RngStream) and the batch path (uniform_block) bit-identical.
SLOT_LAMBDA1 = 0  # 2 uniforms
SLOT_LAMBDA2 = 2  # 2 uniforms
SLOT_ROTATION = 4  # 3 uniforms
SLOT_ALICE_AXIS = 7  # 2 uniforms, for scenarios with a uniformly random a
SLOT_ALICE_OUTCOME = 9  # 1 uniform
SLOT_EQ2 = 10  # 4 uniforms, independent lambda pair for the reduced integrand
SLOTS_PER_ROUND = 14


@dataclass(frozen=True)
class SharedRandomness:
    lambda1: UnitVector3
    lambda2: UnitVector3
    rotation: Optional[Rotation3] = None


@dataclass(frozen=True)
class RoundRecord:
    alpha: int
    beta: int
    transcript: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if self.alpha not in (1, -1) or self.beta not in (1, -1):
            raise ValueError("outputs must be +1 or -1")
        if any(c not in (1, -1) for c in self.transcript):
            raise ValueError("transcript bits must be +1 or -1")


def draw_shared_randomness(rng: RngStream, randomize: bool = False) -> SharedRandomness:
    """Read one round's hidden variables from the start of ``rng``."""
    rng.position = SLOT_LAMBDA1
    lam1 = sample_unit_vector(rng)
    lam2 = sample_unit_vector(rng)
    rot = sample_rotation(rng) if randomize else None
    return SharedRandomness(lam1, lam2, rot)


# ---------------------------------------------------------------------------
# single rounds


def toner_bacon_round(a: UnitVector3, b: UnitVector3, sr: SharedRandomness) -> RoundRecord:
    """One-bit protocol. ``sr.rotation`` is ignored; see :func:`randomize_inputs`."""
    s1 = sgn(dot(a, sr.lambda1))
    c = s1 * sgn(dot(a, sr.lambda2))
    alpha = -s1
    lam = sr.lambda1.as_array() + c * sr.lambda2.as_array()
    beta = sgn(float(b.as_array() @ lam))
    return RoundRecord(alpha, beta, (c,))


def bell_local_round(a: UnitVector3, b: UnitVector3, lam: UnitVector3) -> RoundRecord:
    """Bell's single-vector model; no communication."""
    return RoundRecord(-sgn(dot(a, lam)), sgn(dot(b, lam)), ())


def randomize_inputs(a: UnitVector3, b: UnitVector3, rotation: Rotation3) -> tuple[UnitVector3, UnitVector3]:
    return rotation.apply(a), rotation.apply(b)


def randomized_toner_bacon_round(a: UnitVector3, b: UnitVector3, sr: SharedRandomness) -> RoundRecord:
    if sr.rotation is None:
        return toner_bacon_round(a, b, sr)
    ra, rb = randomize_inputs(a, b, sr.rotation)
    return toner_bacon_round(ra, rb, sr)


def classical_teleportation_round(a: UnitVector3, b: UnitVector3, sr: SharedRandomness) -> RoundRecord:
    """Two-bit protocol for measuring ``b`` on a qubit prepared along ``a``.

    Alice has no outcome here, so ``alpha`` is fixed to +1 and must be ignored.
    """
    c1 = sgn(dot(a, sr.lambda1))
    c2 = sgn(dot(a, sr.lambda2))
    lam = c1 * sr.lambda1.as_array() + c2 * sr.lambda2.as_array()
    return RoundRecord(1, sgn(float(b.as_array() @ lam)), (c1, c2))


def sample_alice_outcome(state: quantum.TwoQubitPureState, a: UnitVector3, u: float) -> int:
    return 1 if u < quantum.alice_marginal(state, a, 1) else -1


def partial_entanglement_round(
    state: quantum.TwoQubitPureState,
    a: UnitVector3,
    b: UnitVector3,
    sr: SharedRandomness,
    rng: RngStream,
) -> RoundRecord:
    """Alice samples her outcome locally, then teleports Bob's conditional state."""
    alpha = sample_alice_outcome(state, a, rng.uniform())
    v = quantum.bob_post_measurement_direction(state, a, alpha)
    tele = classical_teleportation_round(v, b, sr)
    return RoundRecord(alpha, tele.beta, tele.transcript)


def maximally_entangled_inputs(
    state: quantum.TwoQubitPureState, a: UnitVector3, b: UnitVector3
) -> tuple[UnitVector3, UnitVector3]:
    """Map axes for ``state`` onto equivalent singlet axes (Bob's side is rotated)."""
    o = quantum.bob_frame_rotation(state)
    return a, UnitVector3.normalized(o @ b.as_array())


def maximally_entangled_round(
    state: quantum.TwoQubitPureState, a: UnitVector3, b: UnitVector3, sr: SharedRandomness
) -> RoundRecord:
    a2, b2 = maximally_entangled_inputs(state, a, b)
    return toner_bacon_round(a2, b2, sr)


# ---------------------------------------------------------------------------
# batches: vectors are (n, 3) arrays, or a single (3,) axis broadcast


def _dots(v, w):
    return np.einsum("...i,...i->...", v, w)


def toner_bacon_batch(a, b, lam1, lam2):
    """Returns ``(alpha, beta, c)`` int8 arrays."""
    s1 = sgn_array(_dots(a, lam1))
    c = s1 * sgn_array(_dots(a, lam2))
    beta = sgn_array(_dots(b, lam1 + c[:, None] * lam2))
    return -s1, beta, c


def bell_local_batch(a, b, lam):
    return -sgn_array(_dots(a, lam)), sgn_array(_dots(b, lam))


def rotate_batch(rot, v):
    """Apply ``(n, 3, 3)`` rotations to a (3,) or (n, 3) vector."""
    return np.einsum("nij,...j->ni", rot, v) if np.ndim(v) == 1 else np.einsum("nij,nj->ni", rot, v)


def teleportation_batch(a, b, lam1, lam2):
    """Returns ``(beta, c1, c2)``."""
    c1 = sgn_array(_dots(a, lam1))
    c2 = sgn_array(_dots(a, lam2))
    beta = sgn_array(_dots(b, c1[:, None] * lam1 + c2[:, None] * lam2))
    return beta, c1, c2


def eq2_integrand_batch(a, b, lam1, lam2):
    """2 sgn(a.l1) sgn(b.(l2 - l1)): the reduced form of the correlator integrand."""
    return 2 * sgn_array(_dots(a, lam1)).astype(np.int64) * sgn_array(_dots(b, lam2 - lam1))


def partial_entanglement_batch(state, a: UnitVector3, b, lam1, lam2, u_outcome):
    """Returns ``(alpha, beta, c1, c2)`` for rounds with outcome uniforms ``u_outcome``."""
    p_plus = quantum.alice_marginal(state, a, 1)
    alpha = np.where(u_outcome < p_plus, 1, -1).astype(np.int8)
    v = np.empty((len(alpha), 3))
    for s in (1, -1):
        mask = alpha == s
        if mask.any():
            v[mask] = quantum.bob_post_measurement_direction(state, a, s).as_array()
    beta, c1, c2 = teleportation_batch(v, b, lam1, lam2)
    return alpha, beta, c1, c2
