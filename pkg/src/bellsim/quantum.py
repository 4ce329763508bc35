"""Exact quantum predictions for projective spin measurements on two qubits.

Basis order is |00>, |01>, |10>, |11> with Alice's qubit first; |0> is spin
up along +z. Everything here is dense 4x4 complex linear algebra.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .geom import UnitVector3, dot

NORM_TOL = 1e-12
PURE_TOL = 1e-9

I2 = np.eye(2, dtype=complex)
PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


class ImpossibleConditioningError(ValueError):
    """Conditioning on a measurement outcome that has zero probability."""


@dataclass(frozen=True)
class TwoQubitPureState:
    amplitudes: tuple

    def __post_init__(self):
        amps = tuple(complex(a) for a in self.amplitudes)
        if len(amps) != 4:
            raise ValueError("a two-qubit state needs four amplitudes")
        norm = sum(abs(a) ** 2 for a in amps)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalised (norm^2 = {norm!r})")
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def normalized(cls, amplitudes) -> TwoQubitPureState:
        v = np.asarray(amplitudes, dtype=complex)
        norm = np.linalg.norm(v)
        if norm == 0:
            raise ValueError("zero vector is not a state")
        return cls(tuple(v / norm))

    def as_array(self) -> np.ndarray:
        return np.array(self.amplitudes, dtype=complex)


SINGLET = TwoQubitPureState((0, 1 / math.sqrt(2), -1 / math.sqrt(2), 0))
PRODUCT_UP_UP = TwoQubitPureState((1, 0, 0, 0))


def partially_entangled(angle: float) -> TwoQubitPureState:
    """cos(angle)|00> + sin(angle)|11>."""
    return TwoQubitPureState((math.cos(angle), 0, 0, math.sin(angle)))


@dataclass(frozen=True)
class BlochVector:
    x: float
    y: float
    z: float

    def __post_init__(self):
        if math.sqrt(self.x**2 + self.y**2 + self.z**2) > 1 + NORM_TOL:
            raise ValueError("Bloch vector longer than 1")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])


def spin_operator(n: UnitVector3) -> np.ndarray:
    return n.x * PAULI[0] + n.y * PAULI[1] + n.z * PAULI[2]


def projector(n: UnitVector3, outcome: int) -> np.ndarray:
    """(I + outcome * n.sigma) / 2."""
    _check_sign(outcome)
    return (I2 + outcome * spin_operator(n)) / 2


def _check_sign(s):
    if s not in (1, -1):
        raise ValueError(f"outcome must be +1 or -1, got {s!r}")


def _vector(state: TwoQubitPureState) -> np.ndarray:
    psi = state.as_array()
    if abs(np.vdot(psi, psi).real - 1.0) > NORM_TOL:
        raise ValueError("state is not normalised")
    return psi


def singlet_correlator(a: UnitVector3, b: UnitVector3) -> float:
    return -dot(a, b)


def joint_prob(state: TwoQubitPureState, a: UnitVector3, b: UnitVector3, alpha: int, beta: int) -> float:
    psi = _vector(state)
    op = np.kron(projector(a, alpha), projector(b, beta))
    return float(np.vdot(psi, op @ psi).real)


def joint_table(state: TwoQubitPureState, a: UnitVector3, b: UnitVector3) -> dict:
    """All four cells keyed by (alpha, beta)."""
    return {(s, t): joint_prob(state, a, b, s, t) for s in (1, -1) for t in (1, -1)}


def correlator(state: TwoQubitPureState, a: UnitVector3, b: UnitVector3) -> float:
    """<alpha beta> for any pure state."""
    psi = _vector(state)
    return float(np.vdot(psi, np.kron(spin_operator(a), spin_operator(b)) @ psi).real)


def alice_marginal(state: TwoQubitPureState, a: UnitVector3, alpha: int) -> float:
    psi = _vector(state)
    op = np.kron(projector(a, alpha), I2)
    return float(np.vdot(psi, op @ psi).real)


def bob_post_measurement_direction(state: TwoQubitPureState, a: UnitVector3, alpha: int) -> UnitVector3:
    """Bloch direction of Bob's qubit after Alice measures ``a`` and sees ``alpha``."""
    psi = _vector(state)
    post = (np.kron(projector(a, alpha), I2) @ psi).reshape(2, 2)
    rho = post.T @ post.conj()  # rho[j, k] = sum_i post[i, j] conj(post[i, k])
    p = float(np.trace(rho).real)
    if p <= NORM_TOL:
        raise ImpossibleConditioningError(f"outcome {alpha:+d} along a has probability {p:.3g}")
    rho = rho / p
    bloch = np.array([np.trace(rho @ s).real for s in PAULI])
    norm = float(np.linalg.norm(bloch))
    if abs(norm - 1.0) > PURE_TOL:
        raise ValueError(f"conditional state is not pure (|r| = {norm})")
    return UnitVector3.from_array(bloch / norm)


def is_maximally_entangled(state: TwoQubitPureState, tol: float = 1e-9) -> bool:
    m = state.as_array().reshape(2, 2) * math.sqrt(2)
    return bool(np.max(np.abs(m.conj().T @ m - I2)) < tol)


def bob_frame_rotation(state: TwoQubitPureState) -> np.ndarray:
    """SO(3) matrix O with  <state| A (x) (b.sigma) |state> = <singlet| A (x) ((O b).sigma) |singlet>.

    Any maximally entangled state equals (I (x) U)|singlet> up to phase;
    O is the adjoint action of U^dagger on Bloch vectors.
    """
    if not is_maximally_entangled(state):
        raise ValueError("state is not maximally entangled")
    m = state.as_array().reshape(2, 2)
    s = SINGLET.as_array().reshape(2, 2)
    u = (np.linalg.inv(s) @ m).T
    ud = u.conj().T
    return np.array([[0.5 * np.trace(PAULI[i] @ ud @ PAULI[j] @ u).real for j in range(3)] for i in range(3)])


# ---------------------------------------------------------------------------
# CHSH


def chsh_value(
    corr: Callable[[UnitVector3, UnitVector3], float],
    a: UnitVector3,
    a2: UnitVector3,
    b: UnitVector3,
    b2: UnitVector3,
) -> float:
    """|E(a,b) - E(a,b2) + E(a2,b) + E(a2,b2)|."""
    return abs(corr(a, b) - corr(a, b2) + corr(a2, b) + corr(a2, b2))


def _deg(d):
    return UnitVector3.from_angle(math.radians(d))


# coplanar x-z settings that saturate Tsirelson's bound for the singlet
CHSH_OPTIMAL = {"a": _deg(0), "a2": _deg(90), "b": _deg(45), "b2": _deg(135)}
TSIRELSON = 2 * math.sqrt(2)
CLASSICAL_BOUND = 2.0
