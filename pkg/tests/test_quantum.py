"""Quantum predictions, checked against independent constructions."""

import math

import numpy as np
import pytest

from bellsim import quantum as Q
from bellsim.geom import UnitVector3

RNG = np.random.default_rng(20240611)
Z = UnitVector3(0, 0, 1)
X = UnitVector3(1, 0, 0)
PARTIAL = Q.partially_entangled(math.pi / 8)


def random_unit():
    v = RNG.normal(size=3)
    return UnitVector3.normalized(v)


def random_state():
    return Q.TwoQubitPureState.normalized(RNG.normal(size=4) + 1j * RNG.normal(size=4))


def eigvec(n: UnitVector3, s: int):
    """Independent route: eigenvector of n.sigma with eigenvalue s via eigh."""
    w, v = np.linalg.eigh(Q.spin_operator(n))
    return v[:, np.argmin(np.abs(w - s))]


def brute_joint(state, a, b, s, t):
    amp = np.vdot(np.kron(eigvec(a, s), eigvec(b, t)), state.as_array())
    return abs(amp) ** 2


def brute_bob_direction(state, a, s):
    phi = np.kron(eigvec(a, s).conj(), np.eye(2)) @ state.as_array()
    phi = phi / np.linalg.norm(phi)
    return np.array([np.vdot(phi, p @ phi).real for p in Q.PAULI])


# ---- singlet correlator --------------------------------------------------


def test_singlet_correlator_examples():
    assert Q.singlet_correlator(Z, Z) == -1.0
    assert Q.singlet_correlator(Z, X) == 0.0
    assert Q.singlet_correlator(Z, UnitVector3.from_angle(math.pi / 3)) == pytest.approx(-0.5, abs=1e-12)


def test_singlet_matches_spin_convention():
    # up-down minus down-up with |0> = spin up along +z
    assert Q.SINGLET.amplitudes == (0, 1 / math.sqrt(2), -1 / math.sqrt(2), 0)
    for _ in range(50):
        a, b = random_unit(), random_unit()
        assert Q.correlator(Q.SINGLET, a, b) == pytest.approx(Q.singlet_correlator(a, b), abs=1e-12)


# ---- joint probabilities ---------------------------------------------------


def test_joint_prob_examples():
    assert Q.joint_prob(Q.SINGLET, Z, Z, 1, 1) == pytest.approx(0.0, abs=1e-15)
    assert Q.joint_prob(Q.PRODUCT_UP_UP, Z, Z, 1, 1) == pytest.approx(1.0, abs=1e-15)


def test_singlet_closed_form():
    for _ in range(1000):
        a, b = random_unit(), random_unit()
        s, t = RNG.choice([1, -1], size=2)
        expected = (1 - s * t * (a.x * b.x + a.y * b.y + a.z * b.z)) / 4
        assert abs(Q.joint_prob(Q.SINGLET, a, b, int(s), int(t)) - expected) < 1e-12


def test_joint_prob_matches_eigenvector_route():
    for _ in range(200):
        st, a, b = random_state(), random_unit(), random_unit()
        for s in (1, -1):
            for t in (1, -1):
                assert abs(Q.joint_prob(st, a, b, s, t) - brute_joint(st, a, b, s, t)) < 1e-12


def test_normalization_and_marginal_consistency():
    for _ in range(1000):
        st, a, b = random_state(), random_unit(), random_unit()
        table = Q.joint_table(st, a, b)
        assert abs(sum(table.values()) - 1.0) < 1e-12
        for s in (1, -1):
            assert abs(table[s, 1] + table[s, -1] - Q.alice_marginal(st, a, s)) < 1e-12


def test_unnormalized_state_rejected():
    with pytest.raises(ValueError):
        Q.TwoQubitPureState((1, 1, 0, 0))


def test_bad_outcome_rejected():
    with pytest.raises(ValueError):
        Q.joint_prob(Q.SINGLET, Z, Z, 0, 1)


# ---- marginals and conditional states --------------------------------------


def test_alice_marginal_examples():
    for _ in range(20):
        a = random_unit()
        assert Q.alice_marginal(Q.SINGLET, a, 1) == pytest.approx(0.5, abs=1e-12)
        assert Q.alice_marginal(Q.SINGLET, a, -1) == pytest.approx(0.5, abs=1e-12)
    assert Q.alice_marginal(Q.PRODUCT_UP_UP, Z, 1) == pytest.approx(1.0, abs=1e-12)
    assert Q.alice_marginal(PARTIAL, Z, 1) == pytest.approx(math.cos(math.pi / 8) ** 2, abs=1e-12)


def test_bob_direction_examples():
    assert np.allclose(Q.bob_post_measurement_direction(Q.SINGLET, Z, 1).as_array(), [0, 0, -1], atol=1e-12)
    assert np.allclose(Q.bob_post_measurement_direction(Q.PRODUCT_UP_UP, Z, 1).as_array(), [0, 0, 1], atol=1e-12)


def test_bob_direction_partial_state_frozen():
    # frozen from the eigenvector route: Bob is left in cos(pi/8)|0> + sin(pi/8)|1>
    expected = brute_bob_direction(PARTIAL, X, 1)
    assert np.allclose(expected, [math.sqrt(0.5), 0, math.sqrt(0.5)], atol=1e-12)
    got = Q.bob_post_measurement_direction(PARTIAL, X, 1).as_array()
    assert np.allclose(got, [math.sqrt(0.5), 0, math.sqrt(0.5)], atol=1e-12)


def test_bob_direction_matches_eigenvector_route():
    for _ in range(200):
        st, a = random_state(), random_unit()
        for s in (1, -1):
            got = Q.bob_post_measurement_direction(st, a, s).as_array()
            assert abs(np.linalg.norm(got) - 1) < 1e-9
            assert np.allclose(got, brute_bob_direction(st, a, s), atol=1e-9)


def test_conditional_direction_consistency():
    for _ in range(500):
        st, a, b = random_state(), random_unit(), random_unit()
        for s in (1, -1):
            p = Q.alice_marginal(st, a, s)
            cond = (Q.joint_prob(st, a, b, s, 1) - Q.joint_prob(st, a, b, s, -1)) / p
            v = Q.bob_post_measurement_direction(st, a, s)
            assert abs(cond - (v.x * b.x + v.y * b.y + v.z * b.z)) < 1e-10


def test_impossible_conditioning():
    with pytest.raises(Q.ImpossibleConditioningError):
        Q.bob_post_measurement_direction(Q.PRODUCT_UP_UP, Z, -1)


# ---- maximally entangled frames ----------------------------------------------


def test_bob_frame_rotation_reproduces_correlator():
    phi_plus = Q.TwoQubitPureState.normalized([1, 0, 0, 1])
    o = Q.bob_frame_rotation(phi_plus)
    assert np.allclose(o, np.diag([-1, 1, -1]), atol=1e-12)
    for _ in range(50):
        u = np.linalg.qr(RNG.normal(size=(2, 2)) + 1j * RNG.normal(size=(2, 2)))[0]
        st = Q.TwoQubitPureState.normalized(np.kron(np.eye(2), u) @ Q.SINGLET.as_array() * np.exp(1j * RNG.uniform(0, 6)))
        o = Q.bob_frame_rotation(st)
        assert np.allclose(o.T @ o, np.eye(3), atol=1e-12) and np.linalg.det(o) == pytest.approx(1.0)
        a, b = random_unit(), random_unit()
        ob = UnitVector3.normalized(o @ b.as_array())
        assert Q.correlator(st, a, b) == pytest.approx(Q.singlet_correlator(a, ob), abs=1e-12)


def test_bob_frame_rotation_rejects_partial_entanglement():
    assert not Q.is_maximally_entangled(PARTIAL)
    with pytest.raises(ValueError):
        Q.bob_frame_rotation(PARTIAL)


# ---- CHSH ----------------------------------------------------------------


def bell_linear(a, b):
    return -1 + 2 * math.acos(max(-1.0, min(1.0, a.x * b.x + a.y * b.y + a.z * b.z))) / math.pi


def test_chsh_optimal_preset():
    s = Q.CHSH_OPTIMAL
    assert Q.chsh_value(Q.singlet_correlator, s["a"], s["a2"], s["b"], s["b2"]) == pytest.approx(2 * math.sqrt(2), abs=1e-12)
    assert Q.chsh_value(bell_linear, s["a"], s["a2"], s["b"], s["b2"]) == pytest.approx(2.0, abs=1e-12)


def test_chsh_degenerate_settings():
    for _ in range(20):
        a, b = random_unit(), random_unit()
        val = Q.chsh_value(Q.singlet_correlator, a, a, b, b)
        assert val == pytest.approx(2 * abs(Q.singlet_correlator(a, b)), abs=1e-15)
        assert val <= 2 + 1e-15


def test_tsirelson_rail():
    angles = RNG.uniform(0, 2 * math.pi, size=(10_000, 4))
    best = max(
        Q.chsh_value(Q.singlet_correlator, *(UnitVector3.from_angle(t) for t in row)) for row in angles
    )
    assert best <= 2 * math.sqrt(2) + 1e-9
