import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from bellsim.geom import (
    Rotation3,
    RngStream,
    UnitVector3,
    dot,
    rotation_from_uniforms,
    sample_rotation,
    sample_unit_vector,
    sgn,
    sgn_array,
    sphere_from_uniforms,
    uniform_block,
)

N = 10**6

finite = st.floats(allow_nan=False, allow_infinity=False)


@st.composite
def unit_vectors(draw):
    v = np.array([draw(st.floats(-1, 1)) for _ in range(3)])
    if np.linalg.norm(v) < 1e-3:
        v = np.array([0.0, 0.0, 1.0])
    return UnitVector3.normalized(v)


# ---- sgn -----------------------------------------------------------------


@pytest.mark.parametrize("x, expected", [(0.0, 1), (-0.0, 1), (-0.3, -1), (2.5, 1), (-1e-300, -1)])
def test_sgn_examples(x, expected):
    assert sgn(x) == expected


@pytest.mark.parametrize("bad", [math.nan, math.inf, -math.inf])
def test_sgn_rejects_non_finite(bad):
    with pytest.raises(ValueError):
        sgn(bad)
    with pytest.raises(ValueError):
        sgn_array(np.array([0.0, bad]))


@given(finite)
def test_sgn_idempotent(x):
    assert sgn(sgn(x) * 1.0) == sgn(x)


@given(st.lists(finite, min_size=1, max_size=50))
def test_sgn_array_matches_scalar(xs):
    assert sgn_array(np.array(xs)).tolist() == [sgn(x) for x in xs]


# ---- types ---------------------------------------------------------------


def test_unit_vector_rejects_non_unit():
    with pytest.raises(ValueError):
        UnitVector3(1.0, 1.0, 0.0)
    with pytest.raises(ValueError):
        UnitVector3.normalized([0, 0, 0])


def test_rotation_rejects_reflection_and_non_orthogonal():
    with pytest.raises(ValueError):
        Rotation3(((1, 0, 0), (0, 1, 0), (0, 0, -1)))
    with pytest.raises(ValueError):
        Rotation3(((1, 0.1, 0), (0, 1, 0), (0, 0, 1)))


@pytest.mark.parametrize(
    "u, v, expected",
    [
        ((0, 0, 1), (0, 0, 1), 1.0),
        ((0, 0, 1), (1, 0, 0), 0.0),
        ((0, 0, 1), (math.sin(math.pi / 3), 0, math.cos(math.pi / 3)), 0.5),
    ],
)
def test_dot_examples(u, v, expected):
    assert dot(UnitVector3(*u), UnitVector3(*v)) == pytest.approx(expected, abs=1e-12)


# ---- random numbers --------------------------------------------------------


def test_stream_determinism():
    a = RngStream(7, 3).uniforms(10)
    b = RngStream(7, 3).uniforms(10)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, RngStream(7, 4).uniforms(10))
    assert not np.array_equal(a, RngStream(8, 3).uniforms(10))


def test_stream_reads_sequentially_from_block():
    rng = RngStream(11, 42)
    seq = np.concatenate([rng.uniforms(3), rng.uniforms(4)])
    assert rng.position == 7
    assert np.array_equal(seq, uniform_block(11, [42], 0, 7)[0])


def test_block_rows_match_individual_streams():
    block = uniform_block(5, np.arange(100, 110), 2, 3)
    for row, s in zip(block, range(100, 110)):
        assert np.array_equal(row, RngStream(5, s, position=2).uniforms(3))


def test_uniforms_in_unit_interval_and_flat():
    u = uniform_block(1, np.arange(N // 4), 0, 4).ravel()
    assert u.min() >= 0.0 and u.max() < 1.0
    assert stats.kstest(u, "uniform").statistic < 0.002


def test_stream_rejects_out_of_range():
    with pytest.raises(ValueError):
        RngStream(-1, 0)
    with pytest.raises(ValueError):
        RngStream(0, 1 << 64)


# ---- sphere sampling ---------------------------------------------------------


def _sphere_draws(seed=3):
    return sphere_from_uniforms(uniform_block(seed, np.arange(N), 0, 2))


def test_sample_unit_vector_is_unit():
    rng = RngStream(9, 0)
    for _ in range(200):
        v = sample_unit_vector(rng).as_array()
        assert abs(np.linalg.norm(v) - 1.0) < 1e-12


def test_sample_unit_vector_matches_batch():
    v = sample_unit_vector(RngStream(9, 17)).as_array()
    assert np.array_equal(v, sphere_from_uniforms(uniform_block(9, [17], 0, 2))[0])


def _check_uniform_sphere(pts):
    assert np.linalg.norm(pts.mean(axis=0)) < 0.005
    assert abs(np.mean(pts[:, 2] ** 2) - 1 / 3) < 0.005
    for w in ([0, 0, 1], [1, 0, 0], [0.48, 0.6, 0.64]):
        proj = pts @ np.array(w)
        ks = stats.kstest(proj, stats.uniform(loc=-1, scale=2).cdf).statistic
        assert ks < 0.002, (w, ks)


def test_sphere_sampler_moments_and_ks():
    _check_uniform_sphere(_sphere_draws())


# ---- rotations -----------------------------------------------------------


def test_sample_rotation_membership():
    rng = RngStream(4, 0)
    for _ in range(200):
        r = sample_rotation(rng).as_array()
        assert np.max(np.abs(r.T @ r - np.eye(3))) < 1e-12
        assert abs(np.linalg.det(r) - 1.0) < 1e-12


def test_rotation_pushforward_uniform():
    rots = rotation_from_uniforms(uniform_block(12, np.arange(N), 0, 3))
    _check_uniform_sphere(rots[:, :, 2])  # image of (0, 0, 1)


def test_rotation_pushforward_of_other_axis_uniform():
    rots = rotation_from_uniforms(uniform_block(13, np.arange(N), 0, 3))
    _check_uniform_sphere(rots @ np.array([0.48, 0.6, 0.64]))


@settings(max_examples=50)
@given(st.integers(0, 2**32), unit_vectors(), unit_vectors())
def test_rotation_preserves_dot(stream, u, v):
    r = sample_rotation(RngStream(1, stream))
    assert dot(r.apply(u), r.apply(v)) == pytest.approx(dot(u, v), abs=1e-10)


def test_identity_rotation():
    u = UnitVector3(0.48, 0.6, 0.64)
    assert Rotation3.identity().apply(u) == u
