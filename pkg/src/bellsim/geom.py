"""Unit vectors, rotations, the sign convention and reproducible sampling.

Random draws come from a counter-based generator: draw ``k`` of stream
``i`` under seed ``s`` is a fixed hash of ``(s, i, k)``. A Monte Carlo
round ``i`` reads from stream ``i``, so batch results never depend on how
rounds are split between workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

UNIT_TOL = 1e-12

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_STREAM_MUL = np.uint64(0xD1B54A32D192ED03)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_MASK64 = (1 << 64) - 1


# ---------------------------------------------------------------------------
# sign convention


def sgn(x: float) -> int:
    """Return +1 for ``x >= 0`` and -1 otherwise (so ``sgn(0) == +1``)."""
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"sgn needs a finite real, got {x!r}")
    return 1 if x >= 0 else -1


def sgn_array(x: np.ndarray) -> np.ndarray:
    """Vectorised :func:`sgn`; returns int8 entries in {+1, -1}."""
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("sgn needs finite reals")
    return np.where(x >= 0, 1, -1).astype(np.int8)


# ---------------------------------------------------------------------------
# value types


@dataclass(frozen=True)
class UnitVector3:
    x: float
    y: float
    z: float

    def __post_init__(self):
        norm2 = self.x * self.x + self.y * self.y + self.z * self.z
        if not math.isfinite(norm2) or abs(norm2 - 1.0) > UNIT_TOL:
            raise ValueError(f"not a unit vector: ({self.x}, {self.y}, {self.z})")

    @classmethod
    def from_array(cls, v) -> UnitVector3:
        v = np.asarray(v, dtype=float)
        return cls(float(v[0]), float(v[1]), float(v[2]))

    @classmethod
    def normalized(cls, v) -> UnitVector3:
        v = np.asarray(v, dtype=float)
        norm = float(np.linalg.norm(v))
        if norm == 0.0 or not math.isfinite(norm):
            raise ValueError("cannot normalise a zero or non-finite vector")
        return cls.from_array(v / norm)

    @classmethod
    def from_angle(cls, theta: float) -> UnitVector3:
        """Direction at polar angle ``theta`` (radians) in the x-z plane."""
        return cls(math.sin(theta), 0.0, math.cos(theta))

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def __neg__(self) -> UnitVector3:
        return UnitVector3(-self.x, -self.y, -self.z)


@dataclass(frozen=True)
class Rotation3:
    """A proper rotation, stored as a row-major 3x3 tuple."""

    matrix: tuple

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.shape != (3, 3):
            raise ValueError("rotation must be 3x3")
        if np.max(np.abs(m.T @ m - np.eye(3))) > UNIT_TOL:
            raise ValueError("matrix is not orthogonal")
        if abs(np.linalg.det(m) - 1.0) > UNIT_TOL:
            raise ValueError("matrix is not a proper rotation")
        object.__setattr__(self, "matrix", tuple(tuple(float(e) for e in row) for row in m))

    @classmethod
    def identity(cls) -> Rotation3:
        return cls(tuple(map(tuple, np.eye(3))))

    def as_array(self) -> np.ndarray:
        return np.array(self.matrix)

    def apply(self, v: UnitVector3) -> UnitVector3:
        return UnitVector3.from_array(self.as_array() @ v.as_array())


def dot(u: UnitVector3, v: UnitVector3) -> float:
    return u.x * v.x + u.y * v.y + u.z * v.z


# ---------------------------------------------------------------------------
# counter-based random numbers


def _mix(x: np.ndarray) -> np.ndarray:
    # splitmix64 finaliser; uint64 array arithmetic wraps silently
    x = x ^ (x >> np.uint64(30))
    x = x * _M1
    x = x ^ (x >> np.uint64(27))
    x = x * _M2
    return x ^ (x >> np.uint64(31))


def _seed_key(seed: int) -> np.ndarray:
    return _mix(np.array([seed & _MASK64], dtype=np.uint64) ^ _GOLDEN)


def uniform_block(seed: int, streams, start: int, count: int) -> np.ndarray:
    """Uniforms in [0, 1) for draws ``start .. start+count-1`` of each stream.

    Returns an array of shape ``(len(streams), count)``.
    """
    streams = np.asarray(streams, dtype=np.uint64).reshape(-1)
    key = _seed_key(seed)
    head = _mix(key + streams * _STREAM_MUL)
    counters = np.arange(start + 1, start + count + 1, dtype=np.uint64) * _GOLDEN
    bits = _mix(head[:, None] + counters[None, :])
    return (bits >> np.uint64(11)).astype(np.float64) * 2.0**-53


class RngStream:
    """Sequential reader over one ``(seed, stream_index)`` substream.

    Not thread-safe; each unit of work owns its own stream.
    """

    def __init__(self, seed: int, stream_index: int, position: int = 0):
        if not 0 <= seed <= _MASK64 or not 0 <= stream_index <= _MASK64:
            raise ValueError("seed and stream_index must be 64-bit unsigned")
        self.seed = int(seed)
        self.stream_index = int(stream_index)
        self.position = int(position)

    def uniforms(self, count: int) -> np.ndarray:
        out = uniform_block(self.seed, [self.stream_index], self.position, count)[0]
        self.position += count
        return out

    def uniform(self) -> float:
        return float(self.uniforms(1)[0])

    def __repr__(self):
        return f"RngStream(seed={self.seed}, stream_index={self.stream_index}, position={self.position})"


# ---------------------------------------------------------------------------
# samplers


def sphere_from_uniforms(u: np.ndarray) -> np.ndarray:
    """Map ``(..., 2)`` uniforms to points on S^2 by inverting the z-CDF."""
    z = 1.0 - 2.0 * u[..., 0]
    phi = 2.0 * np.pi * u[..., 1]
    r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    return np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=-1)


def rotation_from_uniforms(u: np.ndarray) -> np.ndarray:
    """Map ``(..., 3)`` uniforms to Haar-random rotation matrices ``(..., 3, 3)``.

    Uses the uniform unit quaternion construction of Shoemake.
    """
    u1, u2, u3 = u[..., 0], u[..., 1], u[..., 2]
    s1, s2 = np.sqrt(1.0 - u1), np.sqrt(u1)
    w = s2 * np.cos(2.0 * np.pi * u3)
    x = s1 * np.sin(2.0 * np.pi * u2)
    y = s1 * np.cos(2.0 * np.pi * u2)
    z = s2 * np.sin(2.0 * np.pi * u3)
    m = np.empty(u.shape[:-1] + (3, 3))
    m[..., 0, 0] = 1 - 2 * (y * y + z * z)
    m[..., 0, 1] = 2 * (x * y - z * w)
    m[..., 0, 2] = 2 * (x * z + y * w)
    m[..., 1, 0] = 2 * (x * y + z * w)
    m[..., 1, 1] = 1 - 2 * (x * x + z * z)
    m[..., 1, 2] = 2 * (y * z - x * w)
    m[..., 2, 0] = 2 * (x * z - y * w)
    m[..., 2, 1] = 2 * (y * z + x * w)
    m[..., 2, 2] = 1 - 2 * (x * x + y * y)
    return m


def sample_unit_vector(rng: RngStream) -> UnitVector3:
    """Uniform draw on the unit sphere; consumes two uniforms."""
    return UnitVector3.from_array(sphere_from_uniforms(rng.uniforms(2)))


def sample_rotation(rng: RngStream) -> Rotation3:
    """Haar-uniform draw on SO(3); consumes three uniforms."""
    return Rotation3(tuple(map(tuple, rotation_from_uniforms(rng.uniforms(3)))))
