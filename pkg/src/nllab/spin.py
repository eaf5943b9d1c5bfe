"""Spin-1/2 and spin-1 building blocks.

Directional spin matrices, their eigenstates with a fixed phase
convention, the two-particle singlet, and the squared spin-1 components
used by the coloring arguments. Spin-1/2 eigenvalues are +-1 throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import StateVector, tensor

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)

_SQRT2_INV = 1.0 / math.sqrt(2.0)

SPIN1_X = _SQRT2_INV * np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]], dtype=complex)
SPIN1_Y = _SQRT2_INV * np.array([[0, -1j, 0], [1j, 0, -1j], [0, 1j, 0]], dtype=complex)
SPIN1_Z = np.array([[1, 0, 0], [0, 0, 0], [0, 0, -1]], dtype=complex)


@dataclass(frozen=True)
class Direction:
    """Spatial direction in spherical coordinates (theta from +z, phi from +x)."""

    theta: float
    phi: float

    def __post_init__(self):
        theta = float(self.theta)
        phi = float(self.phi) % (2.0 * math.pi)
        if not -1e-12 <= theta <= math.pi + 1e-12:
            raise ValueError(f"theta must lie in [0, pi], got {theta}")
        object.__setattr__(self, "theta", min(max(theta, 0.0), math.pi))
        object.__setattr__(self, "phi", phi)

    @classmethod
    def from_vector(cls, v) -> "Direction":
        x, y, z = (float(c) for c in np.asarray(v, dtype=float).reshape(3))
        r = math.sqrt(x * x + y * y + z * z)
        if r == 0.0:
            raise ValueError("zero vector has no direction")
        return cls(math.acos(max(-1.0, min(1.0, z / r))), math.atan2(y, x))

    @property
    def unit(self) -> np.ndarray:
        st = math.sin(self.theta)
        return np.array(
            [st * math.cos(self.phi), st * math.sin(self.phi), math.cos(self.theta)]
        )

    def antipode(self) -> "Direction":
        return Direction(math.pi - self.theta, self.phi + math.pi)

    def dot(self, other: "Direction") -> float:
        return float(np.dot(self.unit, other.unit))

    def angle_to(self, other: "Direction") -> float:
        return math.acos(max(-1.0, min(1.0, self.dot(other))))


X_HAT = Direction(math.pi / 2, 0.0)
Y_HAT = Direction(math.pi / 2, math.pi / 2)
Z_HAT = Direction(0.0, 0.0)


def sigma(d: Direction) -> np.ndarray:
    """Spin-1/2 component along ``d``, eigenvalues +-1."""
    ct, st = math.cos(d.theta), math.sin(d.theta)
    eip = complex(math.cos(d.phi), math.sin(d.phi))
    return np.array([[ct, st / eip], [st * eip, -ct]], dtype=complex)


def spin_up(d: Direction) -> StateVector:
    """+1 eigenstate of sigma(d): (cos(t/2), sin(t/2) e^{i phi})."""
    h = d.theta / 2.0
    eip = complex(math.cos(d.phi), math.sin(d.phi))
    return StateVector((2,), np.array([math.cos(h), math.sin(h) * eip]))


def spin_down(d: Direction) -> StateVector:
    """-1 eigenstate of sigma(d): (sin(t/2) e^{-i phi}, -cos(t/2))."""
    h = d.theta / 2.0
    eip = complex(math.cos(d.phi), math.sin(d.phi))
    return StateVector((2,), np.array([math.sin(h) / eip, -math.cos(h)]))


def singlet() -> StateVector:
    """The two-spin state (|ud> - |du>) / sqrt(2) in the z basis."""
    return StateVector((2, 2), np.array([0.0, _SQRT2_INV, -_SQRT2_INV, 0.0]))


def singlet_in_basis(d: Direction) -> StateVector:
    """The singlet assembled from the up/down pair along ``d``.

    Equal to singlet() up to a global phase for every direction; used to
    exercise the rotational-invariance identity.
    """
    up, dn = spin_up(d), spin_down(d)
    amps = tensor(up.amps, dn.amps) - tensor(dn.amps, up.amps)
    return StateVector((2, 2), amps)


def spin1_component(d: Direction) -> np.ndarray:
    """Spin-1 component along ``d`` (eigenvalues -1, 0, +1)."""
    x, y, z = d.unit
    return x * SPIN1_X + y * SPIN1_Y + z * SPIN1_Z


def spin1_squared(d: Direction) -> np.ndarray:
    """Square of the spin-1 component along ``d`` (eigenvalues 0, 1, 1)."""
    s = spin1_component(d)
    return s @ s


def random_direction(rng: np.random.Generator) -> Direction:
    v = rng.standard_normal(3)
    while float(np.linalg.norm(v)) < 1e-6:
        v = rng.standard_normal(3)
    return Direction.from_vector(v)


def random_rotation(rng: np.random.Generator) -> np.ndarray:
    """Uniformly random 3x3 rotation matrix (via a random unit quaternion)."""
    q = rng.standard_normal(4)
    q /= np.linalg.norm(q)
    w, x, y, z = q
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
            [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
            [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
        ]
    )
