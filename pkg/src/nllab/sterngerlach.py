"""Pilot-wave trajectories through a Stern-Gerlach magnet.

The wave function is a two-component Gaussian packet evolving in closed
form: a linear potential of opposite sign per spin component while
between the magnets, free flight afterwards. Particle positions follow
the velocity field built from the spinor inner product. The same initial
position yields opposite "spin results" under the two field
orientations, which is the contextuality point of the module.

Component +1 is spin-up along z. Its potential is
``(+1) * (bias + gradient * z)``, so the force on the up component is
``-gradient``: a negative gradient sends spin-up into the upper branch.
Detection maps to an outcome through the branch/orientation table
(upper, gradient < 0) -> +1, (upper, gradient > 0) -> -1, lower opposite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class NegativeTimeError(ValueError):
    """Packet evolution is defined for t >= 0 only."""


class NodeRegionError(ArithmeticError):
    """The velocity field is undefined where the density underflows."""


class StepTooLargeError(RuntimeError):
    """An integration step moved farther than a tenth of the packet width."""


_LOG_DENSITY_FLOOR = math.log(1e-300)


@dataclass(frozen=True)
class FieldConfig:
    """Magnet and particle parameters.

    ``gradient`` is the energy slope per unit length felt by the spin-up
    component (its sign selects the experiment); ``bias`` only shifts
    component phases and never moves a trajectory.
    """

    gradient: float
    bias: float = 0.0
    mass: float = 1.0
    hbar: float = 1.0
    t_exit: float = 1.0

    def __post_init__(self):
        if self.mass <= 0.0:
            raise ValueError("mass must be positive")
        if self.hbar <= 0.0:
            raise ValueError("hbar must be positive")
        if self.t_exit < 0.0:
            raise ValueError("transit time cannot be negative")


@dataclass(frozen=True)
class SpinorPacket:
    """Two-component Gaussian packet at a fixed time.

    Per component: complex weight, center, wavenumber, accumulated
    action phase. The width is common to both components and spreads
    exactly as a free Gaussian; a linear potential never changes it.
    """

    time: float
    width0: float
    mass: float
    hbar: float
    weights: tuple[complex, complex]
    centers: tuple[float, float]
    momenta: tuple[float, float]
    phases: tuple[float, float]

    @property
    def tau(self) -> float:
        return self.hbar * self.time / (2.0 * self.mass * self.width0**2)

    @property
    def width(self) -> float:
        return self.width0 * math.sqrt(1.0 + self.tau**2)

    def log_density(self, z) -> np.ndarray:
        """log |psi|^2 with the spinor inner product (no cross terms)."""
        z = np.asarray(z, dtype=float)
        var = self.width**2
        exponents = np.stack(
            [
                -((z - self.centers[0]) ** 2) / (2.0 * var),
                -((z - self.centers[1]) ** 2) / (2.0 * var),
            ]
        )
        mags = np.array([abs(self.weights[0]) ** 2, abs(self.weights[1]) ** 2])
        top = np.max(exponents, axis=0)
        mix = np.log(np.tensordot(mags, np.exp(exponents - top), axes=1)) + top
        return mix - 0.5 * math.log(2.0 * math.pi * var)

    def density(self, z) -> np.ndarray:
        return np.exp(self.log_density(z))


def initial_packet(
    width: float = 1.0,
    weights: tuple[complex, complex] = (1.0 / math.sqrt(2.0), 1.0 / math.sqrt(2.0)),
    mass: float = 1.0,
    hbar: float = 1.0,
) -> SpinorPacket:
    """Packet at t = 0: both components centered at z = 0, at rest."""
    norm = math.sqrt(abs(weights[0]) ** 2 + abs(weights[1]) ** 2)
    if norm == 0.0:
        raise ValueError("spinor weights cannot both vanish")
    w = (weights[0] / norm, weights[1] / norm)
    if width <= 0.0:
        raise ValueError("width must be positive")
    return SpinorPacket(
        time=0.0,
        width0=width,
        mass=mass,
        hbar=hbar,
        weights=w,
        centers=(0.0, 0.0),
        momenta=(0.0, 0.0),
        phases=(0.0, 0.0),
    )


def evolve_packet(p: SpinorPacket, f: FieldConfig, t: float) -> SpinorPacket:
    """Closed-form state at time t for an initial (t = 0) packet.

    Constant force -c * gradient per component inside the magnet until
    ``f.t_exit``, ballistic afterwards. Widths spread like a free packet
    throughout; phases accumulate the classical action along each
    component's path (they never influence the velocity field because
    the two spin components do not interfere).
    """
    if t < 0.0:
        raise NegativeTimeError(f"cannot evolve to negative time {t}")
    if p.time != 0.0:
        raise ValueError("evolve_packet expects the t = 0 packet as input")
    m, hbar = f.mass, f.hbar
    t_in = min(t, f.t_exit)
    t_out = max(0.0, t - f.t_exit)
    centers = []
    momenta = []
    phases = []
    for comp, weight in zip((+1, -1), p.weights):
        force = -comp * f.gradient
        k_exit = force * t_in / hbar
        z_exit = 0.5 * force * t_in**2 / m
        center = z_exit + hbar * k_exit / m * t_out
        # Classical action: kinetic minus potential along the center path.
        kinetic_in = force**2 * t_in**3 / (6.0 * m)
        potential_in = comp * f.bias * t_in - force**2 * t_in**3 / (6.0 * m)
        action = kinetic_in - potential_in + (hbar**2 * k_exit**2 / (2.0 * m)) * t_out
        centers.append(center)
        momenta.append(k_exit)
        phases.append(action / hbar)
    return SpinorPacket(
        time=t,
        width0=p.width0,
        mass=m,
        hbar=hbar,
        weights=p.weights,
        centers=(centers[0], centers[1]),
        momenta=(momenta[0], momenta[1]),
        phases=(phases[0], phases[1]),
    )


def velocity_field(p: SpinorPacket, z) -> np.ndarray:
    """Guidance velocity (hbar/m) Im[(sum_c chi_c* d_z chi_c) / sum_c |chi_c|^2].

    Evaluated from the analytic Gaussians; vectorized over z. Underflow
    of the total density is reported, not silently divided through.
    """
    z = np.asarray(z, dtype=float)
    var_t = p.width**2
    tau = p.tau
    spread_rate = tau / (2.0 * p.width0**2 * (1.0 + tau**2))
    exponents = np.stack(
        [
            -((z - p.centers[0]) ** 2) / (2.0 * var_t),
            -((z - p.centers[1]) ** 2) / (2.0 * var_t),
        ]
    )
    mags = np.array([abs(p.weights[0]) ** 2, abs(p.weights[1]) ** 2])
    top = np.max(exponents, axis=0)
    rel = mags.reshape(2, *([1] * z.ndim)) * np.exp(exponents - top)
    terms = np.stack(
        [
            (z - p.centers[0]) * spread_rate + p.momenta[0],
            (z - p.centers[1]) * spread_rate + p.momenta[1],
        ]
    )
    denom = np.sum(rel, axis=0)
    v = (p.hbar / p.mass) * np.sum(rel * terms, axis=0) / denom
    log_density = np.log(denom) + top - 0.5 * math.log(2.0 * math.pi * var_t)
    if np.any(log_density < _LOG_DENSITY_FLOOR):
        raise NodeRegionError("density below 1e-300; velocity undefined there")
    return v


def guidance_velocity(p: SpinorPacket, z: float) -> float:
    return float(velocity_field(p, np.array(z, dtype=float)))


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    positions: np.ndarray
    velocities: np.ndarray
    densities: np.ndarray
    final_branch: str
    outcome: int | None
    crossed: bool


def branch_outcome(branch: str, gradient: float) -> int:
    """Outcome table for the two field orientations."""
    if gradient == 0.0:
        raise ValueError("no branch separation without a field gradient")
    if branch not in ("upper", "lower"):
        raise ValueError(f"unknown branch {branch!r}")
    upper = branch == "upper"
    return 1 if upper == (gradient < 0.0) else -1


def _rk4_step(f: FieldConfig, packet0: SpinorPacket, z: np.ndarray, t: float, dt: float) -> np.ndarray:
    p1 = evolve_packet(packet0, f, t)
    p2 = evolve_packet(packet0, f, t + dt / 2.0)
    p3 = evolve_packet(packet0, f, t + dt)
    k1 = velocity_field(p1, z)
    k2 = velocity_field(p2, z + dt / 2.0 * k1)
    k3 = velocity_field(p2, z + dt / 2.0 * k2)
    k4 = velocity_field(p3, z + dt * k3)
    return z + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def integrate_trajectory(
    z0: float,
    f: FieldConfig,
    dt: float = 1e-3,
    t_final: float = 4.0,
    width: float = 1.0,
    weights: tuple[complex, complex] = (1.0 / math.sqrt(2.0), 1.0 / math.sqrt(2.0)),
) -> Trajectory:
    """Integrate dz/dt = v(z, t) with fourth-order Runge-Kutta.

    z0 = 0 is rejected: it sits on the nodal symmetry plane that
    trajectories cannot cross. Identical inputs produce bit-identical
    trajectories.
    """
    if z0 == 0.0:
        raise ValueError("z0 = 0 lies on the symmetry plane; choose a side")
    if dt <= 0.0 or t_final <= 0.0:
        raise ValueError("dt and t_final must be positive")
    packet0 = initial_packet(width=width, weights=weights, mass=f.mass, hbar=f.hbar)
    steps = int(round(t_final / dt))
    times = np.linspace(0.0, steps * dt, steps + 1)
    zs = np.empty(steps + 1)
    vs = np.empty(steps + 1)
    rho = np.empty(steps + 1)
    zs[0] = z0
    vs[0] = guidance_velocity(packet0, z0)
    rho[0] = float(packet0.density(np.array(z0)))
    z = np.array(z0, dtype=float)
    crossed = False
    sign0 = math.copysign(1.0, z0)
    for i in range(steps):
        t = times[i]
        z_new = _rk4_step(f, packet0, z, t, dt)
        p_next = evolve_packet(packet0, f, times[i + 1])
        if abs(float(z_new) - float(z)) > p_next.width / 10.0:
            raise StepTooLargeError(
                f"step {i}: moved {abs(float(z_new) - float(z)):.3g}, "
                f"more than a tenth of the width {p_next.width:.3g}; reduce dt"
            )
        z = z_new
        zs[i + 1] = float(z)
        vs[i + 1] = float(velocity_field(p_next, z))
        rho[i + 1] = float(p_next.density(z))
        if math.copysign(1.0, float(z)) != sign0:
            crossed = True
    packet_final = evolve_packet(packet0, f, times[-1])
    midpoint = 0.5 * (packet_final.centers[0] + packet_final.centers[1])
    branch = "upper" if zs[-1] > midpoint else "lower"
    outcome = branch_outcome(branch, f.gradient) if f.gradient != 0.0 else None
    return Trajectory(times, zs, vs, rho, branch, outcome, crossed)


def integrate_endpoints(
    z0s: np.ndarray,
    f: FieldConfig,
    dt: float = 1e-3,
    t_final: float = 4.0,
    width: float = 1.0,
    weights: tuple[complex, complex] = (1.0 / math.sqrt(2.0), 1.0 / math.sqrt(2.0)),
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized ensemble integration; returns (endpoints, crossed flags)."""
    packet0 = initial_packet(width=width, weights=weights, mass=f.mass, hbar=f.hbar)
    z = np.asarray(z0s, dtype=float).copy()
    if np.any(z == 0.0):
        raise ValueError("z0 = 0 lies on the symmetry plane; choose a side")
    signs = np.sign(z)
    crossed = np.zeros(z.shape, dtype=bool)
    steps = int(round(t_final / dt))
    for i in range(steps):
        t = i * dt
        z_new = _rk4_step(f, packet0, z, t, dt)
        p_next = evolve_packet(packet0, f, (i + 1) * dt)
        if float(np.max(np.abs(z_new - z))) > p_next.width / 10.0:
            raise StepTooLargeError(f"step {i} exceeded a tenth of the width; reduce dt")
        z = z_new
        crossed |= np.sign(z) != signs
    return z, crossed


@dataclass(frozen=True)
class EquivarianceReport:
    n: int
    upper_fraction: float
    tv_distance: float
    crossings: int
    degenerate: bool


def _mixture_cdf(x: float, packet: SpinorPacket) -> float:
    var = packet.width**2
    mags = [abs(w) ** 2 for w in packet.weights]
    total = sum(mags)
    acc = 0.0
    for mag, center in zip(mags, packet.centers):
        acc += (mag / total) * 0.5 * (1.0 + math.erf((x - center) / math.sqrt(2.0 * var)))
    return acc


def equivariance_check(
    f: FieldConfig,
    n: int = 10_000,
    rng: np.random.Generator | None = None,
    dt: float = 1e-3,
    t_final: float = 4.0,
    width: float = 1.0,
    bins: int = 60,
) -> EquivarianceReport:
    """Transport initial positions drawn from |psi_0|^2 and compare to |psi_T|^2.

    Initial positions are sampled from the t = 0 density; after
    integration the branch split should be even and the endpoint
    histogram should match the final two-packet density (total-variation
    distance over equal-width bins). A vanishing gradient leaves the
    packets on top of each other and is flagged as degenerate geometry.
    """
    if n < 100:
        raise ValueError("need at least 100 samples")
    if rng is None:
        rng = np.random.default_rng(0)
    z0 = width * rng.standard_normal(n)
    while np.any(z0 == 0.0):
        z0[z0 == 0.0] = width * rng.standard_normal(int(np.sum(z0 == 0.0)))
    endpoints, crossed = integrate_endpoints(z0, f, dt=dt, t_final=t_final, width=width)
    packet_final = evolve_packet(
        initial_packet(width=width, mass=f.mass, hbar=f.hbar), f, t_final
    )
    midpoint = 0.5 * (packet_final.centers[0] + packet_final.centers[1])
    separation = abs(packet_final.centers[0] - packet_final.centers[1])
    degenerate = separation < 2.0 * packet_final.width
    upper_fraction = float(np.mean(endpoints > midpoint))
    lo = min(packet_final.centers) - 5.0 * packet_final.width
    hi = max(packet_final.centers) + 5.0 * packet_final.width
    edges = np.linspace(lo, hi, bins + 1)
    counts, _ = np.histogram(np.clip(endpoints, lo, hi), bins=edges)
    empirical = counts / n
    analytic = np.array(
        [
            _mixture_cdf(edges[i + 1], packet_final) - _mixture_cdf(edges[i], packet_final)
            for i in range(bins)
        ]
    )
    tv = 0.5 * float(np.sum(np.abs(empirical - analytic)) + (1.0 - analytic.sum()))
    return EquivarianceReport(
        n=n,
        upper_fraction=upper_fraction,
        tv_distance=tv,
        crossings=int(np.sum(crossed)),
        degenerate=degenerate,
    )
