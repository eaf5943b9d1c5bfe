import numpy as np
import pytest

from nllab.sterngerlach import (
    EquivarianceReport,
    FieldConfig,
    NegativeTimeError,
    NodeRegionError,
    StepTooLargeError,
    branch_outcome,
    equivariance_check,
    evolve_packet,
    guidance_velocity,
    initial_packet,
    integrate_endpoints,
    integrate_trajectory,
)

EXP1 = FieldConfig(gradient=-5.0)
EXP2 = FieldConfig(gradient=+5.0)


def test_zero_gradient_only_spreads():
    p0 = initial_packet()
    pt = evolve_packet(p0, FieldConfig(gradient=0.0), 2.0)
    assert pt.centers == (0.0, 0.0)
    assert pt.momenta == (0.0, 0.0)
    assert pt.width > p0.width


def test_centers_mirror_each_other():
    p0 = initial_packet()
    for t in (0.2, 0.7, 1.0, 2.0, 4.0):
        pt = evolve_packet(p0, EXP1, t)
        assert pt.centers[0] == pytest.approx(-pt.centers[1], abs=1e-14)


def test_negative_time_rejected():
    with pytest.raises(NegativeTimeError):
        evolve_packet(initial_packet(), EXP1, -0.1)


def test_center_matches_ehrenfest_ode():
    # independent second-order integration of z'' = F(t)/m, run piecewise
    # so no step straddles the force cutoff at the exit time
    f = EXP1
    p0 = initial_packet()
    dt = 1e-3
    z, v = 0.0, 0.0
    worst = 0.0
    t = 0.0
    for phase_end, accel in ((f.t_exit, 5.0 / f.mass), (4.0, 0.0)):
        steps = int(round((phase_end - t) / dt))
        for i in range(steps):
            k1v, k1z = accel, v
            k2v, k2z = accel, v + dt / 2 * k1v
            k3v, k3z = accel, v + dt / 2 * k2v
            k4v, k4z = accel, v + dt * k3v
            z += dt / 6 * (k1z + 2 * k2z + 2 * k3z + k4z)
            v += dt / 6 * (k1v + 2 * k2v + 2 * k3v + k4v)
            elapsed = t + (i + 1) * dt
            worst = max(worst, abs(z - evolve_packet(p0, f, elapsed).centers[0]))
        t = phase_end
    assert worst <= 1e-8


def test_velocity_zero_at_start_and_on_axis():
    p0 = initial_packet()
    for z in np.linspace(-3.0, 3.0, 13):
        assert guidance_velocity(p0, float(z)) == pytest.approx(0.0, abs=1e-14)
    for t in np.linspace(0.05, 4.0, 50):
        pt = evolve_packet(p0, EXP1, float(t))
        assert guidance_velocity(pt, 0.0) == pytest.approx(0.0, abs=1e-12)


def test_velocity_single_branch_limit():
    pt = evolve_packet(initial_packet(), EXP1, 4.0)
    at_center = guidance_velocity(pt, pt.centers[0])
    expected = pt.hbar * pt.momenta[0] / pt.mass
    assert abs(at_center / expected - 1.0) <= 0.01


def test_node_region_raises():
    pt = evolve_packet(initial_packet(), EXP1, 4.0)
    with pytest.raises(NodeRegionError):
        guidance_velocity(pt, 1e6)


def test_outcome_table():
    assert branch_outcome("upper", -5.0) == 1
    assert branch_outcome("upper", 5.0) == -1
    assert branch_outcome("lower", -5.0) == -1
    assert branch_outcome("lower", 5.0) == 1
    with pytest.raises(ValueError):
        branch_outcome("upper", 0.0)


def test_contextuality_witness():
    t1 = integrate_trajectory(0.3, EXP1, dt=2e-3)
    t2 = integrate_trajectory(0.3, EXP2, dt=2e-3)
    assert t1.final_branch == "upper" and t1.outcome == 1
    assert t2.final_branch == "upper" and t2.outcome == -1
    assert not t1.crossed and not t2.crossed


def test_mirror_symmetry():
    plus = integrate_trajectory(0.4, EXP1, dt=2e-3)
    minus = integrate_trajectory(-0.4, EXP1, dt=2e-3)
    assert np.max(np.abs(plus.positions + minus.positions)) <= 1e-8
    assert minus.final_branch == "lower" and minus.outcome == -1


def test_trajectory_determinism():
    a = integrate_trajectory(0.3, EXP1, dt=2e-3)
    b = integrate_trajectory(0.3, EXP1, dt=2e-3)
    assert np.array_equal(a.positions, b.positions)
    assert np.array_equal(a.velocities, b.velocities)


def test_rejects_bad_inputs():
    with pytest.raises(ValueError):
        integrate_trajectory(0.0, EXP1)
    with pytest.raises(ValueError):
        integrate_trajectory(0.3, EXP1, dt=-1.0)
    with pytest.raises(StepTooLargeError):
        integrate_trajectory(0.3, EXP1, dt=0.5)
    with pytest.raises(ValueError):
        FieldConfig(gradient=1.0, mass=0.0)


def test_no_crossing_ensemble(rng):
    for f in (EXP1, EXP2):
        z0 = rng.standard_normal(500)
        z0 = z0[z0 != 0.0]
        _, crossed = integrate_endpoints(z0, f, dt=2e-3)
        assert int(crossed.sum()) == 0


def test_equivariance_small():
    rep = equivariance_check(EXP1, n=2000, rng=np.random.default_rng(11), dt=2e-3)
    assert isinstance(rep, EquivarianceReport)
    assert rep.crossings == 0
    assert abs(rep.upper_fraction - 0.5) <= 0.05
    assert rep.tv_distance < 0.1
    assert not rep.degenerate


def test_equivariance_flags_degenerate_geometry():
    rep = equivariance_check(
        FieldConfig(gradient=0.0), n=300, rng=np.random.default_rng(2), dt=5e-3
    )
    assert rep.degenerate
