import math

import numpy as np
import pytest

from nllab.linalg import hermitian_eig, max_abs, tensor
from nllab.spin import (
    Direction,
    X_HAT,
    Y_HAT,
    Z_HAT,
    random_direction,
    sigma,
    singlet,
    singlet_in_basis,
    spin1_component,
    spin1_squared,
    spin_down,
    spin_up,
)

INV_SQRT2 = 1.0 / math.sqrt(2.0)


def test_sigma_axis_cases():
    assert max_abs(sigma(Z_HAT) - np.diag([1.0, -1.0])) == 0.0
    assert max_abs(sigma(X_HAT) - np.array([[0, 1], [1, 0]])) <= 1e-15


def test_sigma_squares_to_identity(rng):
    for _ in range(50):
        d = random_direction(rng)
        assert max_abs(sigma(d) @ sigma(d) - np.eye(2)) <= 1e-12


def test_spin_up_down_eigenvectors(rng):
    for _ in range(50):
        d = random_direction(rng)
        up, dn = spin_up(d), spin_down(d)
        assert np.linalg.norm(sigma(d) @ up.amps - up.amps) <= 1e-12
        assert np.linalg.norm(sigma(d) @ dn.amps + dn.amps) <= 1e-12
        assert abs(np.vdot(up.amps, dn.amps)) <= 1e-12


def test_phase_convention_fixed_cases():
    up, dn = spin_up(Z_HAT), spin_down(Z_HAT)
    assert max_abs(up.amps - np.array([1.0, 0.0])) == 0.0
    assert max_abs(dn.amps - np.array([0.0, -1.0])) == 0.0
    up, dn = spin_up(X_HAT), spin_down(X_HAT)
    assert max_abs(up.amps - np.array([INV_SQRT2, INV_SQRT2])) <= 1e-15
    assert max_abs(dn.amps - np.array([INV_SQRT2, -INV_SQRT2])) <= 1e-15


def test_inverse_expansion(rng):
    # |up-z> = cos(t/2)|up-d> + sin(t/2) e^{i phi}|down-d>
    for _ in range(30):
        d = random_direction(rng)
        h = d.theta / 2.0
        eip = complex(math.cos(d.phi), math.sin(d.phi))
        recon = math.cos(h) * spin_up(d).amps + math.sin(h) * eip * spin_down(d).amps
        assert np.linalg.norm(recon - np.array([1.0, 0.0])) <= 1e-12


def test_singlet_amplitudes():
    assert max_abs(singlet().amps - np.array([0, INV_SQRT2, -INV_SQRT2, 0])) <= 1e-15


def test_singlet_total_spin_zero(rng):
    s = singlet()
    for _ in range(20):
        d = random_direction(rng)
        total = tensor(sigma(d), np.eye(2)) + tensor(np.eye(2), sigma(d))
        assert np.linalg.norm(total @ s.amps) <= 1e-12


def test_singlet_basis_rewrite(rng):
    s = singlet()
    for _ in range(20):
        d = random_direction(rng)
        assert abs(s.overlap(singlet_in_basis(d))) == pytest.approx(1.0, abs=1e-12)


def test_spin1_z_square():
    assert max_abs(spin1_squared(Z_HAT) - np.diag([1.0, 0.0, 1.0])) <= 1e-15


def test_spin1_sum_rule():
    total = spin1_squared(X_HAT) + spin1_squared(Y_HAT) + spin1_squared(Z_HAT)
    assert max_abs(total - 2.0 * np.eye(3)) <= 1e-12


def test_spin1_squared_eigenvalues(rng):
    for _ in range(20):
        d = random_direction(rng)
        w, _ = hermitian_eig(spin1_squared(d))
        assert w == pytest.approx([0.0, 1.0, 1.0], abs=1e-10)
        wc, _ = hermitian_eig(spin1_component(d))
        assert wc == pytest.approx([-1.0, 0.0, 1.0], abs=1e-10)


def test_antipode_relations(rng):
    for _ in range(20):
        d = random_direction(rng)
        anti = d.antipode()
        overlap = abs(np.vdot(spin_up(anti).amps, spin_down(d).amps))
        assert overlap == pytest.approx(1.0, abs=1e-10)
        assert max_abs(spin1_squared(d) - spin1_squared(anti)) <= 1e-12


def test_direction_round_trip(rng):
    for _ in range(20):
        d = random_direction(rng)
        again = Direction.from_vector(d.unit)
        assert np.allclose(again.unit, d.unit, atol=1e-12)
    with pytest.raises(ValueError):
        Direction.from_vector([0.0, 0.0, 0.0])
