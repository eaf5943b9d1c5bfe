import math

import numpy as np
import pytest

from nllab.lhv import (
    NonrealExpectationError,
    bell_inequality,
    constant_strategy,
    coplanar_direction,
    lhv_correlation,
    maximize_violation,
    quantum_correlation,
    sign_model_correlation,
    sign_strategy,
    singlet_correlation,
    uniform_sphere,
)
from nllab.linalg import DimMismatchError, StateVector
from nllab.spin import Direction, random_direction, random_rotation, sigma, singlet


def test_quantum_correlation_equal_and_orthogonal():
    s = singlet()
    d = random_direction(np.random.default_rng(3))
    assert quantum_correlation(s, sigma(d), sigma(d)) == pytest.approx(-1.0, abs=1e-12)
    x = coplanar_direction(0.0)
    y = coplanar_direction(90.0)
    assert quantum_correlation(s, sigma(x), sigma(y)) == pytest.approx(0.0, abs=1e-12)


def test_quantum_correlation_matches_dot(rng):
    s = singlet()
    for _ in range(100):
        a, b = random_direction(rng), random_direction(rng)
        assert quantum_correlation(s, sigma(a), sigma(b)) == pytest.approx(
            -a.dot(b), abs=1e-10
        )


def test_quantum_correlation_rotation_invariance(rng):
    s = singlet()
    for _ in range(100):
        a, b = random_direction(rng), random_direction(rng)
        r = random_rotation(rng)
        ra = Direction.from_vector(r @ a.unit)
        rb = Direction.from_vector(r @ b.unit)
        assert quantum_correlation(s, sigma(ra), sigma(rb)) == pytest.approx(
            quantum_correlation(s, sigma(a), sigma(b)), abs=1e-10
        )


def test_quantum_correlation_errors():
    s = singlet()
    with pytest.raises(DimMismatchError):
        quantum_correlation(s, np.eye(3), np.eye(2))
    with pytest.raises(DimMismatchError):
        quantum_correlation(StateVector((4,), np.ones(4)), np.eye(2), np.eye(2))
    with pytest.raises(NonrealExpectationError):
        quantum_correlation(s, np.eye(2), np.diag([1j, 0.0]))


def test_equal_settings_are_exactly_minus_one(rng):
    for strategy in (sign_strategy(), constant_strategy()):
        d = random_direction(rng)
        est = lhv_correlation(strategy, uniform_sphere(), d, d, samples=500, seed=1)
        assert est.estimate == -1.0
        assert est.stderr == 0.0


def test_constant_strategy_everywhere_minus_one(rng):
    a, b = random_direction(rng), random_direction(rng)
    est = lhv_correlation(constant_strategy(), uniform_sphere(), a, b, samples=200, seed=2)
    assert est.estimate == -1.0


def test_sign_model_matches_closed_form(rng):
    a, b = random_direction(rng), random_direction(rng)
    est = lhv_correlation(sign_strategy(), uniform_sphere(), a, b, samples=100_000, seed=5)
    assert abs(est.estimate - sign_model_correlation(a, b)) <= 3.0 * est.stderr


def test_sign_model_closed_form_large_sample_cross_check():
    a = coplanar_direction(0.0)
    b = coplanar_direction(77.0)
    est = lhv_correlation(sign_strategy(), uniform_sphere(), a, b, samples=1_000_000, seed=9)
    expected = 2.0 * math.radians(77.0) / math.pi - 1.0
    assert abs(est.estimate - expected) <= 3.0 * est.stderr
    assert est.stderr < 2e-3


def test_bell_quantum_pattern():
    res = bell_inequality(
        singlet_correlation,
        coplanar_direction(0.0),
        coplanar_direction(60.0),
        coplanar_direction(120.0),
    )
    assert res.lhs == pytest.approx(1.0, abs=1e-12)
    assert res.rhs == pytest.approx(0.5, abs=1e-12)
    assert res.violated


def test_bell_boundary_case(rng):
    d = random_direction(rng)
    res = bell_inequality(singlet_correlation, d, d, d)
    assert res.lhs == 0.0
    assert res.rhs == pytest.approx(0.0, abs=1e-12)
    assert not res.violated


def test_lhv_never_violates(rng):
    dist = uniform_sphere()
    strategy = sign_strategy()
    for k in range(30):
        a, b, c = (random_direction(rng) for _ in range(3))

        def p(x, y, _k=k):
            return lhv_correlation(strategy, dist, x, y, samples=20_000, seed=100 + _k)

        res = bell_inequality(p, a, b, c)
        assert not res.violated


def test_derivation_intermediate_bound(rng):
    # finite hidden-parameter table: |P(a,b) - P(a,c)| <= sum rho (1 - A_b A_c)
    for _ in range(50):
        m = int(rng.integers(2, 8))
        rho = rng.uniform(0.1, 1.0, size=m)
        rho /= rho.sum()
        a_vals = rng.choice([-1.0, 1.0], size=(3, m))
        p_ab = float(np.sum(rho * a_vals[0] * (-a_vals[1])))
        p_ac = float(np.sum(rho * a_vals[0] * (-a_vals[2])))
        bound = float(np.sum(rho * (1.0 - a_vals[1] * a_vals[2])))
        assert abs(p_ab - p_ac) <= bound + 1e-12


def test_maximize_quantum():
    best = maximize_violation(singlet_correlation, grid_deg=5.0, refine_levels=2)
    assert best.margin == pytest.approx(0.5, abs=1e-9)
    assert best.lhs == pytest.approx(1.0, abs=1e-9)
    assert best.rhs == pytest.approx(0.5, abs=1e-9)
    assert best.phi_b_deg == pytest.approx(60.0, abs=0.5)
    assert best.phi_c_deg == pytest.approx(120.0, abs=0.5)


def test_maximize_constant_strategy_no_violation():
    def p(a, b):
        return -1.0

    best = maximize_violation(p, grid_deg=30.0, refine_levels=0)
    assert best.margin <= 0.0


def test_maximize_sign_model_no_violation():
    best = maximize_violation(sign_model_correlation, grid_deg=15.0, refine_levels=1)
    assert best.margin <= 1e-9


def test_vectorized_and_scalar_responses_agree(rng):
    strategy = sign_strategy()
    d = random_direction(rng)
    lams = uniform_sphere().sample(rng, 50)
    vec = strategy.responses(lams, d)
    scalar = np.array([float(strategy.respond(lam, d)) for lam in lams])
    assert np.array_equal(vec, scalar)


def test_fixed_seed_reproducible(rng):
    a, b = random_direction(rng), random_direction(rng)
    e1 = lhv_correlation(sign_strategy(), uniform_sphere(), a, b, samples=5000, seed=7)
    e2 = lhv_correlation(sign_strategy(), uniform_sphere(), a, b, samples=5000, seed=7)
    assert e1.estimate == e2.estimate and e1.stderr == e2.stderr
