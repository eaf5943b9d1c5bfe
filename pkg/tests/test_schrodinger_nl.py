import numpy as np
import pytest

from nllab.contextuality import (
    CommutingSet,
    commuting_sets_mermin,
    coordinate_axes,
    joint_spectrum,
    peres33_directions,
)
from nllab.entangle import conjugation, me_state
from nllab.linalg import StateVector, max_abs, tensor
from nllab.schrodinger_nl import (
    BadIndicesError,
    NoKeptTrialsError,
    bellext_state,
    block_projector,
    conditional_correlation,
    conditional_expectation,
    embed_matrix,
    embed_spin_half,
    embed_spin1_squared,
    measurement_distribution,
    product_procedure_measure,
    sample_joint_outcome,
    schrodinger_ks_demo,
    schrodinger_mermin_demo,
)
from nllab.spin import X_HAT, Y_HAT, Z_HAT, random_direction, sigma, singlet


def pair_set(d, n=2):
    eye = np.eye(n, dtype=complex)
    return CommutingSet(
        ops=(tensor(sigma(d), eye), tensor(eye, sigma(d))),
        labels=("s1", "s2"),
    )


def test_eigenstate_input_is_deterministic(rng):
    cs = pair_set(Z_HAT)
    up_down = StateVector((2, 2), [0.0, 1.0, 0.0, 0.0])
    for _ in range(10):
        out = sample_joint_outcome(up_down, cs, rng)
        assert out.values[0] == pytest.approx(1.0, abs=1e-8)
        assert out.values[1] == pytest.approx(-1.0, abs=1e-8)


def test_singlet_outcomes_opposite_and_balanced(rng):
    d = random_direction(rng)
    dist = measurement_distribution(singlet(), pair_set(d))
    idx = dist.sample_indices(rng, 10_000)
    vals = np.array(dist.tuples)[idx]
    assert np.all(np.abs(vals[:, 0] + vals[:, 1]) <= 1e-6)
    frac = float(np.mean(vals[:, 0] > 0.0))
    assert abs(frac - 0.5) <= 4.0 * np.sqrt(0.25 / 10_000)


def test_born_frequencies_match_weights(rng):
    amps = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    state = StateVector((2, 2), amps)
    cs = pair_set(random_direction(rng))
    dist = measurement_distribution(state, cs)
    n = 10_000
    idx = dist.sample_indices(rng, n)
    for k, w in enumerate(dist.weights):
        freq = float(np.mean(idx == k))
        sigma_k = np.sqrt(max(w * (1.0 - w), 1e-12) / n)
        assert abs(freq - w) <= 4.0 * max(sigma_k, 1e-3)


def test_repeatability(rng):
    state = StateVector((2, 2), rng.standard_normal(4) + 1j * rng.standard_normal(4))
    cs = pair_set(random_direction(rng))
    first = sample_joint_outcome(state, cs, rng)
    for _ in range(5):
        again = sample_joint_outcome(first.post_state, cs, rng)
        assert np.allclose(again.values, first.values, atol=1e-8)


def test_outcome_tuples_live_in_joint_spectrum(rng):
    state = StateVector((2, 2), rng.standard_normal(4) + 1j * rng.standard_normal(4))
    cs = commuting_sets_mermin()[2]
    spectrum = [vals for vals, _ in joint_spectrum(cs)]
    for _ in range(10):
        out = sample_joint_outcome(state, cs, rng)
        assert any(np.allclose(out.values, vals, atol=1e-8) for vals in spectrum)


def test_me_state_partner_agreement_sampled(rng):
    state = me_state(conjugation(3))
    d = random_direction(rng)
    from nllab.entangle import tilde
    from nllab.spin import spin1_squared

    a = spin1_squared(d)
    cs = CommutingSet(
        ops=(tensor(tilde(a, state.u), np.eye(3)), tensor(np.eye(3), a)),
        labels=("twin", "a"),
    )
    dist = measurement_distribution(state.state, cs)
    idx = dist.sample_indices(rng, 10_000)
    vals = np.array(dist.tuples)[idx]
    assert np.all(np.abs(vals[:, 0] - vals[:, 1]) <= 1e-6)


def test_embed_trivial_and_block():
    d = Z_HAT
    assert max_abs(embed_spin_half(2, (0, 1), d).matrix - sigma(d)) == 0.0
    emb = embed_spin_half(4, (0, 1), d)
    assert max_abs(emb.matrix - np.diag([1.0, -1.0, 0.0, 0.0])) == 0.0
    comp = np.diag([0.0, 0.0, 1.0, 1.0]).astype(complex)
    assert max_abs(emb.matrix @ comp) == 0.0


def test_embed_partner_negates_block(rng):
    d = random_direction(rng)
    plain = embed_spin_half(5, (1, 3), d)
    partner = embed_spin_half(5, (1, 3), d, partner=True)
    assert max_abs(plain.matrix + partner.matrix) <= 1e-12


def test_embed_bad_indices():
    with pytest.raises(BadIndicesError):
        embed_matrix(3, (0, 3), np.eye(2))
    with pytest.raises(BadIndicesError):
        embed_matrix(3, (1, 1), np.eye(2))


def test_bellext_zero_eigenstate(rng):
    state = bellext_state(4)
    eye = np.eye(4, dtype=complex)
    for _ in range(10):
        d = random_direction(rng)
        xi = embed_spin_half(4, (0, 1), d).matrix
        total = tensor(xi, eye) + tensor(eye, xi)
        assert np.linalg.norm(total @ state.state.amps) <= 1e-12


def test_conditional_correlation_n2(rng):
    a, b = random_direction(rng), random_direction(rng)
    est = conditional_correlation(singlet(), a, b, samples=20_000, rng=rng)
    assert est.keep_fraction == 1.0
    assert abs(est.estimate + a.dot(b)) <= 3.0 * est.stderr


def test_conditional_correlation_bellext(rng):
    state = bellext_state(4).state
    a, b = random_direction(rng), random_direction(rng)
    est = conditional_correlation(state, a, b, samples=25_000, rng=rng)
    analytic, keep_prob = conditional_expectation(state, a, b)
    assert keep_prob == pytest.approx(0.5, abs=1e-12)
    assert analytic == pytest.approx(-a.dot(b), abs=1e-12)
    assert abs(est.estimate - analytic) <= 3.0 * est.stderr
    assert abs(est.keep_fraction - 0.5) <= 4.0 * np.sqrt(0.25 / 25_000)


def test_conditional_equal_settings_exact(rng):
    state = bellext_state(4).state
    d = random_direction(rng)
    est = conditional_correlation(state, d, d, samples=3_000, rng=rng)
    assert est.estimate == pytest.approx(-1.0, abs=1e-9)


def test_conditional_no_kept_trials(rng):
    # state supported entirely outside the conditioning blocks
    amps = np.zeros(16)
    amps[2 * 4 + 3] = 1.0
    state = StateVector((4, 4), amps)
    with pytest.raises(NoKeptTrialsError):
        conditional_correlation(state, X_HAT, Y_HAT, samples=100, rng=rng)


def test_ks_demo_axes_and_peres():
    rep = schrodinger_ks_demo(3, coordinate_axes())
    assert rep.residual_max <= 1e-10
    assert not rep.coloring.uncolorable
    assert not rep.contradiction
    rep33 = schrodinger_ks_demo(3, peres33_directions())
    assert rep33.residual_max <= 1e-10
    assert rep33.coloring.uncolorable
    assert rep33.contradiction


def test_ks_demo_embedded_dimension_four():
    rep = schrodinger_ks_demo(4, coordinate_axes())
    assert rep.residual_max <= 1e-10
    assert rep.projector_residual is not None
    assert rep.projector_residual <= 1e-10


def test_embedded_triad_spectrum_conditioned_on_projector():
    zx = embed_spin1_squared(4, (0, 1, 2), X_HAT).matrix
    zy = embed_spin1_squared(4, (0, 1, 2), Y_HAT).matrix
    zz = embed_spin1_squared(4, (0, 1, 2), Z_HAT).matrix
    proj = block_projector(4, (0, 1, 2))
    cs = CommutingSet(ops=(proj, zx, zy, zz), labels=("P", "zx", "zy", "zz"))
    inside = sorted(
        tuple(round(v, 6) for v in vals[1:])
        for vals, _ in joint_spectrum(cs)
        if vals[0] > 0.5
    )
    assert inside == [(0.0, 1.0, 1.0), (1.0, 0.0, 1.0), (1.0, 1.0, 0.0)]


def test_product_procedure(rng):
    s = singlet()
    sets = commuting_sets_mermin()
    for cs in (sets[0], sets[4]):
        for _ in range(10):
            out = product_procedure_measure(s, cs, rng)
            assert out.values[0] == pytest.approx(out.values[1] * out.values[2], abs=1e-9)
            spectrum = [vals for vals, _ in joint_spectrum(cs)]
            assert any(np.allclose(out.values, vals, atol=1e-8) for vals in spectrum)
    with pytest.raises(ValueError):
        product_procedure_measure(s, sets[6], rng)


def test_mermin_demo(rng):
    rep = schrodinger_mermin_demo(trials=200, rng=rng)
    assert rep.perfect
    assert rep.equality_rate == 1.0
    assert len(rep.runs) == 20
    assert rep.marginal_max_gap_sigmas <= 4.0
    assert rep.value_map.assignments_all_plus_one
    assert rep.value_map.operator_deviation <= 1e-12
    contexts_per_obs = {}
    for run in rep.runs:
        contexts_per_obs.setdefault(run.observable, []).append(run.context)
    assert all(len(v) == 2 for v in contexts_per_obs.values())
