import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from catability.errors import BenchmarkUnavailable
from catability.fock import (
    HilbertConfig,
    cat_state,
    coherent_state,
    expectation,
    multi_headed_cat,
    photonic_approximation,
    squeeze,
    basis_state,
    to_density,
)
from catability.gaussian import (
    gaussian_amplitudes,
    maximize_gaussian_fidelity,
    minimize_gaussian_expectation,
)
from catability.loss import LossSpec, apply_loss, eta_from_energy_loss
from catability.metrics import (
    GammaSearchSpec,
    MultiHeadBenchmark,
    catability,
    global_catability,
    global_normalized_infidelity,
    multihead_catability,
    multihead_infidelity,
    normalized_infidelity,
    state_moments,
)
from catability.witness import WitnessParams, multi_head_operator, witness_operator

from conftest import random_density

DIM = 60


# --- moments (no table needed) -------------------------------------------------------


@given(st.integers(0, 2**32 - 1), st.floats(0, 2.5), st.floats(0, 5), st.sampled_from([1, -1]))
def test_numerator_matches_operator_expectation(seed, alpha, gamma, sign):
    rho = random_density(np.random.default_rng(seed), DIM, support=20)
    want = expectation(witness_operator(DIM, WitnessParams(alpha, gamma, sign)), rho).real
    assert state_moments(rho, sign).numerator(alpha, gamma) == pytest.approx(want, abs=1e-9)


@given(st.integers(0, 2**32 - 1), st.integers(3, 4), st.integers(0, 3), st.floats(0, 2.5))
def test_multihead_numerator_matches_operator(seed, heads, m, gamma):
    m %= heads
    rho = random_density(np.random.default_rng(seed), DIM, support=20)
    alpha = 1.2 * np.exp(0.3j)
    want = expectation(multi_head_operator(DIM, WitnessParams(alpha, gamma, heads=heads, m=m)), rho).real
    assert state_moments(rho, None, heads, m).numerator(alpha, gamma) == pytest.approx(want, abs=1e-9)


def test_gamma_search_spec_validation():
    with pytest.raises(ValueError):
        GammaSearchSpec(lo=2, hi=1)
    with pytest.raises(ValueError):
        GammaSearchSpec(n_grid=1)


# --- two-headed metrics with the shipped table -------------------------------------------


@pytest.mark.parametrize("alpha", [0.5, 1.5, 2.5])
@pytest.mark.parametrize("sign", [1, -1])
def test_ideal_cat_endpoints(bench, alpha, sign):
    rho = to_density(cat_state(HilbertConfig(DIM), alpha, sign))
    assert catability(rho, alpha, sign, bench=bench).value < 1e-6
    assert normalized_infidelity(rho, alpha, sign, bench).value < 1e-6


@pytest.mark.parametrize("beta", [0.0, 0.7, 1.5])
@pytest.mark.parametrize("sign", [1, -1])
def test_coherent_inputs_are_not_certified(bench, beta, sign):
    rho = to_density(coherent_state(HilbertConfig(DIM), beta))
    for alpha in (0.5, 1.5):
        assert catability(rho, alpha, sign, bench=bench).value >= 1 - 1e-6


@pytest.mark.parametrize("r", [-0.5, 0.3])
def test_squeezed_vacuum_is_not_certified(bench, r):
    cfg = HilbertConfig(DIM)
    rho = to_density(squeeze(cfg, r) @ basis_state(cfg, 0))
    assert global_catability(rho, bench=bench).value >= 1 - 1e-6


def test_floor_state_scores_one(bench):
    # the Gaussian state attaining the floor at gamma=1 has ratio 1 there, so xi <= 1 and xi >= 1
    opt = minimize_gaussian_expectation(1.5, 1.0, -1)
    psi = gaussian_amplitudes(DIM, opt.params)
    res = catability(to_density(psi), 1.5, -1, bench=bench)
    assert res.value == pytest.approx(1.0, abs=1e-6)


def test_best_gaussian_has_unit_zeta(bench):
    opt = maximize_gaussian_fidelity(1.5, -1)
    psi = gaussian_amplitudes(DIM, opt.params)
    assert normalized_infidelity(to_density(psi), 1.5, -1, bench).value == pytest.approx(1.0, abs=1e-6)


def test_lossy_cat_against_independent_gamma_scan(bench):
    rho = apply_loss(to_density(cat_state(HilbertConfig(DIM), 1.5, -1)), LossSpec(0.9))
    res = catability(rho, 1.5, -1, bench=bench)
    assert 0 < res.value < 1

    def ratio(g):
        op = witness_operator(DIM, WitnessParams(1.5, g, -1))
        return expectation(op, rho).real / minimize_gaussian_expectation(1.5, g, -1).value

    assert ratio(res.optimal_gamma) == pytest.approx(res.value, rel=1e-8)
    scan = min(ratio(g) for g in np.linspace(0.25, 5, 20))
    assert res.value <= scan * (1 + 1e-6)


def test_interpolated_floor_is_close_to_exact(bench):
    rho = apply_loss(to_density(cat_state(HilbertConfig(DIM), 1.23, 1)), LossSpec(0.95))
    exact = catability(rho, 1.23, 1, bench=bench)
    fast = catability(rho, 1.23, 1, bench=bench, exact=False)
    assert fast.value == pytest.approx(exact.value, rel=5e-3)


def test_catability_is_monotone_in_loss(bench):
    rho = to_density(cat_state(HilbertConfig(DIM), 1.5, -1))
    vals = [catability(apply_loss(rho, LossSpec(eta)), 1.5, -1, bench=bench).value
            for eta in (1.0, 0.95, 0.9, 0.8)]
    assert all(b >= a - 1e-9 for a, b in zip(vals, vals[1:]))


def test_global_search_recovers_cat_parameters(bench):
    rho = apply_loss(to_density(cat_state(HilbertConfig(DIM), 2.0, -1)), LossSpec(0.97))
    xi = global_catability(rho, bench=bench)
    zeta = global_normalized_infidelity(rho, bench=bench)
    assert xi.sign == -1 and zeta.sign == -1
    assert abs(xi.optimal_alpha) == pytest.approx(2.0, abs=0.1)
    assert abs(zeta.optimal_alpha) == pytest.approx(2.0, abs=0.1)
    assert xi.value < 1 and len(xi.trace) == bench.alpha_grid.size


def test_squeezed_single_photon_is_certified(bench):
    r = -5 / (20 * math.log10(math.e))  # -5 dB with the variance law e^(2r)
    rho = to_density(photonic_approximation(HilbertConfig(DIM), "single-photon", r))
    xi = global_catability(rho, bench=bench)
    assert xi.value < 1 and xi.sign == -1 and 0.5 < abs(xi.optimal_alpha) < 1.6


def test_alpha_range_must_hold_nodes(bench):
    rho = to_density(coherent_state(HilbertConfig(DIM), 1.0))
    with pytest.raises(BenchmarkUnavailable):
        global_catability(rho, alpha_range=(1.001, 1.002), bench=bench)


def test_result_dict_round_trip(bench):
    rho = to_density(cat_state(HilbertConfig(DIM), 1.0, 1))
    d = catability(rho, 1.0, 1, bench=bench).as_dict()
    assert d["kind"] == "xi" and d["sign"] == 1 and d["optimal_alpha_re"] == 1.0


# --- N-headed -------------------------------------------------------------------------


@pytest.fixture(scope="module")
def three_head():
    return {m: MultiHeadBenchmark(2.0, 3, m) for m in range(3)}


def test_multihead_floors_are_positive_and_increasing(three_head):
    row = three_head[0].floor_row()
    assert row[0] == 0 and np.all(row[1:] > 0)
    assert np.all(np.diff(row) >= -1e-9)


@pytest.mark.parametrize("m", [0, 1, 2])
def test_multihead_ideal_endpoints(three_head, m):
    rho = to_density(multi_headed_cat(HilbertConfig(DIM), 2.0, 3, m))
    assert multihead_catability(rho, three_head[m]).value < 1e-6
    assert multihead_infidelity(rho, three_head[m]).value < 1e-6


def test_multihead_sectors_are_exclusive(three_head):
    for state_m in range(3):
        rho = to_density(multi_headed_cat(HilbertConfig(DIM), 2.0, 3, state_m))
        for op_m in range(3):
            xi = multihead_catability(rho, three_head[op_m]).value
            if op_m == state_m:
                assert xi < 1e-6
            else:
                assert xi > 0.1


def test_multihead_coherent_state_is_not_certified(three_head):
    rho = to_density(coherent_state(HilbertConfig(DIM), 2.0))
    for bench in three_head.values():
        assert multihead_catability(rho, bench).value >= 1 - 1e-6


def test_multihead_catability_grows_with_loss(three_head):
    psi = multi_headed_cat(HilbertConfig(DIM), 2.0, 3, 0)
    vals = [multihead_catability(apply_loss(to_density(psi), LossSpec(eta_from_energy_loss(p))),
                                 three_head[0]).value for p in (0, 5, 10)]
    assert vals[0] < vals[1] < vals[2]
