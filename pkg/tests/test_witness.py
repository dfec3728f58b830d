import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from catability.errors import BadSymmetryIndex, CutoffTooSmall, SqueezeOutOfRange
from catability.fock import (
    HilbertConfig,
    cat_state,
    coherent_state,
    expectation,
    fidelity_with_pure,
    multi_headed_cat,
    squeeze_matrix,
)
from catability.witness import (
    WitnessParams,
    conjugated_witness,
    decomposed_witness,
    multi_head_operator,
    operator_spectrum,
    squeezed_witness_operator,
    witness_operator,
)

from conftest import coherent_series

DIM = 80


def test_params_validation():
    with pytest.raises(ValueError):
        WitnessParams(1.0, gamma=-1)
    with pytest.raises(BadSymmetryIndex):
        WitnessParams(1.0, heads=3, m=3)
    with pytest.raises(BadSymmetryIndex):
        WitnessParams(1.0, heads=1)


@pytest.mark.parametrize("alpha", [0.5, 1.5, 2.5])
@pytest.mark.parametrize("gamma", [0.0, 1.0, 5.0])
@pytest.mark.parametrize("sign", [1, -1])
def test_witness_is_hermitian_psd(alpha, gamma, sign):
    op = witness_operator(DIM, WitnessParams(alpha, gamma, sign))
    assert np.max(np.abs(op - op.conj().T)) < 1e-12
    k = int(0.8 * DIM)
    assert np.linalg.eigvalsh(op[:k, :k])[0] > -1e-8


@pytest.mark.parametrize("sign", [1, -1])
def test_matching_cat_is_annihilated(sign):
    cfg = HilbertConfig(DIM)
    psi = cat_state(cfg, 1.5, sign)
    assert abs(expectation(witness_operator(cfg, WitnessParams(1.5, 1.0, sign)), psi)) < 1e-8


def test_opposite_cat_costs_two_gamma():
    cfg = HilbertConfig(DIM)
    val = expectation(witness_operator(cfg, WitnessParams(2.0, 1.0, 1)), cat_state(cfg, 2.0, -1))
    assert abs(val.real - 2.0) < 1e-8


@pytest.mark.parametrize("beta,alpha,gamma,sign", [(1.3, 2.0, 0.7, 1), (0.4 + 0.9j, 1.1, 2.0, -1)])
def test_coherent_closed_form(beta, alpha, gamma, sign):
    psi = coherent_series(DIM, beta)
    val = expectation(witness_operator(DIM, WitnessParams(alpha, gamma, sign)), psi).real
    ref = abs(beta**2 - alpha**2) ** 2 + gamma * (1 - sign * math.exp(-2 * abs(beta) ** 2))
    assert abs(val - ref) < 1e-7


def test_cutoff_check():
    with pytest.raises(CutoffTooSmall):
        witness_operator(20, WitnessParams(3.0))


@pytest.mark.parametrize("alpha,gamma", [(0.5, 0.5), (1, 1), (2, 1), (2.5, 5), (0, 2)])
def test_decomposition_identity(alpha, gamma):
    k = int(0.8 * DIM)
    for sign in (1, -1):
        p = WitnessParams(alpha, gamma, sign)
        diff = decomposed_witness(DIM, p)[:k, :k] - witness_operator(DIM, p)[:k, :k]
        assert np.max(np.abs(diff)) < 1e-9


def test_decomposition_at_zero_amplitude_is_normal_ordered_quartic():
    n = np.arange(DIM, dtype=float)
    p = WitnessParams(0.0, 1.5, -1)
    ref = np.diag(n**2 - n + 1.5 * (1 + (-1.0) ** n))
    assert np.max(np.abs(decomposed_witness(DIM, p) - ref)) < 1e-9


def test_decomposed_expectation_on_odd_cat():
    cfg = HilbertConfig(DIM)
    val = expectation(decomposed_witness(cfg, WitnessParams(2.0, 1.0, -1)), cat_state(cfg, 2.0, -1))
    assert abs(val) < 1e-8


def test_squeezed_witness_at_zero_is_plain():
    p = WitnessParams(1.5, 1.0, -1)
    assert np.max(np.abs(squeezed_witness_operator(DIM, p) - witness_operator(DIM, p))) < 1e-10


def test_squeezed_witness_matches_conjugation():
    # explicit S^dag O S needs a much larger cutoff to be exact on the interior
    p = WitnessParams(1.5, 1.0, -1, squeeze_r=0.3)
    k = int(0.8 * DIM)
    diff = squeezed_witness_operator(DIM, p)[:k, :k] - conjugated_witness(200, p)[:k, :k]
    assert np.max(np.abs(diff)) < 1e-7


def test_squeezed_witness_ground_state():
    cfg = HilbertConfig(DIM)
    r = 0.3
    psi = squeeze_matrix(DIM, r).conj().T @ cat_state(cfg, 1.5, -1)
    op = squeezed_witness_operator(cfg, WitnessParams(1.5, 1.0, -1, squeeze_r=r))
    assert abs(expectation(op, psi)) < 1e-7


def test_squeeze_preserves_spectrum():
    plain = [e.value for e in operator_spectrum(DIM, WitnessParams(1.5, 1.0, -1), 4)]
    sq = [e.value for e in operator_spectrum(DIM, WitnessParams(1.5, 1.0, -1, squeeze_r=0.3), 4)]
    assert np.allclose(plain, sq, atol=1e-7)


def test_squeeze_range():
    with pytest.raises(SqueezeOutOfRange):
        squeezed_witness_operator(DIM, WitnessParams(1.0, squeeze_r=2.0))


def test_two_head_projector_form_halves_gamma():
    p2 = multi_head_operator(DIM, WitnessParams(1.2, 2.0, heads=2, m=0))
    p1 = witness_operator(DIM, WitnessParams(1.2, 1.0, 1))
    assert np.max(np.abs(p2 - p1)) < 1e-10


@pytest.mark.parametrize("m", [0, 1, 2])
def test_three_headed_cat_is_ground_state(m):
    cfg = HilbertConfig(DIM)
    psi = multi_headed_cat(cfg, 2.0, 3, m)
    op = multi_head_operator(cfg, WitnessParams(2.0, 1.0, heads=3, m=m))
    assert abs(expectation(op, psi)) < 1e-7


@pytest.mark.parametrize("m", [0, 1, 2])
def test_coherent_state_under_three_head_operator(m):
    cfg = HilbertConfig(DIM)
    psi = coherent_state(cfg, 2.0)
    op = multi_head_operator(cfg, WitnessParams(2.0, 1.0, heads=3, m=m))
    # Poisson weight outside the residue class n = -m (mod 3), summed directly
    outside = sum(math.exp(-4) * 4.0**n / math.factorial(n) for n in range(DIM) if (n + m) % 3)
    assert abs(expectation(op, psi).real - outside) < 1e-7


def test_sectors_are_exclusive():
    cfg = HilbertConfig(DIM)
    for ms in range(3):
        psi = multi_headed_cat(cfg, 2.0, 3, ms)
        for mo in range(3):
            val = expectation(multi_head_operator(cfg, WitnessParams(2.0, 1.0, heads=3, m=mo)), psi).real
            assert (val < 1e-7) == (ms == mo)


@pytest.mark.parametrize("sign", [1, -1])
def test_spectrum_ground_pair(sign):
    cfg = HilbertConfig(DIM)
    pairs = operator_spectrum(cfg, WitnessParams(2.0, 1.0, sign), 4)
    assert abs(pairs[0].value) < 1e-7
    assert abs(pairs[1].value - 2.0) < 1e-7
    assert fidelity_with_pure(pairs[0].vector, cat_state(cfg, 2.0, sign)) > 1 - 1e-7
    assert fidelity_with_pure(pairs[1].vector, cat_state(cfg, 2.0, -sign)) > 1 - 1e-6
    assert [p.value for p in pairs] == sorted(p.value for p in pairs)


@pytest.mark.parametrize("gamma", [0.5, 1.0, 2.0])
def test_first_excitation_scales_with_gamma(gamma):
    pairs = operator_spectrum(DIM, WitnessParams(2.0, gamma, -1), 2)
    assert abs(pairs[0].value) < 1e-7
    assert abs(pairs[1].value - 2 * gamma) < 1e-7


def test_spectrum_bounds():
    with pytest.raises(ValueError):
        operator_spectrum(DIM, WitnessParams(1.0), 9)
    flags = operator_spectrum(16, WitnessParams(0.5, 5.0), 6)
    assert any(p.truncation_dominated for p in flags)


@given(st.floats(0, 2.5), st.floats(0, 5), st.sampled_from([1, -1]))
def test_decomposition_identity_property(alpha, gamma, sign):
    p = WitnessParams(alpha, gamma, sign)
    k = 48
    diff = decomposed_witness(60, p)[:k, :k] - witness_operator(60, p)[:k, :k]
    assert np.max(np.abs(diff)) < 1e-8
