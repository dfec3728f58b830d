import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from catability.errors import DimensionMismatch
from catability.fock import HilbertConfig, basis_state, cat_state, coherent_state, fidelity_with_pure, to_density, wigner_grid
from catability.loss import (
    LossSpec,
    apply_loss,
    eta_from_amplitude_loss,
    eta_from_energy_loss,
    kraus_operators,
)

from conftest import random_density


def test_spec_validation():
    with pytest.raises(ValueError):
        LossSpec(1.2)
    with pytest.raises(ValueError):
        LossSpec(0.5, kmax=0)


def test_loss_percentage_conventions():
    assert abs(eta_from_energy_loss(30) ** 2 - 0.7) < 1e-15
    assert abs(eta_from_amplitude_loss(10) - 0.9) < 1e-15


def test_unit_transmissivity_is_identity():
    ops = kraus_operators(HilbertConfig(20), LossSpec(1.0))
    assert len(ops) == 1 and np.allclose(ops[0], np.eye(20))
    rho = random_density(np.random.default_rng(0), 20)
    assert np.max(np.abs(apply_loss(rho, 1.0) - rho)) < 1e-12


def test_full_loss_gives_vacuum():
    out = apply_loss(to_density(basis_state(20, 3)), 0.0)
    assert abs(out[0, 0].real - 1) < 1e-8


def test_kraus_completeness_interior():
    dim = 40
    ops = kraus_operators(dim, LossSpec(0.8))
    total = sum(m.conj().T @ m for m in ops)
    k = 32
    assert np.max(np.abs(total[:k, :k] - np.eye(k))) < 1e-8


def test_coherent_state_stays_coherent():
    cfg = HilbertConfig(40)
    out = apply_loss(to_density(coherent_state(cfg, 1.5)), 0.8)
    assert fidelity_with_pure(out, coherent_state(cfg, 1.2)) > 1 - 1e-8


def test_mean_photon_number_scales_with_eta_squared():
    cfg = HilbertConfig(50)
    rho = to_density(cat_state(cfg, 2.0, -1))
    n = np.arange(50)
    out = apply_loss(rho, 0.7)
    assert abs(np.real(np.diag(out)) @ n - 0.49 * np.real(np.diag(rho)) @ n) < 1e-6


def test_half_energy_loss_removes_wigner_negativity():
    rho = to_density(cat_state(HilbertConfig(40), 1.5, -1))
    out = apply_loss(rho, 1 / math.sqrt(2))
    xs = np.linspace(-4, 4, 41)
    assert wigner_grid(out, xs, xs).min() >= -1e-3


def test_non_square_input_rejected():
    with pytest.raises(DimensionMismatch):
        apply_loss(np.zeros((3, 4)), 0.5)


@given(st.sampled_from([0.0, 0.3, 0.7, 1.0]), st.integers(0, 2**16))
def test_trace_and_positivity(eta, seed):
    rho = random_density(np.random.default_rng(seed), 24, support=16)
    out = apply_loss(rho, eta)
    assert abs(np.trace(out).real - 1) < 1e-8
    assert np.linalg.eigvalsh(0.5 * (out + out.conj().T))[0] > -1e-8


@given(st.floats(0.2, 1.0), st.floats(0.2, 1.0), st.integers(0, 2**16))
def test_channels_compose_multiplicatively(e1, e2, seed):
    rho = random_density(np.random.default_rng(seed), 24, support=16)
    twice = apply_loss(apply_loss(rho, e1), e2)
    once = apply_loss(rho, e1 * e2)
    assert np.max(np.abs(twice - once)) < 1e-7
