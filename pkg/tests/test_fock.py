import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.linalg import expm

from catability.errors import CutoffTooSmall, OutOfResolvedRegion, SqueezeOutOfRange, UnderResolved
from catability.fock import (
    HilbertConfig,
    annihilation,
    basis_state,
    cat_state,
    coherent_state,
    cutoff_dim,
    db_to_r,
    displaced,
    displacement,
    displacement_matrix,
    expectation,
    fidelity_with_pure,
    multi_headed_cat,
    number_parity_ops,
    parse_sign,
    photonic_approximation,
    quadratures,
    r_to_db,
    rotation,
    squeeze,
    to_density,
    wigner_grid,
    wigner_point,
)

from conftest import coherent_series


def test_config_rejects_small_dim():
    with pytest.raises(CutoffTooSmall):
        HilbertConfig(4)
    assert HilbertConfig(50).interior == 40


def test_annihilation_small_matrix():
    a = annihilation(3)
    expected = np.array([[0, 1, 0], [0, 0, math.sqrt(2)], [0, 0, 0]])
    assert np.allclose(a, expected)
    assert np.allclose(a @ basis_state(3, 0), 0)


def test_annihilation_on_coherent_state():
    psi = coherent_series(40, 0.7)
    assert abs(np.vdot(psi, annihilation(40) @ psi) - 0.7) < 1e-8


def test_number_and_parity():
    n, parity = number_parity_ops(10)
    assert np.allclose(np.diag(n), np.arange(10))
    assert np.vdot(basis_state(10, 1), parity @ basis_state(10, 1)).real == -1
    assert np.allclose(parity @ parity, np.eye(10))


def test_coherent_parity_closed_form():
    cfg = HilbertConfig(40)
    _, parity = number_parity_ops(cfg)
    psi = coherent_state(cfg, 1.0)
    assert abs(expectation(parity, psi).real - math.exp(-2)) < 1e-8


def test_displacement_maps_vacuum_to_minus_beta():
    # D(beta) = exp(conj(beta) a - beta a^dag) sends |0> to |-beta>
    cfg = HilbertConfig(60)
    beta = 1.2 - 0.5j
    out = displacement(cfg, beta) @ basis_state(cfg, 0)
    assert fidelity_with_pure(out, coherent_series(60, -beta)) > 1 - 1e-12


def test_displacement_matches_matrix_exponential_on_interior():
    dim, beta = 80, 0.8 + 0.6j
    a = annihilation(dim)
    ref = expm(np.conj(beta) * a - beta * a.conj().T)
    k = 40
    assert np.max(np.abs(displacement_matrix(dim, beta)[:k, :k] - ref[:k, :k])) < 1e-10


def test_displacement_undoes_coherent_amplitude():
    cfg = HilbertConfig(50)
    psi = coherent_state(cfg, 1.5)
    back = displacement(cfg, 1.5) @ psi
    assert abs(back[0]) ** 2 > 1 - 1e-10


def test_displacement_requires_resolved_amplitude():
    with pytest.raises(CutoffTooSmall):
        displacement(HilbertConfig(20), 3.0)


def test_squeezed_vacuum_variance():
    cfg = HilbertConfig(80)
    r = 0.25
    psi = squeeze(cfg, r) @ basis_state(cfg, 0)
    x, p = quadratures(cfg)
    assert abs(expectation(x @ x, psi).real - math.exp(-2 * r) / 2) < 1e-10
    assert abs(expectation(p @ p, psi).real - math.exp(2 * r) / 2) < 1e-10


def test_squeeze_limit():
    with pytest.raises(SqueezeOutOfRange):
        squeeze(HilbertConfig(40), 2.0)


def test_rotation_rotates_coherent_amplitude():
    cfg = HilbertConfig(40)
    psi = rotation(40, 0.9) @ coherent_state(cfg, 1.1)
    assert fidelity_with_pure(psi, coherent_series(40, 1.1 * np.exp(0.9j))) > 1 - 1e-12


@pytest.mark.parametrize("alpha", [0.3, 1.0, 2.5])
@pytest.mark.parametrize("sign", [1, -1])
def test_cat_state_matches_superposition(alpha, sign):
    cfg = HilbertConfig(cutoff_dim(alpha))
    ref = coherent_series(cfg.dim, alpha) + sign * coherent_series(cfg.dim, -alpha)
    norm = 1 / math.sqrt(2 * (1 + sign * math.exp(-2 * alpha**2)))
    assert np.allclose(cat_state(cfg, alpha, sign), norm * ref, atol=1e-12)


def test_cat_parity_support():
    psi = cat_state(HilbertConfig(40), 1.5, "odd")
    assert np.max(np.abs(psi[0::2])) < 1e-15


def test_odd_cat_at_zero_is_rejected():
    with pytest.raises(ValueError):
        cat_state(HilbertConfig(40), 0.0, -1)


@pytest.mark.parametrize("m", [0, 1, 2])
def test_three_headed_cat_residue_class(m):
    psi = multi_headed_cat(HilbertConfig(60), 2.0, 3, m)
    n = np.arange(60)
    assert np.max(np.abs(psi[(n + m) % 3 != 0])) < 1e-12
    assert abs(np.linalg.norm(psi) - 1) < 1e-12


def test_under_resolved_state_is_flagged():
    with pytest.raises(UnderResolved):
        coherent_state(HilbertConfig(30, tail_tol=1e-30), 2.0)


def test_photonic_approximations_parity():
    cfg = HilbertConfig(60)
    odd = photonic_approximation(cfg, "single-photon", -0.3)
    even = photonic_approximation(cfg, "zero-two", -0.3, 0.618)
    assert np.max(np.abs(odd[0::2])) < 1e-12
    assert np.max(np.abs(even[1::2])) < 1e-12


def test_db_conversions():
    assert abs(db_to_r(-5, "exp2r") - 5 * math.log(10) / 20) < 1e-15
    assert abs(db_to_r(-5, "exp4r") - 5 * math.log(10) / 40) < 1e-15
    assert abs(r_to_db(db_to_r(-3.2, "exp4r"), "exp4r") + 3.2) < 1e-12


def test_parse_sign():
    assert parse_sign("+") == parse_sign("even") == 1
    assert parse_sign("-") == parse_sign(-1) == -1
    with pytest.raises(ValueError):
        parse_sign("?")


def test_vacuum_wigner_peak():
    rho = to_density(basis_state(40, 0))
    assert abs(wigner_point(rho, 0, 0) - 1 / math.pi) < 1e-10
    xs = np.linspace(-1, 1, 5)
    w = wigner_grid(rho, xs, xs)
    assert np.unravel_index(np.argmax(w), w.shape) == (2, 2)


def test_coherent_wigner_is_shifted_gaussian():
    beta = 0.7 + 0.2j
    rho = to_density(coherent_series(50, beta))
    x0, p0 = math.sqrt(2) * beta.real, math.sqrt(2) * beta.imag
    for x, p in [(0.0, 0.0), (1.0, 0.3), (-0.5, 1.2)]:
        ref = math.exp(-((x - x0) ** 2) - (p - p0) ** 2) / math.pi
        assert abs(wigner_point(rho, x, p) - ref) < 1e-9


def test_odd_cat_wigner_origin():
    psi = cat_state(HilbertConfig(40), 1.5, -1)
    assert abs(wigner_point(psi, 0, 0) + 1 / math.pi) < 1e-10


def test_wigner_normalisation():
    psi = cat_state(HilbertConfig(40), 1.0, 1)
    xs = np.linspace(-5, 5, 61)
    w = wigner_grid(psi, xs, xs)
    step = xs[1] - xs[0]
    assert abs(w.sum() * step * step - 1) < 1e-6


def test_wigner_outside_resolved_region():
    with pytest.raises(OutOfResolvedRegion):
        wigner_point(to_density(basis_state(10, 0)), 10.0, 0.0)


def test_displaced_pads_cutoff():
    psi = coherent_state(HilbertConfig(40), 2.0)
    moved = displaced(psi, -2.0)
    assert moved.shape[0] > 40
    assert abs(np.trace(moved).real - 1) < 1e-10


@given(st.floats(-2, 2), st.floats(-2, 2))
def test_displacement_is_unitary_on_interior(re, im):
    dim = 80
    d = displacement_matrix(dim, complex(re, im))
    k = 30
    block = (d.conj().T @ d)[:k, :k]
    assert np.max(np.abs(block - np.eye(k))) < 1e-9


@given(st.floats(-1.5, 1.5), st.floats(-1.5, 1.5))
def test_displacements_compose_up_to_phase(b1, b2):
    dim = 80
    vac = basis_state(dim, 0)
    out = displacement_matrix(dim, b1) @ displacement_matrix(dim, b2) @ vac
    assert fidelity_with_pure(out, coherent_series(dim, -(b1 + b2))) > 1 - 1e-10
