"""Gaussian-state benchmarks: the best value any Gaussian state reaches.

A pure single-mode Gaussian state is parametrised by its quadrature means
(u, v) and a squeeze/rotation pair (r, theta) with covariance
sigma = R(theta) S(r) sigma_vac S(r)^T R(theta)^T, S(r) = diag(e^{-2r}, e^{2r}).
In Fock space that is D_std(mu) exp(-i theta n) S_fock(2r)|0> with
mu = (u + i v)/sqrt(2).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numba
import numpy as np
from scipy.optimize import minimize
from scipy.stats import qmc

from .errors import OptimizerDidNotConverge
from .fock import (
    basis_state,
    cat_state,
    cutoff_dim,
    displacement_matrix,
    HilbertConfig,
    parse_sign,
    rotation,
    squeeze_matrix,
)


@dataclass(frozen=True)
class GaussianParams:
    u: float
    v: float
    r: float
    theta: float

    @property
    def mean_amplitude(self) -> complex:
        return complex(self.u, self.v) / math.sqrt(2)

    @property
    def covariance(self) -> tuple[float, float, float]:
        return covariance_from_params(self)

    @classmethod
    def coherent(cls, beta: complex) -> "GaussianParams":
        return cls(math.sqrt(2) * beta.real, math.sqrt(2) * complex(beta).imag, 0.0, 0.0)


def covariance_from_params(gp: GaussianParams) -> tuple[float, float, float]:
    c, s = math.cos(gp.theta), math.sin(gp.theta)
    e = math.exp(4 * gp.r)
    return (
        0.5 * (c * c / e + e * s * s),
        0.5 * (e * c * c + s * s / e),
        0.5 * (e - 1 / e) * c * s,
    )


def _closed_form(x, beta_re, beta_im, gamma, sign):
    # Weyl-ordered moments of (a^dag^2 - beta*)(a^2 - beta) with beta = alpha^2,
    # keeping the A*B product explicit; parity from the Wigner value at the origin.
    u, v, r, th = x
    c, s = math.cos(th), math.sin(th)
    e = math.exp(4 * r)
    ei = 1 / e
    A = 0.5 * (c * c * ei + e * s * s)
    B = 0.5 * (e * c * c + s * s * ei)
    C = 0.5 * (e - ei) * c * s
    uu, vv = u * u, v * v
    quartic = (
        0.25 * (vv * vv + 2 * ((uu + A) * vv + 4 * C * u * v + B * uu + 2 * C * C + A * B)
                + 6 * B * vv + uu * uu + 6 * A * uu + 3 * B * B + 3 * A * A - 1)
        - uu - vv
        - beta_re * (uu - vv - B + A)
        - 2 * beta_im * (u * v + C)
        + beta_re * beta_re + beta_im * beta_im - A - B + 0.75
    )
    parity = math.exp(2 * (u * (C * v - B * u) + v * (C * u - A * v)))
    return quartic + gamma * (1 - sign * parity)


def gaussian_expectation(gp: GaussianParams, alpha: complex, gamma: float, sign) -> float:
    """Closed-form <O_(sign)(alpha, gamma)> for the pure Gaussian state ``gp``."""
    beta = complex(alpha) ** 2
    return _closed_form((gp.u, gp.v, gp.r, gp.theta), beta.real, beta.imag, gamma, parse_sign(sign))


def gaussian_parity(gp: GaussianParams) -> float:
    A, B, C = covariance_from_params(gp)
    u, v = gp.u, gp.v
    return math.exp(2 * (u * (C * v - B * u) + v * (C * u - A * v)))


def gaussian_state_matrix(dim: int, gp: GaussianParams) -> np.ndarray:
    """Gaussian state built by applying squeeze, rotation, displacement matrices
    to the vacuum. Slow; used as the independent reference."""
    psi = squeeze_matrix(dim, 2 * gp.r) @ basis_state(dim, 0)
    psi = rotation(dim, -gp.theta) @ psi
    # D_std(mu) = D(-mu) in the package convention
    return displacement_matrix(dim, -gp.mean_amplitude) @ psi


@numba.njit(cache=True)
def _amplitude_recurrence(dim, mu, t, c0):
    out = np.empty(dim, dtype=np.complex128)
    out[0] = c0
    if dim > 1:
        b = mu + t * np.conj(mu)
        out[1] = b * c0
        for n in range(1, dim - 1):
            out[n + 1] = (b * out[n] - t * math.sqrt(n) * out[n - 1]) / math.sqrt(n + 1)
    return out


def gaussian_amplitudes(dim: int, gp: GaussianParams) -> np.ndarray:
    """Exact Fock amplitudes <n|psi_G>, n < dim, from the generating function
    exp(b z - t z^2 / 2) of a displaced squeezed vacuum. Not renormalised."""
    mu = gp.mean_amplitude
    t = np.exp(-2j * gp.theta) * math.tanh(2 * gp.r)
    c0 = np.exp(-abs(mu) ** 2 / 2 - 0.5 * t * np.conj(mu) ** 2) / math.sqrt(math.cosh(2 * gp.r))
    return _amplitude_recurrence(dim, complex(mu), complex(t), complex(c0))


# --- optimisation ------------------------------------------------------------


@dataclass(frozen=True)
class Budget:
    """Multi-start Nelder-Mead settings."""

    n_starts: int = 32
    max_evals: int = 2000
    xatol: float = 1e-8
    fatol: float = 1e-12
    seed: int = 20250
    r_box: float = 1.0


@dataclass(frozen=True)
class GaussianOptimum:
    params: GaussianParams
    value: float
    converged: bool
    starts: tuple = field(default=(), repr=False)


def start_points(alpha: complex, budget: Budget) -> np.ndarray:
    """Deterministic starts: vacuum, coherent states at +-alpha, then a Latin
    hypercube over |u|,|v| <= sqrt(2)(|alpha| + 2), |r| <= r_box, theta in [0, pi)."""
    half = math.sqrt(2) * (abs(alpha) + 2)
    lo = np.array([-half, -half, -budget.r_box, 0.0])
    hi = np.array([half, half, budget.r_box, math.pi])
    unit = qmc.LatinHypercube(d=4, seed=budget.seed).random(budget.n_starts)
    a = complex(alpha)
    special = np.array([
        [0.0, 0.0, 0.0, 0.0],
        [math.sqrt(2) * a.real, math.sqrt(2) * a.imag, 0.0, 0.0],
        [-math.sqrt(2) * a.real, -math.sqrt(2) * a.imag, 0.0, 0.0],
    ])
    return np.vstack([special, lo + unit * (hi - lo)])


def _multistart(fun, starts, budget: Budget, label: str) -> GaussianOptimum:
    best = None
    for x0 in starts:
        res = minimize(
            fun, x0, method="Nelder-Mead",
            options=dict(xatol=budget.xatol, fatol=budget.fatol, maxfev=budget.max_evals),
        )
        if best is None or res.fun < best.fun:
            best = res
    x = best.x
    params = GaussianParams(float(x[0]), float(x[1]), float(x[2]), float(x[3]) % math.pi)
    if not best.success:
        warnings.warn(f"{label}: best start stopped at the evaluation limit", OptimizerDidNotConverge)
    return GaussianOptimum(params, float(best.fun), bool(best.success), tuple(map(tuple, starts)))


def minimize_gaussian_expectation(alpha: complex, gamma: float, sign, budget: Budget | None = None) -> GaussianOptimum:
    """Lowest <O_(sign)(alpha, gamma)> over pure Gaussian states (closed form)."""
    if gamma < 0:
        raise ValueError(f"gamma must be >= 0, got {gamma}")
    budget = budget or Budget()
    s = parse_sign(sign)
    beta = complex(alpha) ** 2
    fun = lambda x: _closed_form(x, beta.real, beta.imag, gamma, s)  # noqa: E731
    return _multistart(fun, start_points(alpha, budget), budget, f"floor(alpha={alpha}, gamma={gamma})")


def maximize_gaussian_overlap(target: np.ndarray, scale: float, budget: Budget | None = None) -> GaussianOptimum:
    """Largest |<target|psi_G>|^2; ``scale`` sets the displacement search box.

    Amplitudes are exact, so the overlap is exact whenever ``target`` is
    resolved in its own cutoff. ``value`` is the fidelity (not its negative).
    """
    budget = budget or Budget()
    dim = target.shape[0]
    conj_t = np.conj(target)

    def fun(x):
        amps = gaussian_amplitudes(dim, GaussianParams(*x))
        return -abs(conj_t @ amps) ** 2

    opt = _multistart(fun, start_points(scale, budget), budget, "gaussian fidelity")
    return GaussianOptimum(opt.params, -opt.value, opt.converged, opt.starts)


def maximize_gaussian_fidelity(alpha: complex, sign, budget: Budget | None = None) -> GaussianOptimum:
    """Best Gaussian fidelity with the cat |alpha, sign>."""
    cfg = HilbertConfig(cutoff_dim(alpha))
    return maximize_gaussian_overlap(cat_state(cfg, alpha, sign), abs(alpha), budget)


def minimize_gaussian_operator(op: np.ndarray, scale: float, budget: Budget | None = None,
                               max_tail: float = 1e-10) -> GaussianOptimum:
    """Lowest <psi_G|op|psi_G> for a Fock-space operator with no closed form.

    States whose amplitudes leak more than ``max_tail`` beyond the operator's
    cutoff are penalised so that truncation cannot fake a low value.
    """
    budget = budget or Budget(r_box=0.5)
    dim = op.shape[0]

    def fun(x):
        amps = gaussian_amplitudes(dim, GaussianParams(*x))
        val = np.vdot(amps, op @ amps).real
        deficit = 1 - np.vdot(amps, amps).real
        if deficit > max_tail:
            val += 1e3 * (1 + deficit)
        return val

    return _multistart(fun, start_points(scale, budget), budget, "gaussian operator floor")


def _ladder_weights(dim: int, heads: int) -> np.ndarray:
    """sqrt((n+1)...(n+heads)) for n < dim - heads: (a^N c)_n = w_n c_{n+N}."""
    n = np.arange(dim - heads, dtype=float)
    w = np.ones_like(n)
    for j in range(1, heads + 1):
        w *= n + j
    return np.sqrt(w)


def multihead_work_dim(alpha: complex, budget: Budget) -> int:
    reach = math.sqrt(2) * (abs(alpha) + 2) + 2 * budget.r_box
    return cutoff_dim(reach) + 40


@numba.njit(cache=True)
def _multihead_objective(x, dim, weights, heads, an, outside, gamma, max_tail):
    u, v, r, th = x[0], x[1], x[2], x[3]
    mu = complex(u, v) / math.sqrt(2)
    t = np.exp(-2j * th) * math.tanh(2 * r)
    c0 = np.exp(-abs(mu) ** 2 / 2 - 0.5 * t * np.conj(mu) ** 2) / math.sqrt(math.cosh(2 * r))
    c = _amplitude_recurrence(dim, mu, t, c0)
    val = 0.0
    norm = 0.0
    for n in range(dim):
        low = -an * c[n]
        if n < dim - heads:
            low += weights[n] * c[n + heads]
        p = c[n].real ** 2 + c[n].imag ** 2
        val += low.real ** 2 + low.imag ** 2 + gamma * outside[n] * p
        norm += p
    deficit = 1.0 - norm
    if deficit > max_tail:
        val += 1e3 * (1.0 + deficit)
    return val


def minimize_gaussian_multihead(alpha: complex, gamma: float, heads: int, m: int,
                                budget: Budget | None = None, max_tail: float = 1e-10) -> GaussianOptimum:
    """Lowest Gaussian <(a^dag^N - conj(alpha)^N)(a^N - alpha^N) + gamma (1 - P_m)>.

    Evaluated from exact Fock amplitudes in O(dim) per point; states leaking
    past the working cutoff are penalised.
    """
    budget = budget or Budget(r_box=0.5)
    dim = multihead_work_dim(alpha, budget)
    w = _ladder_weights(dim, heads)
    an = complex(alpha) ** heads
    outside = ((np.arange(dim) + m) % heads != 0).astype(float)
    args = (dim, w, heads, an, outside, float(gamma), max_tail)
    return _multistart(lambda x: _multihead_objective(x, *args), start_points(alpha, budget), budget,
                       f"multihead floor(N={heads}, m={m}, gamma={gamma})")
