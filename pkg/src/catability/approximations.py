"""Best squeezed few-photon approximations of small cats under the witness.

For S(r)(c0 |0> + c2 |2>) the expectation is a 2x2 quadratic form in
(c0, c2), so a dense (omega, r) grid costs one squeeze matrix per r value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .fock import MAX_SQUEEZE, r_to_db, squeeze_matrix
from .witness import WitnessParams, witness_operator

KINDS = {"zero-two": (0, 2), "single-photon": (1,)}


@dataclass(frozen=True)
class ApproxOptimum:
    kind: str
    omega: float
    r: float
    value: float
    db_exp2r: float
    db_exp4r: float


def _sandwich(dim: int, r: float, levels, op: np.ndarray) -> np.ndarray:
    s = squeeze_matrix(dim, r)[:, list(levels)]
    return (s.conj().T @ op @ s).real


def approximation_expectation(kind: str, r: float, omega: float = 1.0, alpha: complex = 1.0,
                              gamma: float = 1.0, dim: int = 100) -> float:
    """<O> of the squeezed approximation; the parity branch follows the state
    (even for 'zero-two', odd for 'single-photon')."""
    sign = 1 if kind == "zero-two" else -1
    op = witness_operator(dim, WitnessParams(alpha, gamma, sign))
    m = _sandwich(dim, r, KINDS[kind], op)
    if kind == "single-photon":
        return float(m[0, 0])
    c = np.array([math.sqrt(omega), math.sqrt(1 - omega)])
    return float(c @ m @ c)


def optimize_approximation(kind: str = "zero-two", alpha: complex = 1.0, gamma: float = 1.0,
                           omega_grid=None, r_grid=None, dim: int = 100) -> ApproxOptimum:
    """Grid search over (omega, r) followed by a local Nelder-Mead polish."""
    if kind not in KINDS:
        raise ValueError(f"unknown approximation kind {kind!r}")
    sign = 1 if kind == "zero-two" else -1
    op = witness_operator(dim, WitnessParams(alpha, gamma, sign))
    omegas = np.linspace(0, 1, 201) if omega_grid is None else np.asarray(omega_grid, float)
    rs = np.linspace(-1, 1, 201) if r_grid is None else np.asarray(r_grid, float)
    if kind == "single-photon":
        omegas = np.array([1.0])
    best = (math.inf, 0.0, 0.0)
    for r in rs:
        m = _sandwich(dim, r, KINDS[kind], op)
        if kind == "single-photon":
            vals = np.array([m[0, 0]])
        else:
            c0, c2 = np.sqrt(omegas), np.sqrt(1 - omegas)
            vals = c0 * c0 * m[0, 0] + 2 * c0 * c2 * m[0, 1] + c2 * c2 * m[1, 1]
        i = int(np.argmin(vals))
        if vals[i] < best[0]:
            best = (float(vals[i]), float(omegas[i]), float(r))

    def fun(x):
        w, r = (1.0, x[0]) if kind == "single-photon" else (x[0], x[1])
        if not 0 <= w <= 1 or abs(r) > MAX_SQUEEZE:
            return math.inf
        return approximation_expectation(kind, r, w, alpha, gamma, dim)

    x0 = [best[2]] if kind == "single-photon" else [best[1], best[2]]
    res = minimize(fun, x0, method="Nelder-Mead", options={"xatol": 1e-7, "fatol": 1e-12})
    value, omega, r = best
    if res.fun < value:
        value = float(res.fun)
        omega, r = (1.0, float(res.x[0])) if kind == "single-photon" else (float(res.x[0]), float(res.x[1]))
    return ApproxOptimum(kind, omega, r, value, r_to_db(r, "exp2r"), r_to_db(r, "exp4r"))
