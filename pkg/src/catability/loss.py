"""Pure-loss channel through its Kraus decomposition.

M_k = sqrt((1 - eta^2)^k / k!) eta^n a^k, with eta the amplitude transmissivity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch
from .fock import HilbertConfig, annihilation, occupied_dim, to_density


@dataclass(frozen=True)
class LossSpec:
    eta: float
    kmax: int | None = None

    def __post_init__(self):
        if not 0 <= self.eta <= 1:
            raise ValueError(f"eta must lie in [0, 1], got {self.eta}")
        if self.kmax is not None and self.kmax < 1:
            raise ValueError(f"kmax must be >= 1, got {self.kmax}")


def eta_from_energy_loss(pct: float) -> float:
    """Energy (photon-number) loss of ``pct`` percent: eta^2 = 1 - L."""
    return math.sqrt(1 - pct / 100)


def eta_from_amplitude_loss(pct: float) -> float:
    """Amplitude loss of ``pct`` percent: eta = 1 - L."""
    return 1 - pct / 100


def _kraus_terms(dim: int, eta: float, kmax: int):
    """Yield M_0 .. M_{kmax-1}; a^k is accumulated, not recomputed."""
    damp = (eta ** np.arange(dim, dtype=float))[:, None]
    a = annihilation(dim)
    ak = np.eye(dim, dtype=complex)
    for k in range(kmax):
        log_w = k * math.log1p(-eta * eta) - math.lgamma(k + 1) if k else 0.0
        yield math.exp(0.5 * log_w) * damp * ak
        ak = ak @ a


def kraus_operators(cfg: HilbertConfig | int, spec: LossSpec) -> list[np.ndarray]:
    dim = cfg if isinstance(cfg, int) else cfg.dim
    if spec.eta == 1:
        return [np.eye(dim, dtype=complex)]
    kmax = min(spec.kmax or dim, dim)
    return list(_kraus_terms(dim, spec.eta, kmax))


def apply_loss(rho: np.ndarray, spec: LossSpec | float) -> np.ndarray:
    """Sum_k M_k rho M_k^dag.

    Terms stop once the level ``k`` exceeds the highest occupied Fock level, or
    once the trace still unaccounted for drops below 1e-14.
    """
    if not isinstance(spec, LossSpec):
        spec = LossSpec(float(spec))
    rho = to_density(np.asarray(rho, dtype=complex))
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise DimensionMismatch(f"expected a square density matrix, got {rho.shape}")
    if spec.eta == 1:
        return rho.copy()
    dim = rho.shape[0]
    kmax = min(spec.kmax or dim, occupied_dim(rho))
    total = np.trace(rho).real
    out = np.zeros_like(rho)
    kept = 0.0
    for m in _kraus_terms(dim, spec.eta, kmax):
        term = m @ rho @ m.conj().T
        out += term
        kept += np.trace(term).real
        if total - kept < 1e-14:
            break
    return out
