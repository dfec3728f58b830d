"""Witness operators whose ground states are cat states, and their spectra."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BadSymmetryIndex, CutoffTooSmall
from .fock import (
    HilbertConfig,
    _require_amplitude,
    _require_squeeze,
    annihilation,
    cutoff_dim,
    displacement_matrix,
    number_parity_ops,
    parse_sign,
    squeeze_matrix,
)


@dataclass(frozen=True)
class WitnessParams:
    """Parameters of O_(sign)(alpha, gamma), optionally squeezed or N-headed.

    ``sign`` is +1 for the even branch and -1 for the odd one. For
    ``heads > 2`` the symmetry index ``m`` picks the Fock residue class
    n = -m (mod heads) and ``sign`` is ignored.
    """

    alpha: complex
    gamma: float = 1.0
    sign: int = 1
    squeeze_r: float = 0.0
    heads: int = 2
    m: int = 0

    def __post_init__(self):
        if self.gamma < 0:
            raise ValueError(f"gamma must be >= 0, got {self.gamma}")
        object.__setattr__(self, "sign", parse_sign(self.sign))
        if self.heads < 2:
            raise BadSymmetryIndex(f"heads must be >= 2, got {self.heads}")
        if not 0 <= self.m < self.heads:
            raise BadSymmetryIndex(f"m must lie in 0..{self.heads - 1}, got {self.m}")


def _dim(cfg) -> int:
    return cfg if isinstance(cfg, int) else cfg.dim


def witness_operator(cfg: HilbertConfig | int, params: WitnessParams) -> np.ndarray:
    """(a^dag^2 - conj(alpha)^2)(a^2 - alpha^2) + gamma (1 -+ Pi)."""
    dim = _dim(cfg)
    _require_amplitude(dim, params.alpha)
    a = annihilation(dim)
    eye = np.eye(dim)
    lower = a @ a - params.alpha**2 * eye
    _, parity = number_parity_ops(dim)
    return lower.conj().T @ lower + params.gamma * (eye - params.sign * parity)


def squeezed_witness_operator(cfg: HilbertConfig | int, params: WitnessParams) -> np.ndarray:
    """S^dag(r) O(alpha, gamma) S(r), built in closed form via the Bogoliubov
    transformed ladder operator mu a - nu a^dag."""
    dim = _dim(cfg)
    r = params.squeeze_r
    _require_squeeze(r)
    _require_amplitude(dim, params.alpha)
    # compute in a padded space so that the quadratic ladder products are exact
    big = dim + 4
    a = annihilation(big)
    b = math.cosh(r) * a - math.sinh(r) * a.conj().T
    eye = np.eye(big)
    lower = b @ b - params.alpha**2 * eye
    _, parity = number_parity_ops(big)
    op = lower.conj().T @ lower + params.gamma * (eye - params.sign * parity)
    return op[:dim, :dim]


def conjugated_witness(cfg: HilbertConfig | int, params: WitnessParams) -> np.ndarray:
    """S^dag(r) O S(r) by explicit matrix conjugation (accurate on the interior)."""
    dim = _dim(cfg)
    plain = witness_operator(dim, WitnessParams(params.alpha, params.gamma, params.sign))
    s = squeeze_matrix(dim, params.squeeze_r)
    return s.conj().T @ plain @ s


def residue_projector(dim: int, heads: int, m: int) -> np.ndarray:
    """Diagonal of sum |N k - m><N k - m| over the non-negative levels N k - m."""
    n = np.arange(dim)
    return ((n + m) % heads == 0).astype(float)


def multi_head_operator(cfg: HilbertConfig | int, params: WitnessParams) -> np.ndarray:
    """(a^dag^N - conj(alpha)^N)(a^N - alpha^N) + gamma (1 - P_m).

    For N = 2, m = 0 the projector term equals gamma (1 - Pi)/2, i.e. the
    two-headed operator with gamma halved.
    """
    dim = _dim(cfg)
    heads, m = params.heads, params.m
    _require_amplitude(dim, params.alpha)
    a = annihilation(dim)
    eye = np.eye(dim)
    lower = np.linalg.matrix_power(a, heads) - params.alpha**heads * eye
    proj = residue_projector(dim, heads, m)
    return lower.conj().T @ lower + params.gamma * np.diag(1 - proj)


def decomposed_witness(cfg: HilbertConfig | int, params: WitnessParams) -> np.ndarray:
    """The witness rebuilt from number operators and displacements.

    2n^2 + |alpha|^2 (4n + 1) + 2|alpha|^4 - n
      - [D^dag(alpha) n^2 D(alpha) + D(alpha) n^2 D^dag(alpha)]/2 + gamma (1 -+ Pi)

    Displaced terms are evaluated in an enlarged cutoff and cropped, so every
    returned matrix element is free of truncation artefacts.
    """
    dim = _dim(cfg)
    alpha = params.alpha
    _require_amplitude(dim, alpha)
    big = cutoff_dim(math.sqrt(dim) + abs(alpha)) + 10
    n = np.arange(big, dtype=float)
    n2 = np.diag(n**2)
    d = displacement_matrix(big, alpha)
    displaced = 0.5 * (d.conj().T @ n2 @ d + d @ n2 @ d.conj().T)
    a2 = abs(alpha) ** 2
    diag = 2 * n**2 + a2 * (4 * n + 1) + 2 * a2**2 - n
    op = np.diag(diag) - displaced
    op = op[:dim, :dim]
    parity = (-1.0) ** np.arange(dim)
    return op + params.gamma * np.diag(1 - params.sign * parity)


def operator_for(cfg: HilbertConfig | int, params: WitnessParams) -> np.ndarray:
    """Dispatch to the plain, squeezed or N-headed witness."""
    if params.heads != 2:
        return multi_head_operator(cfg, params)
    if params.squeeze_r:
        return squeezed_witness_operator(cfg, params)
    return witness_operator(cfg, params)


@dataclass(frozen=True)
class Eigenpair:
    value: float
    vector: np.ndarray
    truncation_dominated: bool


def operator_spectrum(cfg: HilbertConfig | int, params: WitnessParams, k: int = 4) -> list[Eigenpair]:
    """Lowest ``k`` eigenpairs in ascending order.

    Eigenvalues above dim/2 are flagged as truncation dominated.
    """
    if not 1 <= k <= 8:
        raise ValueError(f"k must lie in 1..8, got {k}")
    dim = _dim(cfg)
    if dim < 2 * k:
        raise CutoffTooSmall(f"dim {dim} too small for {k} eigenpairs")
    op = operator_for(dim, params)
    vals, vecs = np.linalg.eigh(0.5 * (op + op.conj().T))
    return [
        Eigenpair(float(vals[i]), vecs[:, i], bool(vals[i] > 0.5 * dim))
        for i in range(k)
    ]
