"""Truncated Fock-space primitives.

States are plain numpy arrays: a pure state is a length-``dim`` complex vector,
a mixed state a ``dim x dim`` complex matrix. Operators are dense matrices.

Displacement follows D(beta) = exp(conj(beta) a - beta a^dag), so
D(beta)|0> = |-beta>. Quadratures are x = (a + a^dag)/sqrt(2) and
p = (a - a^dag)/(i sqrt(2)) with vacuum variance 1/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import (
    BadSymmetryIndex,
    CutoffTooSmall,
    DimensionMismatch,
    OutOfResolvedRegion,
    SqueezeOutOfRange,
    UnderResolved,
)

MAX_SQUEEZE = 1.5


@dataclass(frozen=True)
class HilbertConfig:
    dim: int
    tail_tol: float = 1e-10
    atol: float = 1e-10

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 8:
            raise CutoffTooSmall(f"dim must be an integer >= 8, got {self.dim}")
        if not (self.tail_tol > 0 and self.atol > 0):
            raise ValueError("tail_tol and atol must be positive")

    @property
    def interior(self) -> int:
        """Size of the block n < 0.8 dim used for operator identity checks."""
        return int(0.8 * self.dim)


def cutoff_dim(alpha: complex | float) -> int:
    """Default cutoff for states of amplitude ``|alpha|``."""
    a = abs(alpha)
    return max(40, math.ceil(a * a + 8 * a + 20))


def parse_sign(sign) -> int:
    """Map '+', '-', 'even', 'odd' or +-1 to +1 / -1."""
    if isinstance(sign, str):
        s = sign.strip().lower()
        if s in ("+", "plus", "even", "+1"):
            return 1
        if s in ("-", "minus", "odd", "-1"):
            return -1
    elif sign in (1, -1):
        return int(sign)
    raise ValueError(f"cannot interpret sign {sign!r}")


def sign_label(sign: int) -> str:
    return "+" if parse_sign(sign) > 0 else "-"


def _require_amplitude(dim: int, alpha: complex) -> None:
    a = abs(alpha)
    if a * a + 6 * a + 10 > dim:
        raise CutoffTooSmall(
            f"|alpha|={a:.4g} needs dim >= {math.ceil(a * a + 6 * a + 10)}, got {dim}"
        )


def _require_squeeze(r: float) -> None:
    if abs(r) > MAX_SQUEEZE:
        raise SqueezeOutOfRange(f"|r|={abs(r):.4g} exceeds {MAX_SQUEEZE}")


def tail_mass(state: np.ndarray) -> float:
    """Probability in the top 10% of the basis (pure or mixed state)."""
    dim = state.shape[0]
    start = dim - max(1, math.ceil(0.1 * dim))
    if state.ndim == 1:
        return float(np.sum(np.abs(state[start:]) ** 2))
    return float(np.real(np.trace(state[start:, start:])))


def check_state(psi: np.ndarray, cfg: HilbertConfig) -> np.ndarray:
    norm = np.vdot(psi, psi).real
    if abs(norm - 1) > cfg.atol:
        raise ValueError(f"state norm {norm!r} differs from 1")
    if tail_mass(psi) > cfg.tail_tol:
        raise UnderResolved(f"tail mass {tail_mass(psi):.3g} exceeds {cfg.tail_tol:g}")
    return psi


def check_density(rho: np.ndarray, atol: float = 1e-10) -> np.ndarray:
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise DimensionMismatch(f"density matrix must be square, got {rho.shape}")
    if np.max(np.abs(rho - rho.conj().T)) > atol:
        raise ValueError("density matrix is not Hermitian")
    tr = np.trace(rho).real
    if abs(tr - 1) > atol:
        raise ValueError(f"density matrix trace {tr!r} differs from 1")
    lmin = np.linalg.eigvalsh(rho)[0]
    if lmin < -atol:
        raise ValueError(f"density matrix has negative eigenvalue {lmin:.3g}")
    return rho


def to_density(state: np.ndarray) -> np.ndarray:
    if state.ndim == 1:
        return np.outer(state, state.conj())
    return state


def pad(state: np.ndarray, dim: int) -> np.ndarray:
    """Embed a state into a larger truncated space (zero padding)."""
    d = state.shape[0]
    if dim < d:
        raise DimensionMismatch(f"cannot pad dim {d} down to {dim}")
    if state.ndim == 1:
        out = np.zeros(dim, dtype=complex)
        out[:d] = state
    else:
        out = np.zeros((dim, dim), dtype=complex)
        out[:d, :d] = state
    return out


def occupied_dim(state: np.ndarray, tol: float = 1e-14) -> int:
    """One past the highest Fock level whose population exceeds ``tol``."""
    pops = np.abs(state) ** 2 if state.ndim == 1 else np.abs(np.diag(state))
    idx = np.nonzero(pops > tol)[0]
    return int(idx[-1]) + 1 if idx.size else 1


def working_dim(state: np.ndarray, beta: complex) -> int:
    """Cutoff large enough to hold ``state`` after a displacement by ``beta``."""
    reach = math.sqrt(occupied_dim(state)) + abs(beta)
    return max(state.shape[0], cutoff_dim(reach))


# --- operators ---------------------------------------------------------------


def annihilation(cfg: HilbertConfig | int) -> np.ndarray:
    dim = cfg if isinstance(cfg, int) else cfg.dim
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1).astype(complex)


def creation(cfg: HilbertConfig | int) -> np.ndarray:
    return annihilation(cfg).conj().T


def number_parity_ops(cfg: HilbertConfig | int) -> tuple[np.ndarray, np.ndarray]:
    dim = cfg if isinstance(cfg, int) else cfg.dim
    n = np.arange(dim)
    return np.diag(n.astype(complex)), np.diag((-1.0) ** n).astype(complex)


def quadratures(cfg: HilbertConfig | int) -> tuple[np.ndarray, np.ndarray]:
    a = annihilation(cfg)
    ad = a.conj().T
    return (a + ad) / math.sqrt(2), (a - ad) / (1j * math.sqrt(2))


@lru_cache(maxsize=32)
def _position_eig(dim: int) -> tuple[np.ndarray, np.ndarray]:
    # a + a^dag is real symmetric tridiagonal; its eigenbasis exponentiates
    # every displacement through a phase rotation.
    off = np.sqrt(np.arange(1, dim, dtype=float))
    lam, vec = eigh_tridiagonal(np.zeros(dim), off)
    return lam, vec


def displacement_matrix(dim: int, beta: complex) -> np.ndarray:
    """exp(conj(beta) a - beta a^dag) in a ``dim``-level truncation, unchecked."""
    s = abs(beta)
    if s == 0:
        return np.eye(dim, dtype=complex)
    phi = np.angle(beta)
    lam, vec = _position_eig(dim)
    n = np.arange(dim)
    # a - a^dag = T (i X) T^dag with T = diag(i^n), X = a + a^dag
    t = (1j) ** (n % 4)
    rot = np.exp(1j * phi * n)
    left = (rot * t)[:, None] * vec
    return (left * np.exp(1j * s * lam)) @ left.conj().T


def displacement(cfg: HilbertConfig, beta: complex) -> np.ndarray:
    _require_amplitude(cfg.dim, beta)
    return displacement_matrix(cfg.dim, beta)


def _expm_antihermitian(gen: np.ndarray) -> np.ndarray:
    lam, vec = np.linalg.eigh(1j * gen)
    return (vec * np.exp(-1j * lam)) @ vec.conj().T


def squeeze_matrix(dim: int, r: float) -> np.ndarray:
    if r == 0:
        return np.eye(dim, dtype=complex)
    a = annihilation(dim)
    a2 = a @ a
    return _expm_antihermitian(0.5 * r * (a2 - a2.conj().T))


def squeeze(cfg: HilbertConfig, r: float) -> np.ndarray:
    """S(r) = exp[r/2 (a^2 - a^dag^2)]; r > 0 squeezes the x quadrature."""
    _require_squeeze(r)
    return squeeze_matrix(cfg.dim, r)


def rotation(dim: int, phi: float) -> np.ndarray:
    """Phase rotation exp(i phi n); maps |alpha> to |alpha e^{i phi}>."""
    return np.diag(np.exp(1j * phi * np.arange(dim)))


# --- states ------------------------------------------------------------------


def basis_state(cfg: HilbertConfig | int, n: int) -> np.ndarray:
    dim = cfg if isinstance(cfg, int) else cfg.dim
    psi = np.zeros(dim, dtype=complex)
    psi[n] = 1
    return psi


def _coherent_amps(dim: int, alpha: complex) -> np.ndarray:
    amps = np.empty(dim, dtype=complex)
    amps[0] = math.exp(-abs(alpha) ** 2 / 2)
    for n in range(1, dim):
        amps[n] = amps[n - 1] * alpha / math.sqrt(n)
    return amps


def _finish(psi: np.ndarray, cfg: HilbertConfig) -> np.ndarray:
    psi = psi / np.linalg.norm(psi)
    return check_state(psi, cfg)


def coherent_state(cfg: HilbertConfig, alpha: complex) -> np.ndarray:
    _require_amplitude(cfg.dim, alpha)
    return _finish(_coherent_amps(cfg.dim, alpha), cfg)


def cat_state(cfg: HilbertConfig, alpha: complex, sign) -> np.ndarray:
    """(|alpha> +- |-alpha>) normalised; built parity-sector-wise, no cancellation."""
    s = parse_sign(sign)
    _require_amplitude(cfg.dim, alpha)
    if s < 0 and alpha == 0:
        raise ValueError("odd cat is undefined at alpha = 0")
    parity = (-1.0) ** np.arange(cfg.dim)
    amps = _coherent_amps(cfg.dim, alpha) * (1 + s * parity)
    return _finish(amps, cfg)


def multi_headed_cat(cfg: HilbertConfig, alpha: complex, heads: int, m: int) -> np.ndarray:
    """Normalised sum_k exp(2 pi i k m / N) |alpha exp(2 pi i k / N)>."""
    if heads < 2:
        raise BadSymmetryIndex(f"need at least two heads, got {heads}")
    if not 0 <= m < heads:
        raise BadSymmetryIndex(f"m must lie in 0..{heads - 1}, got {m}")
    _require_amplitude(cfg.dim, alpha)
    psi = np.zeros(cfg.dim, dtype=complex)
    for k in range(heads):
        w = np.exp(2j * np.pi * k / heads)
        psi += w**m * _coherent_amps(cfg.dim, alpha * w)
    if np.linalg.norm(psi) < 1e-150:
        raise ValueError("superposition vanishes for this (alpha, m)")
    return _finish(psi, cfg)


def photonic_approximation(cfg: HilbertConfig, kind: str, r: float, omega: float = 1.0) -> np.ndarray:
    """Squeezed few-photon cat approximations.

    ``kind='single-photon'`` gives S(r)|1> (odd); ``kind='zero-two'`` gives
    S(r)(sqrt(omega)|0> + sqrt(1-omega)|2>) (even).
    """
    _require_squeeze(r)
    if kind == "single-photon":
        psi = basis_state(cfg, 1)
    elif kind == "zero-two":
        if not 0 <= omega <= 1:
            raise ValueError(f"omega must lie in [0, 1], got {omega}")
        psi = np.zeros(cfg.dim, dtype=complex)
        psi[0] = math.sqrt(omega)
        psi[2] = math.sqrt(1 - omega)
    else:
        raise ValueError(f"unknown approximation kind {kind!r}")
    return _finish(squeeze_matrix(cfg.dim, r) @ psi, cfg)


# --- squeezing in dB ---------------------------------------------------------

VARIANCE_LAWS = {"exp2r": 2.0, "exp4r": 4.0}


def db_to_r(db: float, law: str = "exp2r") -> float:
    """Squeeze magnitude giving a quadrature variance ratio of ``db`` decibels.

    ``law='exp2r'`` treats the squeezed variance as e^{-2r} (the physical law
    of S(r)); ``law='exp4r'`` uses e^{-4r}.
    """
    k = VARIANCE_LAWS[law]
    return abs(db) * math.log(10) / (10 * k)


def r_to_db(r: float, law: str = "exp2r") -> float:
    k = VARIANCE_LAWS[law]
    return -10 * k * abs(r) / math.log(10)


# --- expectation values ------------------------------------------------------


def expectation(op: np.ndarray, rho: np.ndarray) -> complex:
    if op.shape[0] != rho.shape[0]:
        raise DimensionMismatch(f"operator dim {op.shape[0]} vs state dim {rho.shape[0]}")
    if rho.ndim == 1:
        return complex(np.vdot(rho, op @ rho))
    return complex(np.einsum("ij,ji->", op, rho))


def fidelity_with_pure(rho: np.ndarray, psi: np.ndarray) -> float:
    if rho.shape[0] != psi.shape[0]:
        raise DimensionMismatch(f"state dims {rho.shape[0]} and {psi.shape[0]} differ")
    if rho.ndim == 1:
        return float(abs(np.vdot(psi, rho)) ** 2)
    return float(np.vdot(psi, rho @ psi).real)


def displaced(rho: np.ndarray, beta: complex, dim: int | None = None) -> np.ndarray:
    """D(beta) rho D(beta)^dag, evaluated in a cutoff that holds the result."""
    rho = to_density(rho)
    dim = dim or working_dim(rho, beta)
    big = pad(rho, dim)
    d = displacement_matrix(dim, beta)
    return d @ big @ d.conj().T


def wigner_point(rho: np.ndarray, x: float, p: float) -> float:
    """W(x, p) = Tr[D(beta) rho D(beta)^dag Pi] / pi with beta = (x + i p)/sqrt(2)."""
    rho = to_density(rho)
    limit = math.sqrt(2 * rho.shape[0])
    if abs(x) > limit or abs(p) > limit:
        raise OutOfResolvedRegion(f"({x}, {p}) lies outside |x|,|p| <= {limit:.3g}")
    beta = (x + 1j * p) / math.sqrt(2)
    moved = displaced(rho, beta)
    parity = (-1.0) ** np.arange(moved.shape[0])
    return float(np.real(np.diag(moved)) @ parity / math.pi)


def wigner_grid(rho: np.ndarray, xs, ps) -> np.ndarray:
    """W on the grid ``xs x ps``; result indexed ``[i_x, i_p]``."""
    rho = to_density(rho)
    limit = math.sqrt(2 * rho.shape[0])
    xs = np.asarray(xs, dtype=float)
    ps = np.asarray(ps, dtype=float)
    if np.max(np.abs(xs)) > limit or np.max(np.abs(ps)) > limit:
        raise OutOfResolvedRegion(f"grid exceeds |x|,|p| <= {limit:.3g}")
    reach = math.hypot(np.max(np.abs(xs)), np.max(np.abs(ps))) / math.sqrt(2)
    dim = working_dim(rho, reach)
    big = pad(rho, dim)
    parity = (-1.0) ** np.arange(dim)
    out = np.empty((xs.size, ps.size))
    for i, x in enumerate(xs):
        for j, p in enumerate(ps):
            d = displacement_matrix(dim, (x + 1j * p) / math.sqrt(2))
            diag = np.einsum("ij,ij->i", d @ big, d.conj()).real
            out[i, j] = diag @ parity / math.pi
    return out
