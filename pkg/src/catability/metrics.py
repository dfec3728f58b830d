"""Catability and normalised infidelity of arbitrary states.

Both metrics divide a state's score by the best score of any Gaussian state.
The catability numerator is linear in gamma,

    <O(alpha, gamma)> = Q(alpha) + gamma P,

so one set of state moments serves every (alpha, gamma) probe. Gamma is
searched on the benchmark grid, refined by bounded golden-section search on the
interpolated floor, and the final ratio uses an exactly re-minimised floor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.optimize import minimize_scalar

from .benchmark import GaussianBenchmark, default_benchmark
from .errors import BadSymmetryIndex, BenchmarkUnavailable
from .fock import (
    HilbertConfig,
    cat_state,
    cutoff_dim,
    fidelity_with_pure,
    multi_headed_cat,
    pad,
    parse_sign,
    to_density,
)
from .gaussian import Budget, maximize_gaussian_overlap, minimize_gaussian_multihead
from .witness import residue_projector

# 1 - ceiling below this means the target is itself (numerically) Gaussian
MIN_GAUSSIAN_INFIDELITY = 1e-9


@dataclass(frozen=True)
class GammaSearchSpec:
    lo: float = 0.0
    hi: float = 5.0
    n_grid: int = 51
    xtol: float = 1e-4

    def __post_init__(self):
        if not 0 <= self.lo < self.hi:
            raise ValueError(f"need 0 <= lo < hi, got [{self.lo}, {self.hi}]")
        if self.n_grid < 2:
            raise ValueError("n_grid must be >= 2")


@dataclass(frozen=True)
class MetricResult:
    """A catability (``kind='xi'``) or normalised infidelity (``kind='zeta'``).

    ``value == numerator / gaussian_floor``. For zeta the numerator is the
    state's infidelity with the cat and the floor is the best Gaussian
    infidelity; ``optimal_gamma`` is nan.
    """

    value: float
    optimal_gamma: float
    optimal_alpha: complex
    sign: int
    numerator: float
    gaussian_floor: float
    kind: str = "xi"
    at_boundary: bool = False
    heads: int = 2
    m: int = 0
    trace: tuple = field(default=(), repr=False, compare=False)

    def as_dict(self) -> dict:
        a = complex(self.optimal_alpha)
        return {
            "kind": self.kind, "value": self.value, "optimal_gamma": self.optimal_gamma,
            "optimal_alpha_re": a.real, "optimal_alpha_im": a.imag, "sign": self.sign,
            "numerator": self.numerator, "gaussian_floor": self.gaussian_floor,
            "at_boundary": self.at_boundary, "heads": self.heads, "m": self.m,
        }


# --- state moments -----------------------------------------------------------


@dataclass(frozen=True)
class StateMoments:
    """Moments entering <O>: ladder = <a^dag^N a^N>, lower = <a^N>, and the
    weight ``outside`` that the projector term penalises per unit gamma."""

    ladder: float
    lower: complex
    outside: float
    heads: int = 2

    def quartic(self, alpha: complex) -> float:
        an = complex(alpha) ** self.heads
        return float(self.ladder - 2 * (an.conjugate() * self.lower).real + abs(an) ** 2)

    def numerator(self, alpha: complex, gamma: float) -> float:
        return self.quartic(alpha) + gamma * self.outside


def _ladder_moments(rho: np.ndarray, heads: int) -> tuple[float, complex]:
    dim = rho.shape[0]
    n = np.arange(dim, dtype=float)
    falling = np.ones(dim)
    for j in range(heads):
        falling *= np.clip(n - j, 0, None)
    ladder = float(np.real(np.diag(rho)) @ falling)
    # Tr(a^N rho) = sum_n sqrt(n!/(n-N)!) rho[n, n-N]
    lower = complex(np.sqrt(falling[heads:]) @ np.diagonal(rho, -heads)) if dim > heads else 0j
    return ladder, lower


def state_moments(rho: np.ndarray, sign=1, heads: int = 2, m: int = 0) -> StateMoments:
    """Moments for the two-headed witness (``heads=2``, parity ``sign``) or the
    N-headed one with residue index ``m``."""
    rho = to_density(np.asarray(rho, dtype=complex))
    ladder, lower = _ladder_moments(rho, heads)
    pops = np.real(np.diag(rho))
    if heads == 2 and m == 0 and sign is not None:
        parity = pops @ (-1.0) ** np.arange(rho.shape[0])
        outside = 1 - parse_sign(sign) * parity
    else:
        outside = pops.sum() - pops @ residue_projector(rho.shape[0], heads, m)
    return StateMoments(ladder, lower, float(outside), heads)


# --- floor sources -----------------------------------------------------------


class _TwoHeadFloors:
    def __init__(self, bench: GaussianBenchmark, sign: int):
        self.bench, self.sign = bench, sign
        self.gamma_grid = bench.gamma_grid

    def floor_row(self, alpha):
        return self.bench.floor_row(alpha, self.sign)

    def exact_floor(self, alpha, gamma):
        return self.bench.exact_floor(alpha, gamma, self.sign)


def _ratio_fn(moments: StateMoments, alpha, gammas, floors):
    q = moments.quartic(alpha)

    def ratio(g):
        f = np.interp(g, gammas, floors)
        return (q + g * moments.outside) / f if f > 0 else math.inf

    return ratio


def _gamma_search(moments: StateMoments, alpha, gammas, floors, spec: GammaSearchSpec):
    """Grid minimum of numerator/floor then bounded golden refinement.

    Returns (gamma, interpolated ratio, trace of grid ratios).
    """
    keep = (gammas >= spec.lo - 1e-12) & (gammas <= spec.hi + 1e-12)
    gammas, floors = gammas[keep], floors[keep]
    if gammas.size < 2:
        raise BenchmarkUnavailable(f"benchmark gamma grid does not cover [{spec.lo}, {spec.hi}]")
    ratio = _ratio_fn(moments, alpha, gammas, floors)
    grid = np.linspace(spec.lo, spec.hi, spec.n_grid)
    vals = np.array([ratio(g) for g in grid])
    i = int(np.argmin(vals))
    trace = tuple(zip(grid.tolist(), vals.tolist()))
    if not np.isfinite(vals[i]):
        return float(grid[i]), math.inf, trace
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, grid.size - 1)]
    best_g, best_v = float(grid[i]), float(vals[i])
    res = minimize_scalar(ratio, bounds=(lo, hi), method="bounded", options={"xatol": spec.xtol})
    if res.fun < best_v:
        best_g, best_v = float(res.x), float(res.fun)
    return best_g, best_v, trace


def _positive_floor_gamma(gamma, floors_source, alpha, spec):
    """Gamma = 0 has a zero floor; nudge to the first positive grid node."""
    if gamma > 0:
        return gamma
    positive = floors_source.gamma_grid[floors_source.gamma_grid > 0]
    return float(max(positive[0], spec.lo)) if positive.size else spec.xtol


def _finish_xi(moments, alpha, sign, gamma, source, spec, trace, exact, heads=2, m=0, interp=None):
    gamma = _positive_floor_gamma(gamma, source, alpha, spec)
    if exact:
        floor = float(source.exact_floor(abs(alpha) if heads == 2 else alpha, gamma))
    else:
        floor = float(np.interp(gamma, source.gamma_grid, source.floor_row(alpha)))
    num = moments.numerator(alpha, gamma)
    positive = source.gamma_grid[source.gamma_grid > 0]
    edge_lo = positive[0] if positive.size else spec.lo
    boundary = gamma <= max(spec.lo, edge_lo) + spec.xtol or gamma >= spec.hi - spec.xtol
    value = num / floor if floor > 0 else math.inf
    return MetricResult(max(value, 0.0), gamma, complex(alpha), sign, num, floor, "xi",
                        bool(boundary), heads, m, trace)


def catability(rho, alpha: float, sign, gamma_search: GammaSearchSpec | None = None,
               bench: GaussianBenchmark | None = None, exact: bool = True) -> MetricResult:
    """xi_(sign)(alpha): min over gamma of <O> / (Gaussian floor).

    With ``exact=False`` the reported floor is the table interpolation, which
    is faster but slightly underestimates the floor between grid nodes.
    """
    spec = gamma_search or GammaSearchSpec()
    bench = bench or default_benchmark()
    s = parse_sign(sign)
    source = _TwoHeadFloors(bench, s)
    moments = state_moments(rho, s)
    g, _, trace = _gamma_search(moments, alpha, source.gamma_grid, source.floor_row(alpha), spec)
    return _finish_xi(moments, alpha, s, g, source, spec, trace, exact)


def _alpha_grid(bench: GaussianBenchmark, alpha_range) -> np.ndarray:
    grid = bench.alpha_grid
    if alpha_range is None:
        return grid
    lo, hi = alpha_range
    sel = grid[(grid >= lo - 1e-12) & (grid <= hi + 1e-12)]
    if sel.size < 2:
        raise BenchmarkUnavailable(f"alpha range [{lo}, {hi}] holds fewer than two table nodes")
    return sel


def _refine_alpha(objective, grid: np.ndarray, i: int, xtol: float) -> tuple[float, float]:
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, grid.size - 1)]
    best_a, best_v = float(grid[i]), objective(grid[i])
    if hi > lo:
        res = minimize_scalar(objective, bounds=(lo, hi), method="bounded", options={"xatol": xtol})
        if res.fun < best_v:
            best_a, best_v = float(res.x), float(res.fun)
    return best_a, best_v


def global_catability(rho, alpha_range=None, bench: GaussianBenchmark | None = None,
                      gamma_search: GammaSearchSpec | None = None, alpha_xtol: float = 1e-3,
                      signs=(1, -1), exact: bool = True) -> MetricResult:
    """min over real alpha and both parities of xi_(sign)(alpha).

    Complex amplitudes are handled by rotating the state beforehand.
    """
    spec = gamma_search or GammaSearchSpec()
    bench = bench or default_benchmark()
    grid = _alpha_grid(bench, alpha_range)
    best = None
    for s in signs:
        s = parse_sign(s)
        source = _TwoHeadFloors(bench, s)
        moments = state_moments(rho, s)

        def objective(a, moments=moments, source=source):
            return _gamma_search(moments, a, source.gamma_grid, source.floor_row(a), spec)[1]

        vals = np.array([objective(a) for a in grid])
        i = int(np.argmin(vals))
        a_star, v_star = _refine_alpha(objective, grid, i, alpha_xtol)
        if best is None or v_star < best[0]:
            best = (v_star, a_star, s, moments, source, tuple(zip(grid.tolist(), vals.tolist())))
    _, a_star, s, moments, source, alpha_trace = best
    g, _, _ = _gamma_search(moments, a_star, source.gamma_grid, source.floor_row(a_star), spec)
    return _finish_xi(moments, a_star, s, g, source, spec, alpha_trace, exact)


# --- normalised infidelity ---------------------------------------------------


def _cat_fidelity(rho: np.ndarray, alpha: complex, target_fn) -> float:
    rho = to_density(np.asarray(rho, dtype=complex))
    dim = max(rho.shape[0], cutoff_dim(alpha))
    rho = pad(rho, dim)
    return fidelity_with_pure(rho, target_fn(HilbertConfig(dim)))


def _zeta(infid: float, ceiling: float, alpha, sign, heads=2, m=0, trace=()) -> MetricResult:
    floor = 1 - ceiling
    if floor < MIN_GAUSSIAN_INFIDELITY:
        raise BenchmarkUnavailable(
            f"best Gaussian fidelity {ceiling:.12f} at alpha={alpha}: the target is Gaussian to numerical precision"
        )
    infid = max(infid, 0.0)
    return MetricResult(infid / floor, math.nan, complex(alpha), sign, infid, floor, "zeta",
                        False, heads, m, trace)


def normalized_infidelity(rho, alpha: float, sign, bench: GaussianBenchmark | None = None,
                          exact: bool = True) -> MetricResult:
    """zeta_(sign)(alpha) = (1 - F_cat) / min over Gaussian states of (1 - F_cat)."""
    bench = bench or default_benchmark()
    s = parse_sign(sign)
    fid = _cat_fidelity(rho, alpha, lambda cfg: cat_state(cfg, alpha, s))
    ceiling = bench.exact_ceiling(alpha, s) if exact else bench.ceiling(alpha, s)
    return _zeta(1 - fid, ceiling, alpha, s)


def global_normalized_infidelity(rho, alpha_range=None, bench: GaussianBenchmark | None = None,
                                 alpha_xtol: float = 1e-3, signs=(1, -1), exact: bool = True) -> MetricResult:
    """min over real alpha and both parities of zeta_(sign)(alpha)."""
    bench = bench or default_benchmark()
    grid = _alpha_grid(bench, alpha_range)
    rho = to_density(np.asarray(rho, dtype=complex))
    best = None
    for s in signs:
        s = parse_sign(s)

        def objective(a, s=s):
            if s < 0 and a == 0:
                return math.inf
            floor = 1 - bench.ceiling(a, s)
            if floor < MIN_GAUSSIAN_INFIDELITY:
                return math.inf
            return (1 - _cat_fidelity(rho, a, lambda cfg: cat_state(cfg, a, s))) / floor

        vals = np.array([objective(a) for a in grid])
        i = int(np.argmin(vals))
        if not np.isfinite(vals[i]):
            continue
        a_star, v_star = _refine_alpha(objective, grid, i, alpha_xtol)
        if best is None or v_star < best[0]:
            best = (v_star, a_star, s, tuple(zip(grid.tolist(), vals.tolist())))
    if best is None:
        raise BenchmarkUnavailable("no alpha in range has a non-Gaussian cat target")
    _, a_star, s, trace = best
    res = normalized_infidelity(rho, a_star, s, bench, exact)
    return MetricResult(res.value, res.optimal_gamma, res.optimal_alpha, s, res.numerator,
                        res.gaussian_floor, "zeta", False, 2, 0, trace)


# --- N-headed cats -----------------------------------------------------------


MULTIHEAD_GAMMA_GRID = np.round(np.arange(1, 21) * 0.25, 10)


class MultiHeadBenchmark:
    """Gaussian floors and fidelity ceiling for one N-headed operator at a
    fixed amplitude. Floors are minimised lazily and cached per process."""

    def __init__(self, alpha: complex, heads: int, m: int, gamma_grid=None,
                 budget: Budget | None = None):
        if heads < 2 or not 0 <= m < heads:
            raise BadSymmetryIndex(f"invalid (heads, m) = ({heads}, {m})")
        self.alpha, self.heads, self.m = complex(alpha), heads, m
        self.budget = budget or Budget(r_box=0.5)
        grid = MULTIHEAD_GAMMA_GRID if gamma_grid is None else np.asarray(gamma_grid, dtype=float)
        # gamma = 0 has floor 0: a coherent state at alpha annihilates the ladder term
        self.gamma_grid = np.concatenate([[0.0], grid[grid > 0]])

    def exact_floor(self, alpha, gamma) -> float:
        if gamma == 0:
            return 0.0
        return _multihead_floor(complex(alpha), round(float(gamma), 12), self.heads, self.m, self.budget)

    def floor_row(self, alpha=None) -> np.ndarray:
        a = self.alpha if alpha is None else complex(alpha)
        return np.array([self.exact_floor(a, g) for g in self.gamma_grid])

    def ceiling(self) -> float:
        return _multihead_ceiling(self.alpha, self.heads, self.m, self.budget)


@lru_cache(maxsize=4096)
def _multihead_floor(alpha, gamma, heads, m, budget) -> float:
    return minimize_gaussian_multihead(alpha, gamma, heads, m, budget).value


@lru_cache(maxsize=256)
def _multihead_ceiling(alpha, heads, m, budget) -> float:
    target = multi_headed_cat(HilbertConfig(cutoff_dim(alpha)), alpha, heads, m)
    return maximize_gaussian_overlap(target, abs(alpha), budget).value


def multihead_catability(rho, bench: MultiHeadBenchmark,
                         gamma_search: GammaSearchSpec | None = None, exact: bool = True) -> MetricResult:
    """xi for the N-headed operator of ``bench`` (fixed alpha, heads, m)."""
    spec = gamma_search or GammaSearchSpec()
    moments = state_moments(rho, None, bench.heads, bench.m)
    floors = bench.floor_row()
    g, _, trace = _gamma_search(moments, bench.alpha, bench.gamma_grid, floors, spec)
    return _finish_xi(moments, bench.alpha, 1, g, bench, spec, trace, exact, bench.heads, bench.m)


def multihead_infidelity(rho, bench: MultiHeadBenchmark) -> MetricResult:
    fid = _cat_fidelity(rho, bench.alpha,
                        lambda cfg: multi_headed_cat(cfg, bench.alpha, bench.heads, bench.m))
    return _zeta(1 - fid, bench.ceiling(), bench.alpha, 1, bench.heads, bench.m)
