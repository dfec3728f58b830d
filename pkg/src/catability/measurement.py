"""Simulated direct measurement of the witness from displaced photon counting.

Three photon-number distributions, taken after displacements 0, +alpha and
-alpha, determine <O_(sign)(alpha, gamma)> for every gamma:

    sum_n p_n(0) [2n^2 - (1 - 4|alpha|^2) n -+ gamma (-1)^n]
      - sum_n [p_n(alpha) + p_n(-alpha)] n^2 / 2 + 2|alpha|^4 + |alpha|^2 + gamma

Random numbers come from numpy's counter-based Philox generator. Each
(shots, setting) pair of an ensemble gets its own stream spawned from one
SeedSequence, so results do not depend on evaluation order.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.stats import chi2

from .benchmark import GaussianBenchmark, default_benchmark
from .errors import BenchmarkUnavailable, CutoffTooSmall, DisplacementMismatch, UnnormalizedDistribution
from .fock import displaced, sign_label, tail_mass, to_density
from .metrics import GammaSearchSpec
from .states import atomic_write
from .witness import WitnessParams

NORM_TOL = 1e-8
# a phase scan counts as flat unless homogeneity is rejected at this level
FLAT_PVALUE = 1e-3


@dataclass(frozen=True)
class NumberDistribution:
    """p_n(beta): photon-number probabilities after displacing by ``displacement``."""

    probs: np.ndarray
    displacement: complex = 0j

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        if np.any(p < 0):
            raise UnnormalizedDistribution("negative probabilities")
        object.__setattr__(self, "probs", p)

    @property
    def total(self) -> float:
        return float(self.probs.sum())


@dataclass(frozen=True)
class CountHistogram:
    counts: np.ndarray
    shots: int
    displacement: complex = 0j
    seed: int | None = None

    def __post_init__(self):
        c = np.asarray(self.counts, dtype=np.int64)
        if np.any(c < 0) or c.sum() != self.shots:
            raise ValueError("counts must be non-negative and sum to shots")
        object.__setattr__(self, "counts", c)

    @property
    def frequencies(self) -> np.ndarray:
        return self.counts / self.shots


def displaced_number_distribution(rho, beta: complex) -> NumberDistribution:
    """Diagonal of D(beta) rho D(beta)^dag, clipped at zero and renormalised.

    The displaced state is evaluated in a cutoff large enough to hold it; if it
    still leaks into the top of the basis the call fails.
    """
    moved = displaced(to_density(np.asarray(rho, dtype=complex)), beta)
    if tail_mass(moved) > 1e-8:
        raise CutoffTooSmall(f"displacement by {beta} is not resolved (tail {tail_mass(moved):.2g})")
    p = np.real(np.diag(moved)).copy()
    p[p < 0] = 0.0
    return NumberDistribution(p / p.sum(), complex(beta))


def sample_histogram(dist: NumberDistribution, shots: int, seed: int) -> CountHistogram:
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    rng = np.random.Generator(np.random.Philox(seed))
    counts = rng.multinomial(shots, dist.probs / dist.probs.sum())
    return CountHistogram(counts, shots, dist.displacement, seed)


# --- the estimator -----------------------------------------------------------


def _weights(size: int, alpha: complex, gamma: float, sign: int):
    """Per-outcome weights (w0, w_displaced) and the constant of the estimator."""
    n = np.arange(size, dtype=float)
    a2 = abs(alpha) ** 2
    w0 = 2 * n**2 - (1 - 4 * a2) * n - sign * gamma * (-1.0) ** n
    wd = -0.5 * n**2
    const = 2 * a2**2 + a2 + gamma
    return w0, wd, const


def _check_displacements(d0, dplus, dminus, alpha, tol=1e-9):
    alpha = complex(alpha)
    for got, want, label in ((d0, 0j, "0"), (dplus, alpha, "+alpha"), (dminus, -alpha, "-alpha")):
        if abs(complex(got) - want) > tol:
            raise DisplacementMismatch(f"setting {label}: expected displacement {want}, got {got}")


def _evaluate(f0, fplus, fminus, alpha, gamma, sign) -> float:
    size = max(len(f0), len(fplus), len(fminus))
    w0, wd, const = _weights(size, alpha, gamma, sign)
    return float(f0 @ w0[: len(f0)] + fplus @ wd[: len(fplus)] + fminus @ wd[: len(fminus)] + const)


def expectation_via_distributions(p0: NumberDistribution, pplus: NumberDistribution,
                                  pminus: NumberDistribution, params: WitnessParams) -> float:
    for d in (p0, pplus, pminus):
        if abs(d.total - 1) > NORM_TOL:
            raise UnnormalizedDistribution(f"distribution at {d.displacement} sums to {d.total!r}")
    _check_displacements(p0.displacement, pplus.displacement, pminus.displacement, params.alpha)
    return _evaluate(p0.probs, pplus.probs, pminus.probs, params.alpha, params.gamma, params.sign)


def estimate_from_histograms(h0: CountHistogram, hplus: CountHistogram, hminus: CountHistogram,
                             params: WitnessParams) -> float:
    _check_displacements(h0.displacement, hplus.displacement, hminus.displacement, params.alpha)
    return _evaluate(h0.frequencies, hplus.frequencies, hminus.frequencies,
                     params.alpha, params.gamma, params.sign)


def settings_distributions(rho, alpha: complex) -> tuple[NumberDistribution, ...]:
    """The three distributions p(0), p(+alpha), p(-alpha) on a common support."""
    dists = [displaced_number_distribution(rho, b) for b in (0, alpha, -alpha)]
    size = max(d.probs.size for d in dists)
    return tuple(NumberDistribution(np.pad(d.probs, (0, size - d.probs.size)), d.displacement) for d in dists)


# --- ensembles ---------------------------------------------------------------


@dataclass
class EnsembleReport:
    shots_schedule: list
    mean_estimates: list
    std_devs: list
    true_value: float
    trials: int
    seed: int

    def rows(self):
        for n, m, s in zip(self.shots_schedule, self.mean_estimates, self.std_devs):
            yield {"shots": n, "mean": m, "std": s, "true_value": self.true_value,
                   "trials": self.trials, "seed": self.seed}


def run_ensemble(rho, params: WitnessParams, shots_schedule, trials: int, seed: int) -> EnsembleReport:
    """Repeat the three-setting measurement ``trials`` times per shot count.

    The estimator is linear in the counts, so each trial reduces to a dot
    product of a multinomial draw with the outcome weights.
    """
    if trials < 2:
        raise ValueError("need at least two trials for a standard deviation")
    schedule = [int(n) for n in shots_schedule]
    dists = settings_distributions(rho, params.alpha)
    true_value = expectation_via_distributions(*dists, params)
    size = dists[0].probs.size
    w0, wd, const = _weights(size, params.alpha, params.gamma, params.sign)
    weights = (w0, wd, wd)
    streams = np.random.SeedSequence(seed).spawn(len(schedule) * 3)
    means, stds = [], []
    for i, shots in enumerate(schedule):
        est = np.full(trials, const)
        for k, (dist, w) in enumerate(zip(dists, weights)):
            rng = np.random.Generator(np.random.Philox(streams[3 * i + k]))
            counts = rng.multinomial(shots, dist.probs, size=trials)
            est += counts @ w / shots
        means.append(float(est.mean()))
        stds.append(float(est.std(ddof=1)))
    return EnsembleReport(schedule, means, stds, true_value, trials, seed)


def export_report_csv(report: EnsembleReport, path, meta: str = "") -> Path:
    def write(fh):
        fh.write(f"# ensemble {meta}\n".rstrip() + "\n")
        w = csv.DictWriter(fh, ["shots", "mean", "std", "true_value", "trials", "seed"])
        w.writeheader()
        for row in report.rows():
            w.writerow(row)

    return atomic_write(path, write)


def export_report_json(report: EnsembleReport, path) -> Path:
    return atomic_write(path, lambda fh: json.dump(asdict(report), fh, indent=1))


# --- the two-step protocol ---------------------------------------------------


def estimate_amplitude(h0: CountHistogram) -> float:
    """sqrt(<n>) from undisplaced counts; first-order, exact as |alpha| grows."""
    n = np.arange(h0.counts.size)
    return math.sqrt(max(0.0, float(h0.frequencies @ n)))


@dataclass
class PhaseScan:
    phis: np.ndarray
    values: np.ndarray
    maxima: list
    flat: bool
    statistic: str = "vacuum"


def _circular_maxima(values: np.ndarray) -> list[int]:
    """Local maxima on a circular grid; a plateau reports its first index."""
    n = values.size
    out = []
    for i in range(n):
        if not values[i] > values[i - 1]:
            continue
        j = 1
        while j < n and values[(i + j) % n] == values[i]:
            j += 1
        if j == n or values[(i + j) % n] < values[i]:
            out.append(i)
    return out


def phase_scan(rho, amp_est: float, phi_grid=None, shots_per_point: int | None = 1000,
               seed: int = 0, statistic: str = "vacuum") -> PhaseScan:
    """P(phi) after displacing by amp_est e^{i phi}, phi in [0, pi).

    ``statistic='vacuum'`` scores the frequency of the n = 0 outcome, which is
    largest when a coherent component is moved onto the origin;
    ``statistic='mean'`` scores minus the mean photon number instead; that
    depends on phi only through <a>, so it is flat for balanced cats. With
    ``shots_per_point=None`` exact probabilities are used. The grid is treated
    as circular, since phi and phi + pi both align a head of a two-headed cat.
    """
    if statistic not in ("vacuum", "mean"):
        raise ValueError(f"unknown statistic {statistic!r}")
    phis = np.linspace(0, np.pi, 64, endpoint=False) if phi_grid is None else np.asarray(phi_grid, float)
    rho = to_density(np.asarray(rho, dtype=complex))
    streams = np.random.SeedSequence(seed).spawn(phis.size)
    values = np.empty(phis.size)
    variances = np.empty(phis.size)
    for i, phi in enumerate(phis):
        dist = displaced_number_distribution(rho, amp_est * np.exp(1j * phi))
        if shots_per_point is None:
            probs = dist.probs
        else:
            rng = np.random.Generator(np.random.Philox(streams[i]))
            probs = rng.multinomial(shots_per_point, dist.probs) / shots_per_point
        n = np.arange(probs.size)
        if statistic == "vacuum":
            values[i] = probs[0]
            variances[i] = probs[0] * (1 - probs[0])
        else:
            values[i] = -(probs @ n)
            variances[i] = probs @ n**2 - (probs @ n) ** 2
    if shots_per_point is None:
        flat = bool(np.ptp(values) <= 1e-9)
        tol = 1e-12
    else:
        # homogeneity test: chi-square of the point values against their pooled mean
        se2 = max(float(variances.mean()), 1.0 / shots_per_point**2) / shots_per_point
        stat = float(np.sum((values - values.mean()) ** 2) / se2)
        flat = bool(chi2.sf(stat, phis.size - 1) > FLAT_PVALUE)
        tol = 2 * math.sqrt(se2)
    maxima = []
    if not flat:
        peaks = [i for i in _circular_maxima(values) if values[i] >= values.max() - tol]
        peaks.sort(key=lambda i: -values[i])
        maxima = [float(phis[i]) for i in peaks]
    return PhaseScan(phis, values, maxima, bool(flat), statistic)


@dataclass
class ProtocolReport:
    alpha_est: float
    phi_m: float
    alpha_used: complex
    scan_flat: bool
    sign: int
    optimal_gamma: float
    expectation_est: float
    gaussian_floor: float
    xi_est: float
    xi_std_err: float
    seed: int
    scan: PhaseScan = field(repr=False, default=None)

    def as_dict(self) -> dict:
        return {
            "alpha_est": self.alpha_est, "phi_m": self.phi_m,
            "alpha_used_re": complex(self.alpha_used).real, "alpha_used_im": complex(self.alpha_used).imag,
            "scan_flat": self.scan_flat, "sign": sign_label(self.sign), "optimal_gamma": self.optimal_gamma,
            "expectation_est": self.expectation_est, "gaussian_floor": self.gaussian_floor,
            "xi_est": self.xi_est, "xi_std_err": self.xi_std_err, "seed": self.seed,
        }


def _linear_parts(f0, fplus, fminus, alpha, sign):
    """Split the estimate into Q + gamma P using the estimator weights."""
    q = _evaluate(f0, fplus, fminus, alpha, 0.0, sign)
    return q, _evaluate(f0, fplus, fminus, alpha, 1.0, sign) - q


def _std_err(h0, hp, hm, alpha, gamma, sign) -> float:
    """Plug-in standard error of the three-histogram estimator."""
    size = max(h.counts.size for h in (h0, hp, hm))
    w0, wd, _ = _weights(size, alpha, gamma, sign)
    var = 0.0
    for h, w in ((h0, w0), (hp, wd), (hm, wd)):
        f, ww = h.frequencies, w[: h.counts.size]
        var += (f @ ww**2 - (f @ ww) ** 2) / h.shots
    return math.sqrt(max(var, 0.0))


def full_protocol(rho, shots_per_setting: int, seed: int, bench: GaussianBenchmark | None = None,
                  gamma_search: GammaSearchSpec | None = None, phi_grid=None,
                  statistic: str = "vacuum") -> ProtocolReport:
    """Estimate |alpha|, locate the phase, measure the two displaced settings
    and evaluate the catability estimate against the exact Gaussian floor.

    Orientation errors cannot produce false positives: the Gaussian floor is a
    lower bound on <O> for every Gaussian state at every (alpha, gamma), so a
    wrong alpha can only raise the estimate relative to that floor.
    """
    bench = bench or default_benchmark()
    spec = gamma_search or GammaSearchSpec()
    rho = to_density(np.asarray(rho, dtype=complex))
    s_amp, s_scan, s_plus, s_minus = np.random.SeedSequence(seed).generate_state(4)
    h0 = sample_histogram(displaced_number_distribution(rho, 0), shots_per_setting, int(s_amp))
    amp = estimate_amplitude(h0)
    amin, amax = bench.alpha_grid[0], bench.alpha_grid[-1]
    amp_used = float(np.clip(amp, amin, amax))
    scan = phase_scan(rho, amp_used, phi_grid, shots_per_setting, int(s_scan), statistic)
    phi = scan.maxima[0] if scan.maxima else 0.0
    alpha = amp_used * np.exp(1j * phi)
    hp = sample_histogram(displaced_number_distribution(rho, alpha), shots_per_setting, int(s_plus))
    hm = sample_histogram(displaced_number_distribution(rho, -alpha), shots_per_setting, int(s_minus))

    best = None
    for sign in (1, -1):
        if sign not in bench.tables:
            continue
        q, p = _linear_parts(h0.frequencies, hp.frequencies, hm.frequencies, alpha, sign)
        gammas = bench.gamma_grid
        floors = bench.floor_row(amp_used, sign)
        keep = (gammas >= spec.lo) & (gammas <= spec.hi)
        gammas, floors = gammas[keep], floors[keep]

        def ratio(g):
            f = np.interp(g, gammas, floors)
            return (q + g * p) / f if f > 0 else math.inf

        grid = np.linspace(max(spec.lo, gammas[gammas > 0][0]), spec.hi, spec.n_grid)
        vals = np.array([ratio(g) for g in grid])
        i = int(np.argmin(vals))
        res = minimize_scalar(ratio, bounds=(grid[max(i - 1, 0)], grid[min(i + 1, grid.size - 1)]),
                              method="bounded", options={"xatol": spec.xtol})
        g, v = (float(res.x), float(res.fun)) if res.fun < vals[i] else (float(grid[i]), float(vals[i]))
        if best is None or v < best[0]:
            best = (v, sign, g, q, p)
    if best is None:
        raise BenchmarkUnavailable("benchmark has no tables")
    _, sign, g, q, p = best
    floor = bench.exact_floor(amp_used, g, sign)
    value = q + g * p
    se = _std_err(h0, hp, hm, alpha, g, sign)
    return ProtocolReport(amp, phi, complex(alpha), scan.flat, sign, g, value, floor,
                          value / floor, se / floor, seed, scan)


__all__ = [
    "NumberDistribution", "CountHistogram", "EnsembleReport", "PhaseScan", "ProtocolReport",
    "displaced_number_distribution", "sample_histogram", "expectation_via_distributions",
    "estimate_from_histograms", "settings_distributions", "run_ensemble", "export_report_csv",
    "export_report_json", "estimate_amplitude", "phase_scan", "full_protocol",
]
