"""Precomputed Gaussian floors and fidelity ceilings on an (alpha, gamma) grid.

Table files are JSON documents::

    {"format": "catability-benchmark", "version": 1, "sign": "-",
     "variance_law": "exp2r", "alpha_grid": [...], "gamma_grid": [...],
     "floors": [[...], ...], "fid_ceilings": [...], "checksum": "<sha256>"}

Floats are written with ``repr`` precision, so a save/load round trip is
bitwise exact. The checksum covers the grids, floors and ceilings.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import BenchmarkUnavailable, CorruptTableFile, GridMismatch
from .fock import parse_sign, sign_label
from .gaussian import Budget, maximize_gaussian_fidelity, minimize_gaussian_expectation

FORMAT = "catability-benchmark"
VERSION = 1
TABLE_DIR_ENV = "CATABILITY_TABLE_DIR"

DEFAULT_ALPHA_GRID = np.round(np.arange(1, 81) * 0.05, 10)
DEFAULT_GAMMA_GRID = np.round(np.arange(51) * 0.1, 10)


@dataclass
class BenchmarkTable:
    alpha_grid: np.ndarray
    gamma_grid: np.ndarray
    sign: int
    floors: np.ndarray
    fid_ceilings: np.ndarray
    variance_law: str = "exp2r"

    def __post_init__(self):
        self.alpha_grid = np.asarray(self.alpha_grid, dtype=float)
        self.gamma_grid = np.asarray(self.gamma_grid, dtype=float)
        self.floors = np.asarray(self.floors, dtype=float)
        self.fid_ceilings = np.asarray(self.fid_ceilings, dtype=float)
        self.sign = parse_sign(self.sign)
        _check_grid(self.alpha_grid, "alpha")
        _check_grid(self.gamma_grid, "gamma")
        if self.floors.shape != (self.alpha_grid.size, self.gamma_grid.size):
            raise GridMismatch(f"floors shape {self.floors.shape} does not match the grids")
        if self.fid_ceilings.shape != self.alpha_grid.shape:
            raise GridMismatch("fid_ceilings must have one entry per alpha node")

    def _alpha_weights(self, alpha: float) -> tuple[int, int, float]:
        a = abs(alpha)
        grid = self.alpha_grid
        if not grid[0] - 1e-12 <= a <= grid[-1] + 1e-12:
            raise BenchmarkUnavailable(f"|alpha|={a:.4g} outside table range [{grid[0]}, {grid[-1]}]")
        hi = int(np.clip(np.searchsorted(grid, a), 1, grid.size - 1))
        w = (a - grid[hi - 1]) / (grid[hi] - grid[hi - 1])
        return hi - 1, hi, float(np.clip(w, 0.0, 1.0))

    def floor_row(self, alpha: float) -> np.ndarray:
        """Floors over ``gamma_grid`` at |alpha|.

        Floors grow roughly like a power of |alpha|, so positive entries are
        interpolated linearly in (log alpha, log floor); zero floors stay zero.
        """
        lo, hi, w = self._alpha_weights(alpha)
        f_lo, f_hi = self.floors[lo], self.floors[hi]
        a_lo, a_hi = self.alpha_grid[lo], self.alpha_grid[hi]
        positive = (f_lo > 0) & (f_hi > 0)
        if a_lo <= 0 or not positive.any():
            return (1 - w) * f_lo + w * f_hi
        wl = float(np.clip(math.log(max(abs(alpha), a_lo) / a_lo) / math.log(a_hi / a_lo), 0.0, 1.0))
        out = (1 - w) * f_lo + w * f_hi
        out[positive] = np.exp((1 - wl) * np.log(f_lo[positive]) + wl * np.log(f_hi[positive]))
        return out

    def floor(self, alpha: float, gamma) -> np.ndarray | float:
        """Bilinear interpolation of the Gaussian floor."""
        g = np.asarray(gamma, dtype=float)
        if np.any(g < self.gamma_grid[0] - 1e-12) or np.any(g > self.gamma_grid[-1] + 1e-12):
            raise BenchmarkUnavailable(f"gamma outside [{self.gamma_grid[0]}, {self.gamma_grid[-1]}]")
        out = np.interp(g, self.gamma_grid, self.floor_row(alpha))
        return float(out) if out.ndim == 0 else out

    def ceiling(self, alpha: float) -> float:
        lo, hi, w = self._alpha_weights(alpha)
        return float((1 - w) * self.fid_ceilings[lo] + w * self.fid_ceilings[hi])

    def checksum(self) -> str:
        h = hashlib.sha256()
        for arr in (self.alpha_grid, self.gamma_grid, self.floors, self.fid_ceilings):
            h.update(np.ascontiguousarray(arr, dtype="<f8").tobytes())
        h.update(f"{self.sign}|{self.variance_law}".encode())
        return h.hexdigest()


def _check_grid(grid: np.ndarray, name: str) -> None:
    if grid.ndim != 1 or grid.size < 2:
        raise GridMismatch(f"{name} grid needs at least two nodes")
    if np.any(np.diff(grid) <= 0):
        raise GridMismatch(f"{name} grid must be strictly increasing")


# --- construction ------------------------------------------------------------


def _floor_node(args):
    alpha, gamma, sign, budget = args
    if gamma == 0:
        # a coherent state at alpha annihilates the quartic term
        return 0.0
    return minimize_gaussian_expectation(alpha, gamma, sign, budget).value


def _ceiling_node(args):
    alpha, sign, budget = args
    return maximize_gaussian_fidelity(alpha, sign, budget).value


def build_table(alpha_grid, gamma_grid, sign, budget: Budget | None = None,
                workers: int = 1, progress=None) -> BenchmarkTable:
    """Minimise every grid node independently; results do not depend on ``workers``."""
    budget = budget or Budget()
    alpha_grid = np.asarray(alpha_grid, dtype=float)
    gamma_grid = np.asarray(gamma_grid, dtype=float)
    _check_grid(alpha_grid, "alpha")
    _check_grid(gamma_grid, "gamma")
    s = parse_sign(sign)
    floor_jobs = [(float(a), float(g), s, budget) for a in alpha_grid for g in gamma_grid]
    ceil_jobs = [(float(a), s, budget) for a in alpha_grid]
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            floors = list(pool.map(_floor_node, floor_jobs, chunksize=8))
            ceilings = list(pool.map(_ceiling_node, ceil_jobs))
    else:
        floors = []
        for i, job in enumerate(floor_jobs):
            floors.append(_floor_node(job))
            if progress and i % len(gamma_grid) == 0:
                progress(f"floors alpha={job[0]:.3f}")
        ceilings = [_ceiling_node(job) for job in ceil_jobs]
    return BenchmarkTable(
        alpha_grid, gamma_grid, s,
        np.array(floors).reshape(alpha_grid.size, gamma_grid.size),
        np.array(ceilings),
    )


# --- persistence -------------------------------------------------------------


def save_table(table: BenchmarkTable, path) -> Path:
    path = Path(path)
    doc = {
        "format": FORMAT,
        "version": VERSION,
        "sign": sign_label(table.sign),
        "variance_law": table.variance_law,
        "alpha_grid": table.alpha_grid.tolist(),
        "gamma_grid": table.gamma_grid.tolist(),
        "floors": table.floors.tolist(),
        "fid_ceilings": table.fid_ceilings.tolist(),
        "checksum": table.checksum(),
    }
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(json.dumps(doc))
    os.replace(tmp, path)
    return path


def load_table(path) -> BenchmarkTable:
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise CorruptTableFile(f"cannot read table {path}: {exc}") from exc
    if doc.get("format") != FORMAT or doc.get("version") != VERSION:
        raise CorruptTableFile(f"{path} is not a version {VERSION} benchmark table")
    table = BenchmarkTable(
        np.array(doc["alpha_grid"]), np.array(doc["gamma_grid"]), doc["sign"],
        np.array(doc["floors"]), np.array(doc["fid_ceilings"]), doc.get("variance_law", "exp2r"),
    )
    if table.checksum() != doc.get("checksum"):
        raise CorruptTableFile(f"checksum mismatch in {path}")
    return table


def export_csv(table: BenchmarkTable, path, meta: dict | None = None) -> Path:
    path = Path(path)
    extra = "".join(f" {k}={v}" for k, v in (meta or {}).items())
    tmp = path.with_suffix(path.suffix + ".tmp")
    with tmp.open("w", newline="") as fh:
        fh.write(f"# {FORMAT} v{VERSION} sign={sign_label(table.sign)} checksum={table.checksum()}{extra}\n")
        w = csv.writer(fh)
        w.writerow(["alpha", "gamma", "floor", "fid_ceiling"])
        for i, a in enumerate(table.alpha_grid):
            for j, g in enumerate(table.gamma_grid):
                w.writerow([repr(float(a)), repr(float(g)), repr(float(table.floors[i, j])),
                            repr(float(table.fid_ceilings[i]))])
    os.replace(tmp, path)
    return path


def table_filename(sign) -> str:
    return "benchmark_plus.json" if parse_sign(sign) > 0 else "benchmark_minus.json"


def default_table_dir() -> Path:
    env = os.environ.get(TABLE_DIR_ENV)
    if env:
        return Path(env)
    return Path(str(resources.files("catability") / "data"))


# --- the benchmark used by the metrics ---------------------------------------


class GaussianBenchmark:
    """Gaussian floors/ceilings for both parities: table lookups plus exact,
    cached re-minimisation at individual points."""

    def __init__(self, tables: dict, budget: Budget | None = None):
        self.tables = {parse_sign(k): v for k, v in tables.items()}
        self.budget = budget or Budget()
        grids = [t.gamma_grid for t in self.tables.values()]
        if any(not np.array_equal(grids[0], g) for g in grids[1:]):
            raise GridMismatch("tables for the two parities use different gamma grids")

    @classmethod
    def from_dir(cls, directory=None, budget: Budget | None = None) -> "GaussianBenchmark":
        directory = Path(directory) if directory else default_table_dir()
        tables = {}
        for s in (1, -1):
            path = directory / table_filename(s)
            if path.exists():
                tables[s] = load_table(path)
        if not tables:
            raise BenchmarkUnavailable(f"no benchmark tables found in {directory}")
        return cls(tables, budget)

    def table(self, sign) -> BenchmarkTable:
        s = parse_sign(sign)
        if s not in self.tables:
            raise BenchmarkUnavailable(f"no table for sign {sign_label(s)}")
        return self.tables[s]

    @property
    def gamma_grid(self) -> np.ndarray:
        return next(iter(self.tables.values())).gamma_grid

    @property
    def alpha_grid(self) -> np.ndarray:
        return next(iter(self.tables.values())).alpha_grid

    def floor_row(self, alpha: float, sign) -> np.ndarray:
        return self.table(sign).floor_row(alpha)

    def floor(self, alpha: float, gamma, sign):
        return self.table(sign).floor(alpha, gamma)

    def ceiling(self, alpha: float, sign) -> float:
        return self.table(sign).ceiling(alpha)

    def exact_floor(self, alpha: float, gamma: float, sign) -> float:
        return _exact_floor(round(abs(alpha), 12), round(float(gamma), 12), parse_sign(sign), self.budget)

    def exact_ceiling(self, alpha: float, sign) -> float:
        return _exact_ceiling(round(abs(alpha), 12), parse_sign(sign), self.budget)


@lru_cache(maxsize=4096)
def _exact_floor(alpha: float, gamma: float, sign: int, budget: Budget) -> float:
    if gamma == 0:
        return 0.0
    return minimize_gaussian_expectation(alpha, gamma, sign, budget).value


@lru_cache(maxsize=1024)
def _exact_ceiling(alpha: float, sign: int, budget: Budget) -> float:
    return maximize_gaussian_fidelity(alpha, sign, budget).value


@lru_cache(maxsize=1)
def default_benchmark() -> GaussianBenchmark:
    return GaussianBenchmark.from_dir()
