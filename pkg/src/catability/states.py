"""State specifications, density-matrix files and small I/O helpers.

Density-matrix files are plain text: the first line holds ``dim``, followed by
``dim * dim`` lines ``row col re im`` (zero-based indices).
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DimensionMismatch
from .fock import (
    HilbertConfig,
    basis_state,
    cat_state,
    coherent_state,
    cutoff_dim,
    db_to_r,
    multi_headed_cat,
    photonic_approximation,
    to_density,
)

STATE_KINDS = ("cat", "multihead", "squeezed-fock", "squeezed-02", "coherent", "thermal", "vacuum")


@dataclass(frozen=True)
class StateSpec:
    """A named input state. ``db`` is the squeezing of the photonic
    approximations; negative values stretch the state along x, the axis on
    which a real-amplitude cat lies."""

    kind: str
    alpha: complex = 1.0
    sign: int = -1
    heads: int = 3
    m: int = 0
    db: float = -5.0
    omega: float = 0.618
    nbar: float = 0.5
    path: str | None = None

    def label(self) -> str:
        if self.path:
            return f"file:{self.path}"
        return self.kind


def squeeze_from_db(db: float, law: str = "exp2r") -> float:
    """Squeeze parameter for a dB value: negative dB gives r < 0, which for
    S(r) = exp(r (a^2 - a^dag^2) / 2) squeezes p and stretches x."""
    r = db_to_r(db, law)
    return -r if db < 0 else r


def default_dim(spec: StateSpec) -> int:
    if spec.kind in ("cat", "multihead", "coherent"):
        return cutoff_dim(spec.alpha)
    if spec.kind == "thermal":
        return max(40, math.ceil(spec.nbar * 40 + 20))
    return 60


def build_state(spec: StateSpec, dim: int | None = None, law: str = "exp2r") -> np.ndarray:
    """Density matrix of ``spec`` in a cutoff of ``dim`` (default: per kind)."""
    if spec.path:
        return read_density(spec.path)
    dim = dim or default_dim(spec)
    cfg = HilbertConfig(dim)
    if spec.kind == "cat":
        psi = cat_state(cfg, spec.alpha, spec.sign)
    elif spec.kind == "multihead":
        psi = multi_headed_cat(cfg, spec.alpha, spec.heads, spec.m)
    elif spec.kind == "coherent":
        psi = coherent_state(cfg, spec.alpha)
    elif spec.kind == "vacuum":
        psi = basis_state(cfg, 0)
    elif spec.kind == "squeezed-fock":
        psi = photonic_approximation(cfg, "single-photon", squeeze_from_db(spec.db, law))
    elif spec.kind == "squeezed-02":
        psi = photonic_approximation(cfg, "zero-two", squeeze_from_db(spec.db, law), spec.omega)
    elif spec.kind == "thermal":
        return thermal_state(dim, spec.nbar)
    else:
        raise ValueError(f"unknown state kind {spec.kind!r}; expected one of {STATE_KINDS} or file:<path>")
    return to_density(psi)


def thermal_state(dim: int, nbar: float) -> np.ndarray:
    if nbar < 0:
        raise ValueError(f"nbar must be >= 0, got {nbar}")
    if nbar == 0:
        p = np.zeros(dim)
        p[0] = 1
    else:
        q = nbar / (1 + nbar)
        p = (1 - q) * q ** np.arange(dim)
        p /= p.sum()
    return np.diag(p).astype(complex)


# --- density-matrix files ----------------------------------------------------


def write_density(rho: np.ndarray, path) -> Path:
    rho = to_density(np.asarray(rho, dtype=complex))
    dim = rho.shape[0]

    def write(fh):
        fh.write(f"{dim}\n")
        for i in range(dim):
            for j in range(dim):
                z = rho[i, j]
                fh.write(f"{i} {j} {float(z.real)!r} {float(z.imag)!r}\n")

    return atomic_write(path, write)


def read_density(path) -> np.ndarray:
    lines = Path(path).read_text().split("\n")
    dim = int(lines[0].strip())
    rho = np.zeros((dim, dim), dtype=complex)
    seen = 0
    for line in lines[1:]:
        if not line.strip():
            continue
        i, j, re, im = line.split()
        rho[int(i), int(j)] = complex(float(re), float(im))
        seen += 1
    if seen != dim * dim:
        raise DimensionMismatch(f"{path}: expected {dim * dim} entries, found {seen}")
    return rho


# --- output ------------------------------------------------------------------


def atomic_write(path, write) -> Path:
    """Write through a temporary file and rename, so readers never see a
    partial file."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    with tmp.open("w", newline="") as fh:
        write(fh)
    os.replace(tmp, path)
    return path


def config_hash(config: dict) -> str:
    blob = json.dumps(config, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def write_csv(path, columns, rows, meta: dict) -> Path:
    """CSV with a leading ``# key=value ...`` metadata comment and a header row."""
    def write(fh):
        fh.write("# " + " ".join(f"{k}={v}" for k, v in meta.items()) + "\n")
        w = csv.writer(fh)
        w.writerow(columns)
        for row in rows:
            w.writerow([_fmt(row[c]) for c in columns])

    return atomic_write(path, write)


def write_json(path, payload) -> Path:
    return atomic_write(path, lambda fh: json.dump(payload, fh, indent=1, default=_json_default))


def _fmt(x):
    if isinstance(x, float):
        return repr(x)
    return x


def _json_default(x):
    if isinstance(x, complex):
        return [x.real, x.imag]
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    raise TypeError(f"cannot serialise {type(x).__name__}")


def read_config(path) -> dict:
    """Flat ``key = value`` file; ``#`` starts a comment."""
    out = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}: expected key=value, got {raw!r}")
        k, v = (s.strip() for s in line.split("=", 1))
        out[k.replace("-", "_")] = v
    return out
