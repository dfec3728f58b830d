"""Command-line front end.

    catability catability cat --alpha 1.5 --sign -
    catability sweep-loss cat --alpha 1.5 --sign - --eta-grid 0.5:1:0.05
    catability mc cat --alpha 2 --sign - --shots 1000,4000 --trials 10000
    catability spectrum --alpha 2 --gamma 1 --sign - --k 4
    catability wigner cat --alpha 1.5 --grid=-4:4:41
    catability table verify
    catability multihead --heads 3 --m 0 --alpha 2 --energy-loss-grid 0:40:5

Exit codes: 0 success, 2 invalid input or other library error, 3 an optimiser
hit its evaluation limit (output is still written). Errors are reported as a
JSON object on stderr.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .benchmark import (
    DEFAULT_ALPHA_GRID,
    DEFAULT_GAMMA_GRID,
    GaussianBenchmark,
    build_table,
    default_table_dir,
    export_csv,
    save_table,
    table_filename,
)
from .errors import CatabilityError, OptimizerDidNotConverge
from .fock import HilbertConfig, parse_sign, sign_label, wigner_grid
from .gaussian import minimize_gaussian_expectation
from .loss import LossSpec, apply_loss, eta_from_amplitude_loss, eta_from_energy_loss
from .measurement import run_ensemble
from .metrics import (
    MultiHeadBenchmark,
    catability,
    global_catability,
    global_normalized_infidelity,
    multihead_catability,
    multihead_infidelity,
    normalized_infidelity,
)
from .states import (
    STATE_KINDS,
    StateSpec,
    build_state,
    config_hash,
    read_config,
    write_csv,
    write_json,
)
from .witness import WitnessParams, operator_spectrum

EXIT_OK, EXIT_INVALID, EXIT_NONCONVERGED = 0, 2, 3


class UsageError(CatabilityError):
    """Bad command-line input."""


# --- parsing helpers ---------------------------------------------------------


def parse_grid(text: str) -> np.ndarray:
    """'lo:hi:step' (inclusive of hi), 'lo:hi:Nn' for N points, or 'a,b,c'."""
    text = str(text).strip()
    if ":" in text:
        lo, hi, step = text.split(":")
        lo, hi = float(lo), float(hi)
        if step.endswith("n"):
            grid = np.linspace(lo, hi, int(step[:-1]))
        else:
            st = float(step)
            if st <= 0:
                raise UsageError(f"grid step must be positive in {text!r}")
            grid = lo + st * np.arange(int(math.floor((hi - lo) / st + 1e-9)) + 1)
        grid = np.round(grid, 12)
    else:
        grid = np.array([float(x) for x in text.split(",") if x.strip()])
    if grid.size == 0:
        raise UsageError(f"empty grid {text!r}")
    if np.any(np.diff(grid) <= 0):
        raise UsageError(f"grid {text!r} must be strictly increasing")
    return grid


def parse_alpha(text) -> complex:
    return complex(str(text).replace(" ", "").replace("i", "j"))


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--dim", type=int, help="Fock cutoff (default: chosen per state)")
    p.add_argument("--table-dir", help="directory holding benchmark_plus/minus.json")
    p.add_argument("--db-law", choices=["exp2r", "exp4r"], default="exp2r",
                   help="variance law used to convert dB to a squeeze parameter")
    p.add_argument("--out", help="output file (csv or json by --format)")
    p.add_argument("--format", choices=["csv", "json"], default="json")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--config", help="key=value file; explicit flags take precedence")


def _add_state(p: argparse.ArgumentParser, positional=True) -> None:
    if positional:
        p.add_argument("state", help=f"one of {', '.join(STATE_KINDS)} or file:<path>")
    p.add_argument("--state-alpha", type=parse_alpha, default=None,
                   help="amplitude of the input state (defaults to --alpha)")
    p.add_argument("--state-sign", default=None, help="parity of an input cat (defaults to --sign)")
    p.add_argument("--heads", type=int, default=3)
    p.add_argument("--m", type=int, default=0)
    p.add_argument("--db", type=float, default=-5.0)
    p.add_argument("--omega", type=float, default=0.618)
    p.add_argument("--nbar", type=float, default=0.5)


def _add_loss(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group()
    g.add_argument("--loss-eta", type=float, help="amplitude transmissivity eta")
    g.add_argument("--energy-loss-pct", type=float, help="photon loss L: eta = sqrt(1 - L)")
    g.add_argument("--amplitude-loss-pct", type=float, help="amplitude loss L: eta = 1 - L")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="catability", description=__doc__.split("\n\n")[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("catability", help="catability and normalised infidelity of a state")
    _add_common(p)
    _add_state(p)
    _add_loss(p)
    p.add_argument("--alpha", type=parse_alpha, help="operator amplitude; omit for the global search")
    p.add_argument("--sign", help="+ or -; omit to search both parities")
    p.add_argument("--no-zeta", action="store_true", help="skip the normalised infidelity")

    p = sub.add_parser("sweep-loss", help="xi and zeta across a transmissivity grid")
    _add_common(p)
    _add_state(p)
    p.add_argument("--alpha", type=parse_alpha, help="operator amplitude; omit for the global search")
    p.add_argument("--sign")
    p.add_argument("--eta-grid", default="0.5:1:0.05")

    p = sub.add_parser("mc", help="Monte Carlo ensemble of the direct measurement")
    _add_common(p)
    _add_state(p)
    p.add_argument("--alpha", type=parse_alpha, required=True)
    p.add_argument("--sign", default="-")
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--shots", default="1000,4000")
    p.add_argument("--trials", type=int, default=10000)
    p.add_argument("--losses", default="0,10,20,30", help="loss percentages")
    p.add_argument("--loss-convention", choices=["energy", "amplitude", "both"], default="both")

    p = sub.add_parser("spectrum", help="lowest eigenpairs of the witness")
    _add_common(p)
    p.add_argument("--alpha", type=parse_alpha, required=True)
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--sign", default="-")
    p.add_argument("--squeeze-r", type=float, default=0.0)
    p.add_argument("--heads", type=int, default=2)
    p.add_argument("--m", type=int, default=0)
    p.add_argument("--k", type=int, default=4)
    p.add_argument("--wigner-dir", help="also write the Wigner grid of each eigenstate here")
    p.add_argument("--grid", default="-4:4:41n", help="Wigner grid for --wigner-dir")

    p = sub.add_parser("wigner", help="Wigner function of a state on a grid")
    _add_common(p)
    _add_state(p)
    _add_loss(p)
    p.add_argument("--alpha", type=parse_alpha, default=1.0)
    p.add_argument("--sign", default="-")
    p.add_argument("--grid", default="-4:4:41n")

    p = sub.add_parser("table", help="build, verify or export the Gaussian benchmark")
    _add_common(p)
    p.add_argument("action", choices=["build", "verify", "export"])
    p.add_argument("--sign", default="both")
    p.add_argument("--alpha-grid")
    p.add_argument("--gamma-grid")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--nodes", type=int, default=20, help="nodes re-minimised by verify")
    p.add_argument("--off-grid", action="store_true", help="verify at random off-grid points instead")

    p = sub.add_parser("multihead", help="N-headed catability across loss")
    _add_common(p)
    p.add_argument("--heads", type=int, default=3)
    p.add_argument("--m", type=int, default=0)
    p.add_argument("--alpha", type=parse_alpha, default=2.0)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--eta-grid")
    g.add_argument("--energy-loss-grid", default=None)
    p.add_argument("--operator-m", type=int, help="symmetry index of the operator (default: --m)")
    return ap


def parse_args(argv=None) -> argparse.Namespace:
    """Parse ``argv``; values from ``--config`` fill in flags not given explicitly."""
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if known.config:
        values = read_config(known.config)
        command = next((tok for tok in argv if tok in COMMANDS), None)
        if command is None:
            raise UsageError("a subcommand is required")
        sub = parser._subparsers._group_actions[0].choices[command]
        dests = {a.dest: a for a in sub._actions}
        unknown = set(values) - set(dests)
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        defaults = {}
        for key, raw in values.items():
            action = dests[key]
            if action.nargs == 0:
                defaults[key] = raw.lower() in ("1", "true", "yes")
            else:
                defaults[key] = (action.type or str)(raw)
            action.required = False
        # explicit flags still win: set_defaults only replaces argparse defaults
        sub.set_defaults(**defaults)
    return parser.parse_args(argv)


# --- shared plumbing ---------------------------------------------------------


def _eta(args) -> float:
    if getattr(args, "loss_eta", None) is not None:
        return args.loss_eta
    if getattr(args, "energy_loss_pct", None) is not None:
        return eta_from_energy_loss(args.energy_loss_pct)
    if getattr(args, "amplitude_loss_pct", None) is not None:
        return eta_from_amplitude_loss(args.amplitude_loss_pct)
    return 1.0


def _state_spec(args) -> StateSpec:
    text = args.state
    alpha = args.state_alpha if args.state_alpha is not None else (getattr(args, "alpha", None) or 1.0)
    sign_text = args.state_sign or getattr(args, "sign", None) or "-"
    if text.startswith("file:"):
        return StateSpec("file", path=text[5:])
    if text not in STATE_KINDS:
        raise UsageError(f"unknown state {text!r}; expected one of {STATE_KINDS} or file:<path>")
    return StateSpec(text, alpha=alpha, sign=parse_sign(sign_text), heads=args.heads, m=args.m,
                     db=args.db, omega=args.omega, nbar=args.nbar)


def _load_state(args):
    spec = _state_spec(args)
    rho = build_state(spec, args.dim, args.db_law)
    return spec, rho


def _bench(args) -> GaussianBenchmark:
    return GaussianBenchmark.from_dir(args.table_dir or default_table_dir())


def _config(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("out", "config")}


def _meta(args, **extra) -> dict:
    return {"catability": __version__, "command": args.command, "config": config_hash(_config(args)),
            "seed": args.seed, **extra}


def _emit(args, payload: dict, columns=None, rows=None) -> None:
    """Print a JSON summary; write ``--out`` as csv (rows) or json (payload)."""
    if args.out:
        if args.format == "csv" and columns is not None:
            write_csv(args.out, columns, rows, _meta(args))
        else:
            write_json(args.out, {"meta": _meta(args), **payload})
    print(json.dumps(payload, default=_jsonable, indent=1))


def _jsonable(x):
    if isinstance(x, complex):
        return [x.real, x.imag]
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    return str(x)


def _result_dict(res, include_trace=True) -> dict:
    d = res.as_dict()
    if include_trace:
        d["trace"] = [list(t) for t in res.trace]
    return d


def _metrics(rho, alpha, sign, bench, want_zeta=True):
    """(xi, zeta) at a given (alpha, sign), or the global search when either is None."""
    if alpha is not None and sign is not None:
        a = abs(alpha)
        xi = catability(rho, a, sign, bench=bench)
        zeta = normalized_infidelity(rho, a, sign, bench) if want_zeta else None
        return xi, zeta
    signs = (parse_sign(sign),) if sign is not None else (1, -1)
    rng = (abs(alpha), abs(alpha)) if alpha is not None else None
    if rng is not None:
        # a fixed alpha with both parities: evaluate each sign, keep the smaller
        xis = [catability(rho, rng[0], s, bench=bench) for s in signs]
        zetas = [normalized_infidelity(rho, rng[0], s, bench) for s in signs] if want_zeta else [None]
        xi = min(xis, key=lambda r: r.value)
        zeta = min(zetas, key=lambda r: r.value) if want_zeta else None
        return xi, zeta
    xi = global_catability(rho, bench=bench, signs=signs)
    zeta = global_normalized_infidelity(rho, bench=bench, signs=signs) if want_zeta else None
    return xi, zeta


# --- commands ----------------------------------------------------------------


def cmd_catability(args) -> dict:
    spec, rho = _load_state(args)
    eta = _eta(args)
    rho = apply_loss(rho, LossSpec(eta))
    xi, zeta = _metrics(rho, args.alpha, args.sign, _bench(args), not args.no_zeta)
    payload = {"state": spec.label(), "eta": eta, "xi": _result_dict(xi)}
    if zeta is not None:
        payload["zeta"] = _result_dict(zeta)
    row = {"eta": eta, "xi": xi.value, "alpha_xi": abs(xi.optimal_alpha), "gamma_xi": xi.optimal_gamma,
           "sign_xi": sign_label(xi.sign), "zeta": zeta.value if zeta else math.nan,
           "alpha_zeta": abs(zeta.optimal_alpha) if zeta else math.nan,
           "sign_zeta": sign_label(zeta.sign) if zeta else ""}
    _emit(args, payload, list(row), [row])
    return payload


def _non_increasing_report(etas, values) -> dict:
    """Check that a quantity does not increase as eta grows toward 1."""
    v = np.asarray(values, dtype=float)
    rises = [(float(etas[i]), float(etas[i + 1])) for i in range(len(v) - 1) if v[i + 1] > v[i] + 1e-6]
    return {"non_increasing": not rises, "violations": rises}


def cmd_sweep_loss(args) -> dict:
    etas = parse_grid(args.eta_grid)
    if etas[0] < 0 or etas[-1] > 1:
        raise UsageError("eta grid must lie in [0, 1]")
    spec, rho0 = _load_state(args)
    bench = _bench(args)
    rows = []
    for eta in etas:
        rho = apply_loss(rho0, LossSpec(float(eta)))
        xi, zeta = _metrics(rho, args.alpha, args.sign, bench)
        rows.append({"eta": float(eta), "xi": xi.value, "zeta": zeta.value,
                     "alpha_xi": abs(xi.optimal_alpha), "gamma_xi": xi.optimal_gamma,
                     "sign_xi": sign_label(xi.sign), "alpha_zeta": abs(zeta.optimal_alpha),
                     "sign_zeta": sign_label(zeta.sign)})
    report = {"xi": _non_increasing_report(etas, [r["xi"] for r in rows]),
              "zeta": _non_increasing_report(etas, [r["zeta"] for r in rows])}
    payload = {"state": spec.label(), "rows": rows, "monotonicity": report}
    _emit(args, payload, list(rows[0]), rows)
    return payload


def cmd_mc(args) -> dict:
    spec, rho0 = _load_state(args)
    params = WitnessParams(args.alpha, args.gamma, parse_sign(args.sign))
    shots = [int(x) for x in parse_grid(args.shots)]
    losses = parse_grid(args.losses)
    conventions = ["energy", "amplitude"] if args.loss_convention == "both" else [args.loss_convention]
    rows = []
    for conv in conventions:
        for pct in losses:
            eta = eta_from_energy_loss(pct) if conv == "energy" else eta_from_amplitude_loss(pct)
            rho = apply_loss(rho0, LossSpec(eta))
            rep = run_ensemble(rho, params, shots, args.trials, args.seed)
            for row in rep.rows():
                rows.append({"convention": conv, "loss_pct": float(pct), "eta": eta, **row})
    payload = {"state": spec.label(), "rows": rows}
    _emit(args, payload, list(rows[0]), rows)
    return payload


def cmd_spectrum(args) -> dict:
    params = WitnessParams(args.alpha, args.gamma, parse_sign(args.sign), args.squeeze_r, args.heads, args.m)
    dim = args.dim or HilbertConfig(max(80, int(abs(args.alpha) ** 2 * 4 + 40))).dim
    pairs = operator_spectrum(dim, params, args.k)
    rows = [{"index": i, "eigenvalue": p.value, "truncation_dominated": p.truncation_dominated}
            for i, p in enumerate(pairs)]
    if args.wigner_dir:
        grid = parse_grid(args.grid)
        for i, p in enumerate(pairs):
            if p.truncation_dominated:
                continue
            w = wigner_grid(p.vector, grid, grid)
            wrows = [{"x": float(x), "p": float(q), "W": float(w[a, b])}
                     for a, x in enumerate(grid) for b, q in enumerate(grid)]
            write_csv(Path(args.wigner_dir) / f"eigenstate_{i}.csv", ["x", "p", "W"], wrows,
                      _meta(args, eigenvalue=repr(p.value)))
    # truncation-dominated eigenvalues are kept in the file but flagged
    payload = {"dim": dim, "eigenvalues": [r for r in rows if not r["truncation_dominated"]],
               "flagged": [r for r in rows if r["truncation_dominated"]]}
    _emit(args, payload, ["index", "eigenvalue", "truncation_dominated"], rows)
    return payload


def cmd_wigner(args) -> dict:
    spec, rho = _load_state(args)
    rho = apply_loss(rho, LossSpec(_eta(args)))
    grid = parse_grid(args.grid)
    w = wigner_grid(rho, grid, grid)
    rows = [{"x": float(x), "p": float(q), "W": float(w[a, b])}
            for a, x in enumerate(grid) for b, q in enumerate(grid)]
    payload = {"state": spec.label(), "min": float(w.min()), "max": float(w.max()), "points": len(rows)}
    if args.out:
        if args.format == "csv":
            write_csv(args.out, ["x", "p", "W"], rows, _meta(args))
        else:
            write_json(args.out, {"meta": _meta(args), **payload, "grid": grid.tolist(), "W": w.tolist()})
    print(json.dumps(payload, indent=1))
    return payload


def _table_signs(text: str):
    return [1, -1] if text == "both" else [parse_sign(text)]


def cmd_table(args) -> dict:
    directory = Path(args.table_dir or default_table_dir())
    signs = _table_signs(args.sign)
    if args.action == "build":
        ag = parse_grid(args.alpha_grid) if args.alpha_grid else DEFAULT_ALPHA_GRID
        gg = parse_grid(args.gamma_grid) if args.gamma_grid else DEFAULT_GAMMA_GRID
        out_dir = Path(args.out) if args.out else directory
        written = []
        for s in signs:
            table = build_table(ag, gg, s, workers=args.workers)
            written.append(str(save_table(table, out_dir / table_filename(s))))
        payload = {"written": written}
        print(json.dumps(payload, indent=1))
        return payload
    bench = GaussianBenchmark.from_dir(directory)
    if args.action == "export":
        out = Path(args.out or ".")
        written = [str(export_csv(bench.table(s), out / table_filename(s).replace(".json", ".csv"),
                                       _meta(args)))
                   for s in signs if s in bench.tables]
        payload = {"written": written}
        print(json.dumps(payload, indent=1))
        return payload
    # verify
    rng = np.random.default_rng(args.seed)
    rows = []
    for s in signs:
        table = bench.table(s)
        for _ in range(args.nodes):
            if args.off_grid:
                a = float(rng.uniform(table.alpha_grid[0], table.alpha_grid[-1]))
                g = float(rng.uniform(max(table.gamma_grid[1], 0.1), table.gamma_grid[-1]))
                stored = table.floor(a, g)
            else:
                i = int(rng.integers(table.alpha_grid.size))
                j = int(rng.integers(1, table.gamma_grid.size))
                a, g = float(table.alpha_grid[i]), float(table.gamma_grid[j])
                stored = float(table.floors[i, j])
            direct = minimize_gaussian_expectation(a, g, s).value
            rows.append({"sign": sign_label(s), "alpha": a, "gamma": g, "table": stored, "direct": direct,
                         "rel_dev": abs(stored - direct) / abs(direct)})
    payload = {"max_rel_dev": max(r["rel_dev"] for r in rows), "nodes": rows}
    _emit(args, payload, list(rows[0]), rows)
    return payload


def cmd_multihead(args) -> dict:
    from .fock import multi_headed_cat, to_density

    if args.eta_grid:
        etas = parse_grid(args.eta_grid)
        losses = 100 * (1 - etas**2)
    else:
        losses = parse_grid(args.energy_loss_grid or "0:40:5")
        etas = np.array([eta_from_energy_loss(p) for p in losses])
    op_m = args.m if args.operator_m is None else args.operator_m
    dim = args.dim or max(60, int(abs(args.alpha) ** 2 + 10 * abs(args.alpha) + 30))
    psi = multi_headed_cat(HilbertConfig(dim), args.alpha, args.heads, args.m)
    bench = MultiHeadBenchmark(args.alpha, args.heads, op_m)
    rows = []
    for eta, pct in zip(etas, losses):
        rho = apply_loss(to_density(psi), LossSpec(float(eta)))
        xi = multihead_catability(rho, bench)
        zeta = multihead_infidelity(rho, bench)
        rows.append({"eta": float(eta), "energy_loss_pct": float(pct), "xi": xi.value,
                     "gamma_xi": xi.optimal_gamma, "zeta": zeta.value})
    payload = {"heads": args.heads, "state_m": args.m, "operator_m": op_m, "alpha": args.alpha, "rows": rows}
    _emit(args, payload, list(rows[0]), rows)
    return payload


COMMANDS = {
    "catability": cmd_catability, "sweep-loss": cmd_sweep_loss, "mc": cmd_mc, "spectrum": cmd_spectrum,
    "wigner": cmd_wigner, "table": cmd_table, "multihead": cmd_multihead,
}


def main(argv=None) -> int:
    try:
        args = parse_args(argv)
    except SystemExit as exc:  # argparse usage errors
        return EXIT_INVALID if exc.code else EXIT_OK
    except (CatabilityError, ValueError, OSError) as exc:
        _report(exc)
        return EXIT_INVALID
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", OptimizerDidNotConverge)
        try:
            COMMANDS[args.command](args)
        except (CatabilityError, ValueError, OSError) as exc:
            _report(exc)
            return EXIT_INVALID
    if any(issubclass(w.category, OptimizerDidNotConverge) for w in caught):
        _report(OptimizerDidNotConverge(str(next(w.message for w in caught
                                                  if issubclass(w.category, OptimizerDidNotConverge)))))
        return EXIT_NONCONVERGED
    return EXIT_OK


def _report(exc: BaseException) -> None:
    print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)


if __name__ == "__main__":
    sys.exit(main())
