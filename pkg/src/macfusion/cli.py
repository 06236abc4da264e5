"""Command-line runner: single instances, linear-topology sweeps, symmetric
closed forms, asymptotic tables and oracle checks.

Exit codes: 0 success, 1 configuration error, 2 infeasible target,
3 a verification delta above tolerance.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import yaml

from . import asymptotics as asy
from .errors import Infeasible, MacFusionError
from .model import (NetworkConfig, Scheme, build_linear_topology, min_distortion,
                    uniform_spots)
from .schemes import SSCC_METHODS, minimize_power, symmetric_closed_forms

log = logging.getLogger("macfusion")

EXIT_CONFIG = 1
EXIT_INFEASIBLE = 2
EXIT_VERIFY = 3

CODED = ("sscc", "jscc", "uncoded")
CSV_HEADER = "i,j,P_sscc,P_jscc,P_uncoded,winner"
#: twelve significant digits, locale independent
NUM_FMT = "{:.11e}"
DEFAULT_SWEEP_D = (0.5, 0.1, 0.01)
#: sweep distance as a fraction of the largest d0 at which two sensors can meet D
DEFAULT_D0_FRACTION = 0.9
ASYMPTOTIC_LS = (2, 10, 100, 10_000)
VERIFY_TOL = 0.02


class ConfigError(MacFusionError):
    """Unreadable or inconsistent configuration."""


# ---------------------------------------------------------------------------
# configuration

def _read_yaml(path) -> dict:
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config file not found: {p}")
    try:
        data = yaml.safe_load(p.read_text()) or {}
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse {p}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{p}: top level must be a mapping")
    return data


def network_from_dict(data: dict) -> NetworkConfig:
    """Build a network from a ``sensors`` block or a ``topology`` block."""
    s2 = float(data.get("sigma_s2", 1.0))
    w2 = float(data.get("sigma_w2", 1.0))
    try:
        if "sensors" in data:
            sen = data["sensors"]
            return NetworkConfig(s2, w2, tuple(sen["gains"]), tuple(sen["noise_vars"]))
        if "topology" in data:
            t = data["topology"]
            return build_linear_topology(
                float(t["d0"]), t["positions"], beta_c=float(t.get("beta_c", 2.0)),
                beta_s=float(t.get("beta_s", 2.0)), kappa_c=float(t.get("kappa_c", 1.0)),
                kappa_s=float(t.get("kappa_s", 1.0)), sigma_s2=s2, sigma_w2=w2)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad network description: {exc!r}") from exc
    raise ConfigError("config needs a 'sensors' or a 'topology' block")


def load_config(path) -> tuple:
    """``(network, D or None, raw dict)`` from a YAML file."""
    data = _read_yaml(path)
    D = data.get("D")
    return network_from_dict(data), (None if D is None else float(D)), data


@dataclass
class SweepSpec:
    """Two sensors on a line between source (0) and fusion center (``d0``).

    ``d0`` may be a number or ``None``; ``None`` picks, for every target,
    ``d0_fraction`` of the largest distance at which two sensors can still
    reach it (the distance must shrink as the target tightens).
    """

    d0: Optional[float] = None
    d0_fraction: float = DEFAULT_D0_FRACTION
    position_indices: tuple = tuple(range(1, 10))
    spots: int = 9
    beta_c: float = 2.0
    beta_s: float = 2.0
    kappa_c: float = 1.0
    kappa_s: float = 1.0
    sigma_s2: float = 1.0
    sigma_w2: float = 1.0
    D: tuple = DEFAULT_SWEEP_D
    schemes: tuple = CODED
    output: str = "sweep"
    sscc_method: str = "vertex"
    tol: float = 1e-6

    def __post_init__(self):
        idx = tuple(int(i) for i in self.position_indices)
        if len(set(idx)) != len(idx):
            raise ConfigError(f"position indices must be distinct: {idx}")
        if any(not 1 <= i <= self.spots for i in idx):
            raise ConfigError(f"position indices must lie in 1..{self.spots}: {idx}")
        self.position_indices = idx
        self.D = tuple(float(d) for d in self.D)
        bad = [s for s in self.schemes if s not in CODED]
        if bad:
            raise ConfigError(f"unknown sweep schemes {bad}; expected a subset of {CODED}")
        if not 0.0 < self.d0_fraction < 1.0:
            raise ConfigError("d0_fraction must lie in (0, 1)")
        if self.sscc_method not in SSCC_METHODS:
            raise ConfigError(f"sscc_method must be one of {SSCC_METHODS}")

    @classmethod
    def from_dict(cls, data: dict) -> "SweepSpec":
        known = set(cls.__dataclass_fields__)
        extra = set(data) - known
        if extra:
            raise ConfigError(f"unknown sweep keys: {sorted(extra)}")
        kw = dict(data)
        for key in ("position_indices", "D", "schemes"):
            if key in kw:
                kw[key] = tuple(kw[key])
        return cls(**kw)

    def max_d0(self, D: float) -> float:
        """Largest ``d0`` with two sensors able to reach ``D`` (both at the receiver)."""
        return (2.0 * self.kappa_s / (1.0 / D - 1.0 / self.sigma_s2)) ** (1.0 / self.beta_s)

    def distance(self, D: float) -> float:
        return float(self.d0) if self.d0 is not None else self.d0_fraction * self.max_d0(D)

    def network(self, D: float, i: int, j: int) -> NetworkConfig:
        d0 = self.distance(D)
        spots = uniform_spots(d0, self.spots)
        return build_linear_topology(d0, (spots[i - 1], spots[j - 1]), self.beta_c,
                                     self.beta_s, self.kappa_c, self.kappa_s,
                                     self.sigma_s2, self.sigma_w2)


# ---------------------------------------------------------------------------
# sweep

@dataclass
class CellResult:
    i: int
    j: int
    totals: dict = field(default_factory=dict)   # scheme -> total power or None
    seconds: float = 0.0

    @property
    def winner(self) -> str:
        ok = {k: v for k, v in self.totals.items() if v is not None}
        return min(ok, key=ok.get) if ok else ""

    def csv_row(self) -> str:
        vals = [self.totals.get(s) for s in CODED]
        fields = [str(self.i), str(self.j)]
        fields += ["" if v is None else NUM_FMT.format(v) for v in vals]
        fields.append(self.winner)
        return ",".join(fields)


def solve_cell(spec: SweepSpec, D: float, i: int, j: int) -> CellResult:
    cfg = spec.network(D, i, j)
    out = CellResult(i, j)
    t0 = time.perf_counter()
    for s in spec.schemes:
        kw = {"tol": spec.tol}
        if s == "sscc":
            kw["method"] = spec.sscc_method
        try:
            out.totals[s] = float(minimize_power(cfg, D, s, **kw).total_power)
        except Infeasible as exc:
            log.info("cell (%d,%d) D=%g %s infeasible: %s", i, j, D, s, exc)
            out.totals[s] = None
    out.seconds = time.perf_counter() - t0
    return out


def _solve_cell_args(args):
    return solve_cell(*args)


def run_sweep(spec: SweepSpec, D: float, jobs: int = 1) -> list:
    """All ordered position pairs, row-major in ``(i, j)`` whatever ``jobs`` is."""
    tasks = [(spec, D, i, j) for i in spec.position_indices for j in spec.position_indices]
    if jobs <= 1:
        return [solve_cell(*t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_solve_cell_args, tasks, chunksize=1))


def sweep_csv(cells: Sequence[CellResult]) -> str:
    return "\n".join([CSV_HEADER, *(c.csv_row() for c in cells)]) + "\n"


PLOT_TEMPLATE = '''"""Render the sweep in {csv} as three surfaces (one per scheme).

Generated by `macfusion sweep`; needs pandas and matplotlib.
"""
import sys

import matplotlib.pyplot as plt
import pandas as pd

df = pd.read_csv(sys.argv[1] if len(sys.argv) > 1 else {csv!r})
fig = plt.figure(figsize=(15, 4.5))
for k, col in enumerate(["P_sscc", "P_jscc", "P_uncoded"]):
    piv = df.pivot(index="i", columns="j", values=col)
    jj, ii = np.meshgrid(piv.columns.values, piv.index.values)
    ax = fig.add_subplot(1, 3, k + 1, projection="3d")
    ax.plot_surface(ii, jj, np.log10(piv.values.astype(float)), cmap="viridis")
    ax.set_xlabel("sensor 1 spot")
    ax.set_ylabel("sensor 2 spot")
    ax.set_zlabel("log10 total power")
    ax.set_title(col)
fig.suptitle("D = {D:g}")
fig.tight_layout()
fig.savefig({png!r}, dpi=120)
'''


def _sweep_paths(base: str, D: float, many: bool) -> tuple:
    stem = f"{base}_D{D:g}" if many else base
    return Path(stem + ".csv"), Path(stem + "_plot.py"), stem + ".png"


# ---------------------------------------------------------------------------
# printing helpers

def _fmt(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    return f"{v:.6g}"


def _table(rows: Sequence[Sequence], header: Sequence[str]) -> str:
    cells = [[str(h) for h in header]] + [[_fmt(v) if not isinstance(v, str) else v
                                           for v in r] for r in rows]
    widths = [max(len(r[k]) for r in cells) for k in range(len(header))]
    lines = ["  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# subcommands

def _schemes(arg: str) -> list:
    if arg == "all":
        return [*CODED, Scheme.LOWER_BOUND.value]
    return [Scheme(arg).value]


def cmd_solve(args) -> int:
    cfg, D_cfg, _ = load_config(args.config)
    D = args.D if args.D is not None else D_cfg
    if D is None:
        raise ConfigError("no target: pass -D or set 'D' in the config")
    rows, records, infeasible = [], [], []
    for s in _schemes(args.scheme):
        kw = {}
        if s != Scheme.LOWER_BOUND.value:
            kw["tol"] = args.tol
        if s == "sscc":
            kw["method"] = args.sscc_method
            if cfg.L == 2 and (args.sscc_method or "alpha") == "alpha":
                kw["alpha_grid"] = args.alpha_grid
        try:
            sol = minimize_power(cfg, D, s, **kw)
        except Infeasible as exc:
            infeasible.append(f"{s}: {exc}")
            rows.append([s, None, None, None, "infeasible"])
            continue
        rows.append([s, sol.total_power, ", ".join(f"{p:.6g}" for p in sol.powers),
                     sol.achieved_d, sol.status])
        rec = sol.as_record()
        rec["D"] = D
        records.append(rec)
    print(f"L={cfg.L}  D={D:g}  d_min={min_distortion(cfg):.6g}")
    print(_table(rows, ["scheme", "total power", "powers", "achieved D", "status"]))
    coded = {r[0]: r[1] for r in rows if r[0] in CODED and r[1] is not None}
    if coded:
        print(f"winner: {min(coded, key=coded.get)}")
    if args.output:
        with open(args.output, "a", encoding="utf-8") as fh:
            for rec in records:
                fh.write(json.dumps(rec, sort_keys=True) + "\n")
    for msg in infeasible:
        print(f"infeasible {msg}", file=sys.stderr)
    return EXIT_INFEASIBLE if infeasible and not records else 0


def cmd_sweep(args) -> int:
    data = _read_yaml(args.config) if args.config else {}
    data = dict(data.get("sweep", data))
    if args.D:
        data["D"] = args.D
    if args.output:
        data["output"] = args.output
    if args.sscc_method:
        data["sscc_method"] = args.sscc_method
    if args.d0 is not None:
        data["d0"] = args.d0
    data.setdefault("tol", args.tol)
    spec = SweepSpec.from_dict(data)
    many = len(spec.D) > 1
    for D in spec.D:
        t0 = time.perf_counter()
        cells = run_sweep(spec, D, jobs=args.jobs)
        csv_path, plot_path, png = _sweep_paths(spec.output, D, many)
        csv_path.parent.mkdir(parents=True, exist_ok=True)
        csv_path.write_text(sweep_csv(cells), encoding="utf-8")
        plot_path.write_text(PLOT_TEMPLATE.format(csv=str(csv_path), png=png, D=D),
                             encoding="utf-8")
        wins = {}
        for c in cells:
            wins[c.winner or "none"] = wins.get(c.winner or "none", 0) + 1
        print(f"D={D:g}  d0={spec.distance(D):.6g}  cells={len(cells)}  "
              f"wins={dict(sorted(wins.items()))}  {time.perf_counter() - t0:.1f}s  -> {csv_path}")
    return 0


def cmd_symmetric(args) -> int:
    sp = symmetric_closed_forms(args.L, args.sigma_s2, args.sigma_n2, args.D)
    print(f"L={args.L}  sigma_S^2={args.sigma_s2:g}  sigma_N^2={args.sigma_n2:g}  D={args.D:g}")
    print("per-sensor powers P g / sigma_W^2:")
    rows = [[k, v, args.L * v] for k, v in (("sscc", sp.p_s), ("jscc", sp.p_j),
                                            ("uncoded", sp.p_a), ("lowerbound", sp.p_lob))]
    print(_table(rows, ["scheme", "per sensor", "total"]))
    print(f"rho~={sp.rho_tilde:.6g}  2^(2r)={sp.z:.6g}  ordered={sp.ordered()}")
    return 0


def cmd_asymptotic(args) -> int:
    rep = asy.asymptotic_report(args.L, args.gamma_star, args.sigma_s2, args.sigma_n2, args.D)
    print(f"sigma_S^2={args.sigma_s2:g}  sigma_N^2={args.sigma_n2:g}  D={args.D:g}  "
          f"L={args.L}  gamma*={args.gamma_star:g}")
    print("large-L limits:  L p_s={}  L p_j={}  L^2 p_a={}  L^2 p_lob={}".format(
        *(_fmt(v) for v in (rep.limit_s, rep.limit_j, rep.limit_a, rep.limit_lob))))
    print(f"high-SNR ratios (lambda*={rep.lambda_star:g}):  S={_fmt(rep.ratio_s)}  "
          f"J={_fmt(rep.ratio_j)}  A={_fmt(rep.ratio_a)}  eta={rep.eta:g}")
    rows = []
    for L in ASYMPTOTIC_LS:
        vals = asy.scaled_finite_l(L, args.sigma_s2, args.sigma_n2, args.D)
        rows.append([str(L), vals["s"], vals["j"], vals["a"], vals["lob"],
                     abs(vals["s"] / rep.limit_s - 1.0), abs(vals["j"] / rep.limit_j - 1.0),
                     abs(vals["a"] / rep.limit_a - 1.0)])
    print(_table(rows, ["L", "L p_s", "L p_j", "L^2 p_a", "L^2 p_lob",
                        "err s", "err j", "err a"]))
    if 0.0 < args.gamma_star and rep.lambda_star < 1.0:
        tr = asy.convergence_sweep(args.L, args.gamma_star, args.sigma_s2)
        print("vanishing-noise track D = sigma_S^2 (sigma_N^2/sigma_S^2)^gamma*:")
        rows = [[f"{n:.0e}"] + [tr.ratios[k][i] for k in ("s", "j", "a")]
                for i, n in enumerate(tr.noise_levels)]
        print(_table(rows, ["sigma_N^2", "ratio S", "ratio J", "ratio A"]))
        print("regressed eta:  " + "  ".join(f"{k.upper()}={v:.4f}" for k, v in tr.eta.items()))
    return 0


def cmd_verify(args) -> int:
    from .verify import GridSpec, grid_oracle, simulate_uncoded

    cfg, D_cfg, _ = load_config(args.config)
    D = args.D if args.D is not None else D_cfg
    if D is None:
        raise ConfigError("no target: pass -D or set 'D' in the config")
    grid = GridSpec().scaled(args.budget)
    rows, worst = [], 0.0
    schemes = list(CODED) if args.scheme == "all" else [Scheme(args.scheme).value]
    for s in schemes:
        kw = {"tol": args.tol}
        if s == "sscc" and args.sscc_method:
            kw["method"] = args.sscc_method
        sol = minimize_power(cfg, D, s, **kw)
        orc = grid_oracle(cfg, D, s, grid)
        delta = abs(sol.total_power - orc.value) / max(orc.value, 1e-300)
        worst = max(worst, delta)
        rows.append([s, sol.total_power, orc.value, delta, "ok" if delta < VERIFY_TOL else "FAIL"])
        if s == "uncoded" and args.mc:
            from .schemes import uncoded_mse
            mc = simulate_uncoded(cfg, sol.powers, n_samples=args.mc, seed=args.seed,
                                  workers=args.jobs)
            exact = uncoded_mse(cfg, sol.powers)
            z = abs(mc.value - exact) / mc.uncertainty
            print(f"Monte Carlo uncoded MSE: {mc.value:.6g} +- {mc.uncertainty:.2g} "
                  f"(formula {exact:.6g}, {z:.2f} SE, n={args.mc}, seed={args.seed})")
            if z > 3.0:
                worst = max(worst, math.inf)
    print(_table(rows, ["scheme", "solver", "oracle", "rel delta", "check"]))
    return 0 if worst < VERIFY_TOL else EXIT_VERIFY


# ---------------------------------------------------------------------------
# entry point

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="macfusion", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, config=True):
        if config:
            sp.add_argument("config", help="YAML network description")
        sp.add_argument("-D", type=float, default=None, help="target distortion")
        sp.add_argument("--tol", type=float, default=1e-6, help="SP relative tolerance")
        sp.add_argument("--sscc-method", choices=SSCC_METHODS, default=None,
                        help="separate-coding formulation")

    sp = sub.add_parser("solve", help="minimum power for one network")
    common(sp)
    sp.add_argument("--scheme", default="all",
                    choices=["all", *CODED, Scheme.LOWER_BOUND.value])
    sp.add_argument("--alpha-grid", type=int, default=21, help="time-sharing grid size")
    sp.add_argument("-o", "--output", help="append JSON records to this file")
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("sweep", help="two-sensor linear-topology sweep to CSV")
    sp.add_argument("config", nargs="?", help="YAML sweep description (optional)")
    sp.add_argument("-D", type=float, action="append", help="target distortion (repeatable)")
    sp.add_argument("--d0", type=float, default=None, help="source to receiver distance")
    sp.add_argument("--tol", type=float, default=1e-6)
    sp.add_argument("--sscc-method", choices=SSCC_METHODS, default=None)
    sp.add_argument("-o", "--output", help="output stem (CSV and plot script)")
    sp.add_argument("-j", "--jobs", type=int, default=1, help="worker processes")
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("symmetric", help="closed forms for identical sensors")
    sp.add_argument("-L", type=int, default=2)
    sp.add_argument("-D", type=float, default=0.5)
    sp.add_argument("--sigma-s2", type=float, default=1.0)
    sp.add_argument("--sigma-n2", type=float, default=1.0)
    sp.set_defaults(func=cmd_symmetric)

    sp = sub.add_parser("asymptotic", help="large-L limits and high-SNR ratios")
    sp.add_argument("-L", type=int, default=2)
    sp.add_argument("-D", type=float, default=0.5)
    sp.add_argument("--gamma-star", type=float, default=0.0)
    sp.add_argument("--sigma-s2", type=float, default=1.0)
    sp.add_argument("--sigma-n2", type=float, default=1.0)
    sp.set_defaults(func=cmd_asymptotic)

    sp = sub.add_parser("verify", help="compare solvers against brute-force oracles")
    common(sp)
    sp.add_argument("--scheme", default="all", choices=["all", *CODED])
    sp.add_argument("--budget", type=float, default=1.0, help="oracle grid scale factor")
    sp.add_argument("--mc", type=int, default=0, help="Monte Carlo samples for uncoded")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("-j", "--jobs", type=int, default=1)
    sp.set_defaults(func=cmd_verify)
    return p


def _setup_logging():
    level = os.environ.get("MACFUSION_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")


def main(argv: Optional[Sequence[str]] = None) -> int:
    _setup_logging()
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Infeasible as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
