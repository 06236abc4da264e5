"""Independent oracles for the solvers.

* ``simulate_uncoded`` draws the source, measurement and channel noise and
  measures the LMMSE error of amplify-and-forward directly.
* ``grid_oracle`` brute-forces the two-sensor problems over rates and powers
  with the rate-region inequalities written out in closed form.
* ``permutation_oracle`` enumerates every successive-decoding vertex.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from . import kernels
from .errors import NoFeasiblePoint, TooManySensors
from .model import DistortionLike, NetworkConfig, Scheme, as_distortion, min_distortion
from .ordering import vertex_power_allocation

MC_BLOCK = 1 << 16
MIN_SAMPLES = 10_000
MAX_PERMUTATION_SENSORS = 7
REGION_TOL = 1e-9


@dataclass
class OracleResult:
    """Oracle value with its uncertainty (standard error or grid resolution)."""

    value: float
    uncertainty: float
    evaluations: int
    argmin: object = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.uncertainty > 0:
            raise ValueError("an oracle must report a positive uncertainty")


# ---------------------------------------------------------------------------
# Monte Carlo

def _forward_gains(cfg: NetworkConfig, powers) -> np.ndarray:
    """Per-sensor amplitude seen at the receiver, ``sqrt(g_j) alpha_j``."""
    p = np.asarray(powers, dtype=float)
    return np.sqrt(cfg.g * p / (cfg.sigma_s2 + cfg.sigma_n2))


def lmmse_coefficient(cfg: NetworkConfig, powers) -> float:
    """``gamma`` with ``E[(X0 - gamma Z) Z] = 0``."""
    h = _forward_gains(cfg, powers)
    cross = cfg.sigma_s2 * h.sum()
    var_z = cfg.sigma_s2 * h.sum() ** 2 + float(np.sum(h * h * cfg.sigma_n2)) + cfg.sigma_w2
    return cross / var_z


def _box_muller(gen: np.random.Generator, shape) -> np.ndarray:
    """Standard normals from pairs of uniforms (cosine branch only)."""
    u1 = 1.0 - gen.random(shape)        # (0, 1]: keeps the log finite
    u2 = gen.random(shape)
    return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * math.pi * u2)


def _mc_block(cfg, h, gamma, seed_seq, n):
    gen = np.random.Generator(np.random.PCG64(seed_seq))
    g = _box_muller(gen, (cfg.L + 2, n))
    x0 = math.sqrt(cfg.sigma_s2) * g[0]
    noise = np.sqrt(cfg.sigma_n2)[:, None] * g[1:cfg.L + 1]
    w = math.sqrt(cfg.sigma_w2) * g[cfg.L + 1]
    z = h @ (x0[None, :] + noise) + w
    e2 = (x0 - gamma * z) ** 2
    return float(e2.sum()), float((e2 * e2).sum())


def simulate_uncoded(cfg: NetworkConfig, powers, n_samples: int = 1_000_000,
                     seed: int = 0, workers: int = 1) -> OracleResult:
    """Empirical MSE of amplify-and-forward with the LMMSE receiver.

    Samples are drawn in fixed-size blocks, each from its own PCG64 stream
    spawned from ``SeedSequence(seed)``; block sums are combined in block
    order, so the estimate is bit-identical for any ``workers``.
    """
    if n_samples < MIN_SAMPLES:
        raise ValueError(f"n_samples must be at least {MIN_SAMPLES}")
    p = np.asarray(powers, dtype=float)
    if p.shape != (cfg.L,) or np.any(p < 0):
        raise ValueError("powers must be L non-negative values")
    h = _forward_gains(cfg, p)
    gamma = lmmse_coefficient(cfg, p)
    sizes = [MC_BLOCK] * (n_samples // MC_BLOCK)
    if n_samples % MC_BLOCK:
        sizes.append(n_samples % MC_BLOCK)
    seeds = np.random.SeedSequence(seed).spawn(len(sizes))
    jobs = list(zip(seeds, sizes))
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(lambda job: _mc_block(cfg, h, gamma, *job), jobs))
    else:
        parts = [_mc_block(cfg, h, gamma, *job) for job in jobs]
    s1 = math.fsum(a for a, _ in parts)
    s2 = math.fsum(b for _, b in parts)
    mean = s1 / n_samples
    var = max(s2 / n_samples - mean * mean, 0.0) * n_samples / (n_samples - 1)
    se = math.sqrt(var / n_samples)
    return OracleResult(value=mean, uncertainty=max(se, np.finfo(float).tiny),
                        evaluations=n_samples, argmin=None,
                        extra={"gamma": gamma, "seed": seed, "blocks": len(sizes)})


# ---------------------------------------------------------------------------
# grid search

@dataclass(frozen=True)
class GridSpec:
    """Resolution of the brute-force search.

    ``rate_max`` defaults to ``max(4, 1.5 r_eq)`` bits, where ``r_eq`` is the
    common rate meeting the target exactly; power ranges come from a
    pre-pass (see ``grid_oracle``).  The coarse argmin is refined once on a
    ``refine``-times finer grid spanning its neighbouring cells.
    """

    n_rate: int = 41
    n_power: int = 81
    n_angle: int = 201
    n_bisect: int = 48
    refine: int = 10
    rate_max: Optional[float] = None
    power_max: Optional[float] = None

    def scaled(self, factor: float) -> "GridSpec":
        """Grid with every point count multiplied by ``factor`` (at least 3 points each)."""
        if not factor > 0:
            raise ValueError(f"budget factor must be positive, got {factor}")
        k = lambda n: max(3, int(round(n * factor)))
        return replace(self, n_rate=k(self.n_rate), n_power=k(self.n_power),
                       n_angle=k(self.n_angle), refine=max(2, int(round(self.refine * factor))))


def _params(cfg: NetworkConfig, D: float) -> tuple:
    return (cfg.sigma_s2, cfg.sigma_w2, float(cfg.g[0]), float(cfg.g[1]),
            float(cfg.sigma_n2[0]), float(cfg.sigma_n2[1]), D, REGION_TOL)


def equal_rate_for_target(cfg: NetworkConfig, D: float) -> float:
    """Common ``r`` at which the estimation distortion equals ``D``."""
    need = 1.0 / D - 1.0 / cfg.sigma_s2
    frac = need / float(np.sum(1.0 / cfg.sigma_n2))
    if frac >= 1.0:
        return math.inf
    return -0.5 * math.log2(1.0 - frac)


def _mixed_axis(lo, hi, n, depth=1e-8):
    """Linear and geometric points on ``[lo, hi]``.

    The geometric half resolves optima that hug zero, where the correlated
    sum-rate bound gains like the square root of the weaker input.
    """
    lin = np.linspace(lo, hi, n)
    geo = np.geomspace(max(lo, hi * depth), hi, n) if hi > 0 else lin
    pts = np.concatenate((lin, geo, [lo]))
    return np.unique(pts)


def _neighbourhood(axis, i, m, reach=1):
    """Refined axis spanning ``reach`` grid points either side of ``axis[i]``."""
    lo = axis[max(i - reach, 0)]
    hi = axis[min(i + reach, len(axis) - 1)]
    return _mixed_axis(lo, hi, m)


def _symmetric_power_bound(params, r1, r2, jscc, n_bisect):
    """Smallest ``p`` with ``(p, p)`` feasible at any of the given rate pairs."""
    hi = np.ones(r1.shape)
    for _ in range(80):
        ok = kernels.feasible_l2(params, r1, r2, hi, hi, jscc)
        if ok.all():
            break
        hi = np.where(ok, hi, 2.0 * hi)
    lo = np.zeros(r1.shape)
    for _ in range(n_bisect):
        mid = 0.5 * (lo + hi)
        ok = kernels.feasible_l2(params, r1, r2, mid, mid, jscc)
        hi = np.where(ok, mid, hi)
        lo = np.where(ok, lo, mid)
    return float(hi.min())


def _rate(q):
    """Rate whose quantizer keeps a fraction ``q = 1 - 2**(-2r)`` of the measurement."""
    return -0.5 * np.log2(1.0 - q)


def _coded_pass(params, tight, q1s, slacks, p1s, pmax, jscc, n_bisect):
    Q1, S, P1 = np.meshgrid(q1s, slacks, p1s, indexing="ij")
    Q2 = tight(Q1) + S
    ok = Q2 < 1.0
    Q2 = np.where(ok, Q2, 0.0)
    P2 = kernels.min_p2_l2(params, _rate(Q1), _rate(Q2), P1, pmax, jscc,
                           n_bisect).reshape(Q1.shape)
    tot = np.where(ok, P1 + P2, np.nan)
    if not np.isfinite(tot).any():
        return None
    k = np.unravel_index(np.nanargmin(tot), tot.shape)
    # spread over the neighbouring cells bounds what the resolution can hide
    sl = tuple(slice(max(i - 1, 0), i + 2) for i in k)
    spread = float(np.nanmax(tot[sl]) - tot[k])
    point = (float(Q1[k]), float(Q2[k]), float(P1[k]), float(P2[k]))
    return float(tot[k]), point, spread, Q1.size * (n_bisect + 2), k


def _coded_oracle(cfg: NetworkConfig, D: float, jscc: bool, grid: GridSpec) -> OracleResult:
    params = _params(cfg, D)
    r_eq = equal_rate_for_target(cfg, D)
    rmax = grid.rate_max or max(4.0, 1.5 * r_eq)
    # rates are gridded in q = 1 - 2**(-2r), in which the distortion is
    # linear; the second coordinate is the slack of q2 above the smallest
    # value meeting the target, so the search covers the whole feasible set
    # while crowding points onto the distortion boundary
    qmax = -math.expm1(-2.0 * math.log(2.0) * rmax)
    need = 1.0 / D - 1.0 / cfg.sigma_s2
    n1, n2 = float(cfg.sigma_n2[0]), float(cfg.sigma_n2[1])

    def tight(q1):
        return np.maximum(n2 * (need - q1 / n1), 0.0)

    q1_lo = max(0.0, n1 * (need - qmax / n2))
    if q1_lo >= qmax:
        raise NoFeasiblePoint(f"no rate pair on the grid reaches D={D:g}")
    # points cluster on both sides of the kink where sensor 1 alone meets the target
    kink = min(n1 * need, qmax)
    q1s = np.unique(np.concatenate((
        _mixed_axis(q1_lo, kink, grid.n_rate),
        kink + q1_lo - _mixed_axis(q1_lo, kink, grid.n_rate),
        _mixed_axis(kink, qmax, grid.n_rate))))
    slacks = _mixed_axis(0.0, qmax, grid.n_rate)
    Q1, S = np.meshgrid(q1s, slacks, indexing="ij")
    Q2 = tight(Q1) + S
    mask = Q2 <= qmax
    evals = 0
    if grid.power_max is None:
        # the optimum total is at most that of the best equal-power point,
        # so neither power can exceed twice that power
        p_sym = _symmetric_power_bound(params, _rate(Q1[mask]), _rate(Q2[mask]), jscc,
                                       grid.n_bisect)
        evals += int(mask.sum()) * (grid.n_bisect + 80)
        pmax = 2.0 * p_sym
    else:
        pmax = grid.power_max
    p1s = _mixed_axis(0.0, pmax, grid.n_power)
    coarse = _coded_pass(params, tight, q1s, slacks, p1s, pmax, jscc, grid.n_bisect)
    if coarse is None:
        raise NoFeasiblePoint(f"no grid point meets D={D:g} with powers up to {pmax:g}")
    evals += coarse[3]
    best = coarse
    if grid.refine > 1:
        m = 2 * grid.refine + 1
        i, j, k = coarse[4]
        # the best first power moves with the rates, so its window is wider
        fine = _coded_pass(params, tight, _neighbourhood(q1s, i, m),
                           _neighbourhood(slacks, j, m), _neighbourhood(p1s, k, 3 * m, reach=3),
                           pmax, jscc, grid.n_bisect)
        if fine is not None:
            evals += fine[3]
            if fine[0] <= best[0]:
                best = fine
    value, point, spread = best[:3]
    r = (float(_rate(point[0])), float(_rate(point[1])))
    return OracleResult(value=value, uncertainty=max(spread, 1e-12 * value, 1e-300),
                        evaluations=evals, argmin={"r": r, "powers": point[2:]},
                        extra={"rate_max": rmax, "power_max": pmax, "coarse": coarse[0]})


def _uncoded_direction_scan(cfg, D, n_angle, n_bisect):
    params = _params(cfg, D)
    theta = np.linspace(0.0, 0.5 * math.pi, n_angle)
    d1, d2 = np.cos(theta) ** 2, np.sin(theta) ** 2
    hi = np.ones(n_angle)
    for _ in range(200):
        ok = kernels.uncoded_mse_l2(params, hi * d1, hi * d2) <= D
        if ok.all() or hi.max() > 1e300:
            break
        hi = np.where(ok, hi, 2.0 * hi)
    reach = kernels.uncoded_mse_l2(params, hi * d1, hi * d2) <= D
    if not reach.any():
        return None
    lo = np.zeros(n_angle)
    for _ in range(n_bisect):
        mid = 0.5 * (lo + hi)
        ok = kernels.uncoded_mse_l2(params, mid * d1, mid * d2) <= D
        hi = np.where(ok, mid, hi)
        lo = np.where(ok, lo, mid)
    return float(hi[reach].min())


def _uncoded_pass(params, D, p1s, p2s):
    P1, P2 = np.meshgrid(p1s, p2s, indexing="ij")
    ok = kernels.uncoded_mse_l2(params, P1, P2) <= D
    tot = np.where(ok, P1 + P2, np.nan)
    if not ok.any():
        return None
    k = np.unravel_index(np.nanargmin(tot), tot.shape)
    sl = tuple(slice(max(i - 1, 0), i + 2) for i in k)
    spread = float(np.nanmax(tot[sl]) - tot[k])
    return float(tot[k]), (float(P1[k]), float(P2[k])), spread, P1.size, k


def _uncoded_oracle(cfg: NetworkConfig, D: float, grid: GridSpec) -> OracleResult:
    params = _params(cfg, D)
    n = 5 * grid.n_power
    if grid.power_max is None:
        top = _uncoded_direction_scan(cfg, D, grid.n_angle, grid.n_bisect)
        if top is None:
            raise NoFeasiblePoint(f"uncoded transmission cannot reach D={D:g}")
        evals = grid.n_angle * (grid.n_bisect + 200)
        pmax = top
    else:
        pmax, evals = grid.power_max, 0
    axis = _mixed_axis(0.0, pmax, n)
    coarse = _uncoded_pass(params, D, axis, axis)
    if coarse is None:
        raise NoFeasiblePoint(f"no grid point meets D={D:g} with powers up to {pmax:g}")
    evals += coarse[3]
    best = coarse
    if grid.refine > 1:
        m = 2 * grid.refine + 1
        i, j = coarse[4]
        fine = _uncoded_pass(params, D, _neighbourhood(axis, i, m), _neighbourhood(axis, j, m))
        if fine is not None:
            evals += fine[3]
            if fine[0] <= best[0]:
                best = fine
    value, point, spread = best[:3]
    return OracleResult(value=value, uncertainty=max(spread, 1e-12 * value, 1e-300),
                        evaluations=evals, argmin={"powers": point},
                        extra={"power_max": pmax, "coarse": coarse[0]})


def grid_oracle(cfg: NetworkConfig, target: DistortionLike, scheme,
                grid: Optional[GridSpec] = None) -> OracleResult:
    """Brute-force minimum total power of a two-sensor scheme.

    Separate and joint coding grid both rates and the first power; the
    second power is found by bisection, which is exact because every
    region inequality is monotone in it.  Time sharing needs no grid: the
    subset inequalities describe the union over all time-sharing factors.
    Uncoded transmission grids both powers directly.
    """
    if cfg.L != 2:
        raise ValueError("the grid oracle handles two sensors")
    grid = grid or GridSpec()
    D = as_distortion(target)
    scheme = Scheme(scheme)
    if D >= cfg.sigma_s2:
        return OracleResult(0.0, 1e-300, 0, {"powers": (0.0, 0.0)})
    if D <= min_distortion(cfg):
        raise NoFeasiblePoint(f"D={D:g} is not above d_min={min_distortion(cfg):g}")
    if scheme is Scheme.UNCODED:
        return _uncoded_oracle(cfg, D, grid)
    if scheme in (Scheme.SSCC, Scheme.JSCC):
        return _coded_oracle(cfg, D, scheme is Scheme.JSCC, grid)
    raise ValueError(f"no grid oracle for {scheme.value}")


# ---------------------------------------------------------------------------
# decoding orders

def permutation_oracle(cfg: NetworkConfig, R: Sequence[float]) -> OracleResult:
    """Cheapest vertex over all ``L!`` successive-decoding orders.

    ``argmin`` is the permutation (``pi``: last-decoded sensor first); ties
    resolve to the lexicographically first permutation.  ``extra`` carries
    the decode order and the total of every permutation.
    """
    if cfg.L > MAX_PERMUTATION_SENSORS:
        raise TooManySensors(f"L={cfg.L} exceeds {MAX_PERMUTATION_SENSORS} for exhaustive search")
    totals = {}
    for perm in itertools.permutations(range(cfg.L)):
        totals[perm] = vertex_power_allocation(cfg, R, perm).total_power
    best = min(totals, key=lambda p: totals[p])
    value = totals[best]
    ties = [p for p, v in totals.items() if math.isclose(v, value, rel_tol=1e-12)]
    return OracleResult(value=value, uncertainty=max(1e-12 * value, 1e-300),
                        evaluations=len(totals), argmin=best,
                        extra={"decode_order": best[::-1], "ties": ties, "totals": totals})
