"""Power minimization for separate, joint and uncoded transmission.

Two-sensor SSCC and JSCC are cast as signomial programs over

* ``P1, P2``   transmit powers,
* ``y1, y2``   quantizer excesses ``2**(2 r_i) - 1``,
* ``V1, V2``   channel-rate excesses ``2**(2 R_i) - 1`` (separate coding),

plus scheme-specific auxiliaries.  Every rate inequality is multiplied
through by ``prod(1 + y)`` and the common constant cancelled, which keeps
the programs well conditioned at low rates.  Uncoded transmission uses
``s_i = sqrt(P_i)`` so that the cross-correlation terms become monomials.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import minimize_scalar

from . import gaussian_info as gi
from . import _levels as lv
from .errors import Infeasible, InfeasibleSymmetric
from .gp_core import GpProblem, Monomial, Posynomial, leq, solve_signomial
from .model import (DistortionLike, NetworkConfig, Scheme, SchemeSolution, as_distortion,
                    min_distortion, validate_feasibility)

log = logging.getLogger(__name__)

DEFAULT_ALPHA_GRID = 21
#: relative margin used when building strictly feasible starting points
_START_MARGIN = lv.START_MARGIN


def _mono(name: str, exp: float = 1.0) -> Monomial:
    return Monomial(1.0, {name: exp})


def _check_two(cfg: NetworkConfig):
    if cfg.L != 2:
        raise ValueError(f"this solver handles two sensors, got L={cfg.L}")


def _screen(cfg: NetworkConfig, D: float) -> bool:
    """Raise on infeasible targets; return True when zero power suffices."""
    rep = validate_feasibility(cfg, D)
    if not rep.feasible:
        raise Infeasible(f"target D={D:g} is not above d_min = {rep.d_min:g}")
    return rep.degenerate


def _zero_solution(cfg: NetworkConfig, scheme: Scheme) -> SchemeSolution:
    L = cfg.L
    return SchemeSolution(scheme=scheme, powers=np.zeros(L), r=np.zeros(L), rates=np.zeros(L),
                          alpha=None, achieved_d=cfg.sigma_s2, total_power=0.0, converged=True,
                          iterations=0, status="degenerate")


# ---------------------------------------------------------------------------
# uncoded

def uncoded_mse(cfg: NetworkConfig, powers) -> float:
    """LMMSE distortion when each sensor sends a power-scaled copy of its measurement."""
    p = np.asarray(powers, dtype=float)
    if np.any(p < 0):
        raise ValueError("powers must be non-negative")
    s2, w2 = cfg.sigma_s2, cfg.sigma_w2
    n = cfg.sigma_n2
    x = p * cfg.g
    C = gi.measurement_correlation_matrix(cfg)
    sx = np.sqrt(x)
    num = float(np.sum(x * n / (s2 + n))) + w2
    den = float(sx @ C @ sx) + w2
    return s2 * num / den


def uncoded_limit_direction(cfg: NetworkConfig) -> np.ndarray:
    """Power direction whose high-power limit reaches the minimum distortion.

    With ``P_j`` proportional to ``(sigma_S^2 + sigma_Nj^2) / (g_j sigma_Nj^4)``
    the receiver sees the noise-weighted sum of measurements.
    """
    n = cfg.sigma_n2
    d = (cfg.sigma_s2 + n) / (cfg.g * n ** 2)
    return d / d.sum()


def uncoded_high_power_limit(cfg: NetworkConfig) -> float:
    """Distortion approached as powers grow without bound along the best direction."""
    dirn = uncoded_limit_direction(cfg)
    s2 = cfg.sigma_s2
    x = dirn * cfg.g
    C = gi.measurement_correlation_matrix(cfg)
    sx = np.sqrt(x)
    return s2 * float(np.sum(x * cfg.sigma_n2 / (s2 + cfg.sigma_n2))) / float(sx @ C @ sx)


def _uncoded_scale(cfg: NetworkConfig, D: float, dirn: np.ndarray) -> float:
    """Smallest ``k`` with ``uncoded_mse(k * dirn) <= D`` (closed form)."""
    s2, w2 = cfg.sigma_s2, cfg.sigma_w2
    x = dirn * cfg.g
    C = gi.measurement_correlation_matrix(cfg)
    sx = np.sqrt(x)
    A = float(np.sum(x * cfg.sigma_n2 / (s2 + cfg.sigma_n2)))
    B = float(sx @ C @ sx)
    den = D * B - s2 * A
    if den <= 0:
        return math.inf
    return w2 * (s2 - D) / den


def _uncoded_problem(cfg: NetworkConfig, D: float) -> GpProblem:
    """``uncoded_mse(s**2) <= D`` with each power term kept only on its net side."""
    L = cfg.L
    s2, w2 = cfg.sigma_s2, cfg.sigma_w2
    n, g = cfg.sigma_n2, cfg.g
    C = gi.measurement_correlation_matrix(cfg)
    s = [_mono(f"s{i}") for i in range(L)]
    lhs = [Monomial((s2 - D) * w2)]
    rhs = []
    for i in range(L):
        net = (s2 * n[i] / (s2 + n[i]) - D) * g[i]
        if net > 0:
            lhs.append(net * s[i] ** 2)
        elif net < 0:
            rhs.append(-net * s[i] ** 2)
        for j in range(i + 1, L):
            rhs.append(2.0 * D * C[i, j] * math.sqrt(g[i] * g[j]) * s[i] * s[j])
    obj = Posynomial([si ** 2 for si in s])
    return GpProblem(obj, [leq(Posynomial(lhs), Posynomial(rhs), "mse")],
                     tuple(f"s{i}" for i in range(L)))


def minimize_power_uncoded(cfg: NetworkConfig, target: DistortionLike,
                           tol: float = 1e-6) -> SchemeSolution:
    """Minimum total power of amplify-and-forward meeting ``uncoded_mse <= D``."""
    D = as_distortion(target)
    if _screen(cfg, D):
        return _zero_solution(cfg, Scheme.UNCODED)
    if uncoded_high_power_limit(cfg) >= D:
        raise Infeasible(f"uncoded transmission cannot reach D={D:g}: its infinite-power "
                         f"distortion is {uncoded_high_power_limit(cfg):g} "
                         f"(d_min = {min_distortion(cfg):g})")
    dirn = uncoded_limit_direction(cfg)
    k = _uncoded_scale(cfg, D, dirn)
    p0 = 10.0 * k * dirn
    prob = _uncoded_problem(cfg, D)
    init = {f"s{i}": math.sqrt(p0[i]) for i in range(cfg.L)}
    rep = solve_signomial(prob, init, tol=tol)
    p = np.array([rep.x_star[f"s{i}"] ** 2 for i in range(cfg.L)])
    return SchemeSolution(scheme=Scheme.UNCODED, powers=p, r=np.full(cfg.L, np.nan),
                          rates=np.full(cfg.L, np.nan), alpha=None,
                          achieved_d=uncoded_mse(cfg, p), total_power=float(p.sum()),
                          converged=rep.converged, iterations=rep.outer_iterations,
                          status=rep.status.value, diagnostics={"history": rep.history})


# ---------------------------------------------------------------------------
# shared two-sensor pieces

def _mac_power(cfg: NetworkConfig, i: Optional[int] = None):
    """``sigma_W^2 + g_i P_i`` (or the sum over both sensors when ``i`` is None)."""
    w2 = cfg.sigma_w2
    if i is None:
        return Monomial(w2) + cfg.g[0] * _mono("P0") + cfg.g[1] * _mono("P1")
    return Monomial(w2) + cfg.g[i] * _mono(f"P{i}")


def _snr(cfg: NetworkConfig, i: int) -> Monomial:
    """``X_i = g_i P_i / sigma_W^2``."""
    return (cfg.g[i] / cfg.sigma_w2) * _mono(f"P{i}")


def _r_from_y(x: dict, L: int) -> np.ndarray:
    return np.array([lv.rate_from_level(x[f"y{i}"]) for i in range(L)])


# ---------------------------------------------------------------------------
# SSCC

def _sscc_problem(cfg: NetworkConfig, D: float, alpha: float) -> GpProblem:
    """Separate coding with the MAC operating point fixed by time-sharing ``alpha``.

    With ``tau_i >= sigma_W^2 + g_i P_i`` the boundary point of the capacity
    pentagon is

        1+V1 = (1+X1)**a * ((1+X1+X2)/(1+X2))**(1-a)
        1+V2 = ((1+X1+X2)/(1+X1))**a * (1+X2)**(1-a)

    relaxed to ``<=``.  At ``a`` in ``{0, 1}`` the corner is written without
    the unit offsets.  The rates must dominate the Berger-Tung bounds.
    """
    w2 = cfg.sigma_w2
    V1, V2 = _mono("V0"), _mono("V1")
    X1, X2 = _snr(cfg, 0), _snr(cfg, 1)
    cons = [lv.distortion_constraint(cfg, D),
            lv.ceo_constraint(cfg, [0], V1), lv.ceo_constraint(cfg, [1], V2),
            lv.ceo_constraint(cfg, [0, 1], V1 + V2 + V1 * V2)]
    names = ["P0", "P1", "y0", "y1", "V0", "V1"]
    if alpha == 1.0:
        cons += [leq(V1, X1, "mac0"), leq(V2 + V2 * X1, X2, "mac1")]
    elif alpha == 0.0:
        cons += [leq(V1 + V1 * X2, X1, "mac0"), leq(V2, X2, "mac1")]
    else:
        t1, t2 = _mono("t0"), _mono("t1")
        tot = _mac_power(cfg)
        cons.append(leq((1 + V1) * (w2 ** alpha * t2 ** (1.0 - alpha)),
                        [(_mac_power(cfg, 0), alpha), (tot, 1.0 - alpha)], "mac0"))
        cons.append(leq((1 + V2) * (w2 ** (1.0 - alpha) * t1 ** alpha),
                        [(tot, alpha), (_mac_power(cfg, 1), 1.0 - alpha)], "mac1"))
        cons.append(leq(_mac_power(cfg, 0) / t1, 1.0, "tau0"))
        cons.append(leq(_mac_power(cfg, 1) / t2, 1.0, "tau1"))
        names += ["t0", "t1"]
    obj = _mono("P0") + _mono("P1")
    return GpProblem(obj, cons, tuple(names))


def _sscc_point(cfg: NetworkConfig, y, X: np.ndarray, alpha: float) -> dict:
    """Start with channel rates just inside the MAC boundary at powers ``sigma_W^2 X / g``."""
    w2 = cfg.sigma_w2
    P = w2 * X / cfg.g
    e1, e2 = w2 + cfg.g * P
    tot = w2 + float(cfg.g @ P)
    t1, t2 = e1 * (1 + 1e-6), e2 * (1 + 1e-6)
    V1 = math.expm1(alpha * math.log(e1 / w2) + (1 - alpha) * math.log(tot / t2))
    V2 = math.expm1(alpha * math.log(tot / t1) + (1 - alpha) * math.log(e2 / w2))
    y0, y1 = np.broadcast_to(np.asarray(y, dtype=float), (2,))
    x = {"P0": P[0], "P1": P[1], "y0": y0, "y1": y1,
         "V0": max(V1, 0.0) * (1 - 1e-6) + 1e-300, "V1": max(V2, 0.0) * (1 - 1e-6) + 1e-300}
    if 0.0 < alpha < 1.0:
        x["t0"], x["t1"] = t1, t2
    return x


def _scaled_start(prob: GpProblem, point, what: str) -> dict:
    """First power scale ``k = 2**j`` giving a strictly feasible point, then ``10 k``."""
    k = 1.0
    for _ in range(200):
        x = point(k)
        if prob.max_ratio(x) < 1.0:
            y = point(10.0 * k)
            return y if prob.max_ratio(y) < 1.0 else x
        k *= 2.0
    raise Infeasible(f"no feasible {what} starting point found")


def _sscc_start(cfg: NetworkConfig, D: float, alpha: float, prob: GpProblem) -> dict:
    # Berger-Tung requirements (as 2**(2R)) at equal quantizer rates, then the
    # two corner allocations delivering them; their alpha-mixture, scaled up,
    # reaches the alpha boundary point.
    y = lv.common_level(cfg, D)
    r = np.full(2, lv.rate_from_level(y))
    A1 = 2.0 ** (2.0 * gi.ceo_rate_lhs(cfg, r, [0]))
    A12 = 2.0 ** (2.0 * gi.ceo_rate_lhs(cfg, r, [0, 1]))
    Y1, Y2 = A1, A12 / A1
    v1 = np.array([Y1 - 1.0, Y1 * (Y2 - 1.0)])   # sensor 2 decoded first
    v0 = np.array([Y2 * (Y1 - 1.0), Y2 - 1.0])   # sensor 1 decoded first
    X = alpha * v1 + (1.0 - alpha) * v0
    return _scaled_start(prob, lambda k: _sscc_point(cfg, y, k * X, alpha), "SSCC")


def _sscc_warm_start(cfg: NetworkConfig, prob: GpProblem, alpha: float, prev: dict):
    """Reuse a neighbouring alpha's optimum, nudging powers up until strictly feasible."""
    X = cfg.g * np.array([prev["P0"], prev["P1"]]) / cfg.sigma_w2
    y = (prev["y0"], prev["y1"])
    k = 1.0 + 1e-6
    for _ in range(60):
        x = _sscc_point(cfg, y, k * X, alpha)
        if prob.max_ratio(x) < 1.0:
            return x
        k *= 1.25
    return None


def _solve_sscc_alpha(cfg: NetworkConfig, D: float, alpha: float, tol: float,
                      prev: Optional[dict] = None):
    prob = _sscc_problem(cfg, D, alpha)
    x0 = _sscc_warm_start(cfg, prob, alpha, prev) if prev is not None else None
    if x0 is None:
        x0 = _sscc_start(cfg, D, alpha, prob)
    rep = solve_signomial(prob, x0, tol=tol)
    return rep, prob


def minimize_power_sscc(cfg: NetworkConfig, target: DistortionLike,
                        alpha_grid: int = DEFAULT_ALPHA_GRID, refine: bool = True,
                        tol: float = 1e-6) -> SchemeSolution:
    """Two-sensor separate source/channel coding, best over the time-sharing factor.

    Each grid value of ``alpha`` gives one signomial program; the best grid
    point is refined by a bounded golden-section search.
    """
    _check_two(cfg)
    D = as_distortion(target)
    if _screen(cfg, D):
        return _zero_solution(cfg, Scheme.SSCC)
    cache = {}

    def total(alpha):
        alpha = float(min(max(alpha, 0.0), 1.0))
        if alpha not in cache:
            solved = [a for a in cache if cache[a][1] is not None]
            near = min(solved, key=lambda a: abs(a - alpha), default=None)
            prev = cache[near][1].x_star if near is not None else None
            try:
                rep, prob = _solve_sscc_alpha(cfg, D, alpha, tol, prev)
            except (ArithmeticError, Infeasible) as exc:
                # one time-sharing factor failing does not sink the scan
                log.warning("SSCC solve at alpha=%.6g failed: %s", alpha, exc)
                cache[alpha] = (math.inf, None, None)
            else:
                cache[alpha] = (rep.objective_value, rep, prob)
        return cache[alpha][0]

    alphas = np.linspace(0.0, 1.0, max(int(alpha_grid), 2))
    vals = [total(a) for a in alphas]
    k = int(np.argmin(vals))
    if refine and len(alphas) > 2:
        lo = alphas[max(k - 1, 0)]
        hi = alphas[min(k + 1, len(alphas) - 1)]
        res = minimize_scalar(total, bounds=(lo, hi), method="bounded",
                              options={"xatol": 1e-4, "maxiter": 12})
        total(res.x)
    best_alpha = min(cache, key=lambda a: cache[a][0])
    _, rep, prob = cache[best_alpha]
    if rep is None:
        raise Infeasible("separate coding failed at every time-sharing factor")
    x = rep.x_star
    p = np.array([x["P0"], x["P1"]])
    r = _r_from_y(x, 2)
    diag = {
        "history": rep.history,
        "alpha_scan": {float(a): cache[a][0] for a in sorted(cache)},
        "mac_tightness": [c.ratio(x) for c in prob.constraints if c.name in ("mac0", "mac1")],
    }
    return SchemeSolution(scheme=Scheme.SSCC, powers=p, r=r,
                          rates=np.array([lv.rate_from_level(x["V0"]),
                                          lv.rate_from_level(x["V1"])]),
                          alpha=best_alpha, achieved_d=gi.distortion_from_r(cfg, r),
                          total_power=float(p.sum()), converged=rep.converged,
                          iterations=rep.outer_iterations, status=rep.status.value,
                          diagnostics=diag)


# ---------------------------------------------------------------------------
# JSCC

def _jscc_problem(cfg: NetworkConfig, D: float, zero_rho: bool = False) -> GpProblem:
    """Joint coding over correlated MAC inputs.

    The individual bounds see ``V_i = X_i (1 - v)`` and the sum bound
    ``X1 + X2 + 2 w sqrt(X1 X2)``, where ``v >= rho~^2`` and ``w <= rho~``;
    both directions are conservative, so the relaxation is tight at the
    optimum.  With ``zero_rho`` the codeword correlation is ignored.
    """
    X1, X2 = _snr(cfg, 0), _snr(cfg, 1)
    cons = [lv.distortion_constraint(cfg, D)]
    names = ["P0", "P1", "y0", "y1"]
    need0, base0 = lv.ceo_parts(cfg, [0])
    need1, base1 = lv.ceo_parts(cfg, [1])
    need01, base01 = lv.ceo_parts(cfg, [0, 1])
    if zero_rho:
        cons.append(leq(need0, X1 * base0, "jscc0"))
        cons.append(leq(need1, X2 * base1, "jscc1"))
        cons.append(leq(need01, ((X1 + X2) * base01).simplify(), "jscc01"))
    else:
        v, w = _mono("v"), _mono("w")
        names += ["v", "w"]
        s1, s2 = lv.quality_weights(cfg)
        y1, y2 = _mono("y0"), _mono("y1")
        cons.append(leq(need0 + (X1 * v) * base0, X1 * base0, "jscc0"))
        cons.append(leq(need1 + (X2 * v) * base1, X2 * base1, "jscc1"))
        cons.append(leq(need01, ((X1 + X2 + 2.0 * w * X1 ** 0.5 * X2 ** 0.5) * base01)
                        .simplify(), "jscc01"))
        # rho~^2 = s1 s2 y1 y2 / ((1 + (1+s1) y1)(1 + (1+s2) y2))
        den = ((1 + (1 + s1) * y1) * (1 + (1 + s2) * y2)).simplify()
        cons.append(leq(s1 * s2 * y1 * y2, (v * den).simplify(), "v"))
        cons.append(leq((w ** 2 * den).simplify(), s1 * s2 * y1 * y2, "w"))
    obj = _mono("P0") + _mono("P1")
    return GpProblem(obj, cons, tuple(names))


def _jscc_start(cfg: NetworkConfig, D: float, prob: GpProblem, zero_rho: bool,
                y=None, direction=None) -> dict:
    """Feasible start at quantizer levels ``y`` and powers along ``direction``.

    Defaults to the common level meeting the target with margin and powers
    ``k sigma_W^2 / g``.
    """
    y = np.broadcast_to(np.asarray(lv.common_level(cfg, D) if y is None else y,
                                   dtype=float), (2,))
    r = np.array([lv.rate_from_level(yi) for yi in y])
    rho = gi.codeword_correlation(cfg, 0, 1, r[0], r[1])
    dirn = cfg.sigma_w2 / cfg.g if direction is None else np.asarray(direction, dtype=float)

    def point(k):
        P = k * dirn
        x = {"P0": P[0], "P1": P[1], "y0": y[0], "y1": y[1]}
        if not zero_rho:
            x["v"] = min(rho ** 2 * 1.01 + 1e-9, 0.5 * (1 + rho ** 2))
            x["w"] = max(rho * 0.99, 1e-12)
        return x

    return _scaled_start(prob, point, "JSCC")


def _separate_coding_seed(cfg: NetworkConfig, D: float):
    """Quantizer levels and power direction of the separate-coding optimum.

    Joint and separate coding share the distortion constraint, and in
    asymmetric networks the separate optimum lands in the right basin far
    more often than equal rates do.  Levels are pushed inward so the
    distortion constraint holds strictly.
    """
    from .ordering import minimize_power_sscc_vertex
    sol = minimize_power_sscc_vertex(cfg, D)
    y = lv.level_from_rate(sol.r) * (1.0 + _START_MARGIN) + 1e-9
    dirn = np.maximum(sol.powers, 1e-6 * sol.total_power)
    return y, dirn / dirn.sum()


def minimize_power_jscc(cfg: NetworkConfig, target: DistortionLike, tol: float = 1e-6,
                        zero_rho: bool = False, multistart: bool = True) -> SchemeSolution:
    """Two-sensor joint source/channel coding (correlated MAC inputs).

    The signomial program is not convex, so with ``multistart`` it runs from
    the equal-rate start and from the separate-coding optimum and keeps the
    cheaper result.  ``zero_rho`` is a diagnostic mode that drops the
    codeword correlation.
    """
    _check_two(cfg)
    D = as_distortion(target)
    if _screen(cfg, D):
        return _zero_solution(cfg, Scheme.JSCC)
    prob = _jscc_problem(cfg, D, zero_rho)
    starts = [_jscc_start(cfg, D, prob, zero_rho)]
    if multistart:
        try:
            y, dirn = _separate_coding_seed(cfg, D)
            starts.append(_jscc_start(cfg, D, prob, zero_rho, y=y, direction=dirn))
        except Infeasible as exc:
            log.debug("separate-coding seed unavailable: %s", exc)
    reports = [solve_signomial(prob, x0, tol=tol) for x0 in starts]
    rep = min(reports, key=lambda rp: rp.objective_value)
    x = rep.x_star
    p = np.array([x["P0"], x["P1"]])
    r = _r_from_y(x, 2)
    diag = {"history": rep.history, "start_values": [rp.objective_value for rp in reports]}
    if not zero_rho:
        diag["rho_tilde"] = gi.codeword_correlation(cfg, 0, 1, r[0], r[1])
        diag["v"], diag["w"] = x["v"], x["w"]
    return SchemeSolution(scheme=Scheme.JSCC, powers=p, r=r, rates=gi.quantizer_rates(cfg, r),
                          alpha=None, achieved_d=gi.distortion_from_r(cfg, r),
                          total_power=float(p.sum()), converged=rep.converged,
                          iterations=sum(rp.outer_iterations for rp in reports),
                          status=rep.status.value, diagnostics=diag)


# ---------------------------------------------------------------------------
# lower bound

def minimize_power_lower_bound(cfg: NetworkConfig, target: DistortionLike) -> SchemeSolution:
    """Data-processing lower bound on the total power of any scheme.

    The fusion center needs ``I(X_1..X_L; Z) >= 1/2 log(sigma_S^2 / D)`` and
    the MAC output power is at most ``u^T C u`` with ``u_i = sqrt(P_i g_i)``
    and ``C`` the measurement correlation matrix.  Minimizing ``sum u_i^2/g_i``
    subject to ``u^T C u >= sigma_W^2 (sigma_S^2/D - 1)`` is a Rayleigh
    quotient, solved by the top eigenvector of ``G^1/2 C G^1/2``.
    """
    D = as_distortion(target)
    if _screen(cfg, D):
        return _zero_solution(cfg, Scheme.LOWER_BOUND)
    need = cfg.sigma_w2 * (cfg.sigma_s2 / D - 1.0)
    sg = np.sqrt(cfg.g)
    M = sg[:, None] * gi.measurement_correlation_matrix(cfg) * sg[None, :]
    lam, vec = np.linalg.eigh(M)
    q = np.abs(vec[:, -1])
    total = need / lam[-1]
    p = total * q ** 2
    return SchemeSolution(scheme=Scheme.LOWER_BOUND, powers=p, r=np.full(cfg.L, np.nan),
                          rates=np.full(cfg.L, np.nan), alpha=None, achieved_d=D,
                          total_power=float(total), converged=True, status="closed_form")


SSCC_METHODS = ("alpha", "vertex")


def minimize_power(cfg: NetworkConfig, target: DistortionLike, scheme,
                   method: Optional[str] = None, **kw) -> SchemeSolution:
    """Dispatch on ``scheme``.

    Separate coding has two formulations: ``"alpha"`` (two sensors only)
    scans the time-sharing factor of the MAC boundary, ``"vertex"`` fixes
    the successive-decoding order to ascending gains and optimizes the
    rates directly.  They reach the same optimum; ``"alpha"`` is the
    default for two sensors, ``"vertex"`` otherwise.
    """
    scheme = Scheme(scheme)
    if scheme is Scheme.UNCODED:
        return minimize_power_uncoded(cfg, target, **kw)
    if scheme is Scheme.LOWER_BOUND:
        return minimize_power_lower_bound(cfg, target)
    if scheme is Scheme.JSCC:
        return minimize_power_jscc(cfg, target, **kw)
    method = method or ("alpha" if cfg.L == 2 else "vertex")
    if method not in SSCC_METHODS:
        raise ValueError(f"unknown SSCC method {method!r}; expected one of {SSCC_METHODS}")
    if method == "alpha":
        return minimize_power_sscc(cfg, target, **kw)
    from .ordering import minimize_power_sscc_vertex
    return minimize_power_sscc_vertex(cfg, target, **kw)


# ---------------------------------------------------------------------------
# symmetric networks

@dataclass(frozen=True)
class SymmetricPowers:
    """Per-sensor normalized powers ``P g / sigma_W^2`` in a symmetric network."""

    p_s: float
    p_j: float
    p_a: float
    p_lob: float
    L: int
    z: float
    rho_tilde: float
    q_tilde: float
    #: the alternative joint-coding expression with ``1 + (L - 1/L) rho~`` in
    #: the denominator; kept only for comparison, it disagrees with the
    #: codeword-variance derivation
    p_j_alt: float

    def totals(self) -> tuple:
        return tuple(self.L * p for p in (self.p_s, self.p_j, self.p_a, self.p_lob))

    def ordered(self) -> bool:
        return self.p_lob < self.p_a < self.p_j < self.p_s


def symmetric_lambda(L: int, sigma_s2: float, sigma_n2: float, D: float) -> float:
    return (sigma_n2 / L) * (1.0 / D - 1.0 / sigma_s2)


def symmetric_closed_forms(L: int, sigma_s2: float, sigma_n2: float, D: float) -> SymmetricPowers:
    """Closed-form per-sensor powers for ``L`` identical sensors.

    With ``a = sigma_S^2/D`` and ``z = 2**(2r) = 1/(1 - lambda)``::

        p_s   = -1/L + (a/L) z**L
        p_j   = p_s / (1 + (L-1) rho~),        rho~ = (a-1)/(L+a-1)
        p_a   = (a-1) / (L^2 rho - L (a-1)(1-rho)),  rho = sigma_S^2/(sigma_S^2+sigma_N^2)
        p_lob = (a-1) / (L + (L^2-L) rho)
    """
    if L < 1:
        raise ValueError("L must be positive")
    lam = symmetric_lambda(L, sigma_s2, sigma_n2, D)
    if not lam < 1.0:
        raise InfeasibleSymmetric(f"lambda = {lam:g} >= 1: the target is unreachable")
    a = sigma_s2 / D
    # z**L computed as exp(-L log1p(-lam)) to stay accurate for large L
    ln_zl = -L * math.log1p(-lam)
    zL = math.exp(ln_zl) if ln_zl < 709.0 else math.inf
    z = 1.0 / (1.0 - lam)
    p_s = (a * zL - 1.0) / L
    rho_t = (a - 1.0) / (L + a - 1.0)
    p_j = p_s / (1.0 + (L - 1) * rho_t)
    p_j_alt = p_s / (1.0 + (L - 1.0 / L) * rho_t)
    rho = sigma_s2 / (sigma_s2 + sigma_n2)
    one_minus_rho = sigma_n2 / (sigma_s2 + sigma_n2)
    p_a = (a - 1.0) / (L * L * rho - L * (a - 1.0) * one_minus_rho)
    # Q~ = 1 - (1 + sigma_N^2/sigma_S^2) rho~ cancels as rho~ -> 1; the identity
    # 2**(2r) = [Q~ (L + a - 1)/L]**-1 gives it without the subtraction, and
    # 1/Q~ - 1 = (a - 1)(1 + sigma_N^2/sigma_S^2) / (L (1 - lambda))
    q_t = L * (1.0 - lam) / (L + a - 1.0)
    p_a2 = (a - 1.0) * (1.0 + sigma_n2 / sigma_s2) / (L * L * (1.0 - lam))
    # both routes inherit the cancellation in 1 - lambda (conditioned like z),
    # and lambda itself carries the cancellation in 1/D - 1/sigma_S^2
    cond = z * (1.0 + lam * a / (a - 1.0)) if a > 1.0 else z
    if not math.isclose(p_a, p_a2, rel_tol=max(1e-12, 64 * 2.2e-16 * cond), abs_tol=1e-300) \
            and lam > 0:
        raise ArithmeticError(f"uncoded power routes disagree: {p_a} vs {p_a2}")
    p_lob = (a - 1.0) / (L + (L * L - L) * rho)
    return SymmetricPowers(p_s=p_s, p_j=p_j, p_a=p_a, p_lob=p_lob, L=L, z=z, rho_tilde=rho_t,
                           q_tilde=q_t, p_j_alt=p_j_alt)
