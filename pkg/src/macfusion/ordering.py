"""Decoding orders and vertex power allocations.

For separate coding the power region for fixed rates is a
contra-polymatroid; its cheapest vertex serves sensors in ascending order
of channel gain, i.e. the receiver cancels the strongest sensor first.
For two-sensor joint coding the analogous result decodes the stronger
sensor first, with the weaker sensor's own bound and the sum bound active.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import _levels as lv
from . import gaussian_info as gi
from .errors import DegenerateRates, Infeasible
from .gp_core import GpProblem, Posynomial, solve_signomial
from .model import (DistortionLike, NetworkConfig, Scheme, SchemeSolution, as_distortion,
                    min_distortion, validate_feasibility)


@dataclass
class OrderSolution:
    permutation: tuple          # pi*: sensors by ascending gain
    decode_order: tuple         # reversed pi*: first decoded first
    powers: np.ndarray
    total_power: float
    active_constraints: tuple = ()
    diagnostics: dict = field(default_factory=dict)


def optimal_channel_decoding_order(cfg: NetworkConfig) -> list:
    """Sensors by descending channel gain, ties broken by ascending index.

    The measurement noise plays no role.
    """
    return sorted(range(cfg.L), key=lambda i: (-cfg.gains[i], i))


def optimal_permutation(cfg: NetworkConfig) -> list:
    """``pi*``: the reverse of the decoding order (ascending gains)."""
    return optimal_channel_decoding_order(cfg)[::-1]


def rate_set_function(R: Sequence[float], S) -> float:
    """``f(S) = prod_{i in S} 2**(2 R_i) - 1``: the power (over sigma_W^2) set ``S`` must receive."""
    R = np.asarray(R, dtype=float)
    idx = list(S)
    if not idx:
        return 0.0
    return float(np.expm1(2.0 * math.log(2.0) * R[idx].sum()))


def vertex_power_allocation(cfg: NetworkConfig, R: Sequence[float],
                            permutation: Optional[Sequence[int]] = None) -> OrderSolution:
    """Vertex of the power contra-polymatroid generated by ``permutation``.

    ``X_{pi(i)} = F_i - F_{i-1}`` with ``F_i = prod_{j<=i} 2**(2 R_{pi(j)})``
    and ``P = sigma_W^2 X / g``.  Defaults to the optimal ``pi*``.
    """
    R = np.asarray(R, dtype=float)
    if R.shape != (cfg.L,):
        raise ValueError(f"expected {cfg.L} rates")
    if np.any(R < 0):
        raise ValueError("rates must be non-negative")
    perm = list(optimal_permutation(cfg) if permutation is None else permutation)
    if sorted(perm) != list(range(cfg.L)):
        raise ValueError(f"not a permutation of 0..{cfg.L - 1}: {perm}")
    cum = np.concatenate(([0.0], np.cumsum(2.0 * R[perm])))
    F = np.exp(math.log(2.0) * cum)
    X = np.zeros(cfg.L)
    X[perm] = np.diff(F)
    P = cfg.sigma_w2 * X / cfg.g
    chain = tuple(tuple(sorted(perm[:i + 1])) for i in range(cfg.L))
    return OrderSolution(permutation=tuple(perm), decode_order=tuple(perm[::-1]), powers=P,
                         total_power=float(P.sum()), active_constraints=chain)


def vertex_total(cfg: NetworkConfig, R: Sequence[float], permutation: Sequence[int]) -> float:
    """Total power of a vertex written over the nested chain::

        sigma_W^2 [ sum_{i<L} (1/g_pi(i) - 1/g_pi(i+1)) f(chain_i) + f(chain_L)/g_pi(L) ]
    """
    perm = list(permutation)
    g = cfg.g[perm]
    total = 0.0
    for i in range(cfg.L):
        w = 1.0 / g[i] - (1.0 / g[i + 1] if i + 1 < cfg.L else 0.0)
        total += w * rate_set_function(R, perm[:i + 1])
    return cfg.sigma_w2 * total


def contra_polymatroid_slack(cfg: NetworkConfig, R: Sequence[float], powers) -> dict:
    """``sum_{S} X_i - f(S)`` for every nonempty ``S``; all must be >= 0."""
    X = np.asarray(powers, dtype=float) * cfg.g / cfg.sigma_w2
    return {S: float(X[list(S)].sum()) - rate_set_function(R, S)
            for S in gi.nonempty_subsets(cfg.L)}


# ---------------------------------------------------------------------------
# two-sensor joint coding

def jscc_eigen(g1: float, g2: float, rho_tilde: float) -> dict:
    """Eigen-structure of ``A = [[g1, r sqrt(g1 g2)], [r sqrt(g1 g2), g2]]``.

    Eigenvector magnitudes follow from ``|lambda I - A| = 0``.  With
    ``den = lambda1 - lambda2 = sqrt((g1 - g2)^2 + 4 g1 g2 r^2)`` the
    radicands are ``lambda1 - g2 = g1 - lambda2`` and ``lambda1 - g1 =
    g2 - lambda2``; the smaller of the two is evaluated in conjugate form so
    that nothing cancels as ``r -> 0``.
    """
    d = g1 - g2
    c2 = 4.0 * g1 * g2 * rho_tilde ** 2
    den = math.sqrt(d * d + c2)
    if d >= 0.0:
        big = 0.5 * (den + d)                                 # lambda1 - g2
        small = 0.5 * c2 / (den + d) if den + d > 0 else 0.0  # lambda1 - g1
    else:
        small = 0.5 * (den - d)
        big = 0.5 * c2 / (den - d)
    lam1, lam2 = g1 + small, g2 - small
    if den == 0.0:
        q = np.eye(2)
    else:
        a, b = math.sqrt(big / den), math.sqrt(small / den)
        q = np.array([[a, -b], [b, a]])
    A = np.array([[g1, rho_tilde * math.sqrt(g1 * g2)], [rho_tilde * math.sqrt(g1 * g2), g2]])
    return {"A": A, "lambda": (lam1, lam2), "Q": q}


def jscc_bounds(cfg: NetworkConfig, r_tilde: Sequence[float], rho_tilde: float):
    """``(b1, b2, b3, Z)``: individual power floors, sum bound and ``Z_i``."""
    Rt = np.asarray(r_tilde, dtype=float)
    one = 1.0 - rho_tilde ** 2
    Z = np.exp(2.0 * math.log(2.0) * Rt) * one
    w2 = cfg.sigma_w2
    b = (Z - 1.0) * w2 / (one * cfg.g)
    b3 = w2 * (Z[0] * Z[1] / one - 1.0)
    return b[0], b[1], b3, Z


def _received(cfg: NetworkConfig, rho_tilde: float, P) -> float:
    g1, g2 = cfg.g
    return g1 * P[0] + g2 * P[1] + 2.0 * rho_tilde * math.sqrt(g1 * g2 * P[0] * P[1])


def _solve_on_floor(g_strong: float, g_weak: float, rho_tilde: float, p_weak: float,
                    b3: float) -> float:
    """Power of the strong sensor putting the received power exactly on ``b3``."""
    # g_s x^2 + 2 r sqrt(g_s g_w p_w) x + (g_w p_w - b3) = 0 with x = sqrt(P_s)
    bq = rho_tilde * math.sqrt(g_strong * g_weak * p_weak)
    c = g_weak * p_weak - b3
    if c >= 0.0:
        return 0.0
    x = (-bq + math.sqrt(bq * bq - g_strong * c)) / g_strong
    return x * x


def _jscc_candidates(cfg: NetworkConfig, floors, b3: float, rho_tilde: float, eig: dict) -> dict:
    """Every KKT candidate of ``min P1 + P2`` with the sum bound ``b3`` active.

    The floor corner lies inside the ellipse, so ``b3`` is always tight; the
    minimum then sits either on one floor or at the top-eigenvector point of
    ``A`` (no floor tight).  Candidates that violate a floor are dropped.
    """
    g = cfg.g
    out = {}
    lam1 = eig["lambda"][0]
    v = np.abs(eig["Q"][:, 0])
    P = v * v * b3 / lam1
    if P[0] >= floors[0] and P[1] >= floors[1]:
        out[("b3",)] = P
    for k, name in ((0, "b1"), (1, "b2")):
        other = 1 - k
        P = np.zeros(2)
        P[k] = floors[k]
        P[other] = max(floors[other], _solve_on_floor(g[other], g[k], rho_tilde, floors[k], b3))
        out[(name, "b3")] = P
    return out


def jscc_two_sensor_order(cfg: NetworkConfig, r_tilde: Sequence[float],
                          rho_tilde: float) -> OrderSolution:
    """Minimum ``P1 + P2`` for given quantizer rates under correlated MAC inputs.

    The sum bound ``b3`` is always tight.  Usually the weaker sensor also sits
    on its floor and the stronger one closes the sum constraint, but when the
    top eigenvector of ``A`` already clears both floors that point is
    cheaper (and with very unequal rates the strong floor can bind instead);
    all three candidates are evaluated in closed form.  The stronger sensor
    is decoded first.  ``active_constraints`` lists the tight inequalities.
    """
    if cfg.L != 2:
        raise ValueError("two sensors required")
    if not 0.0 <= rho_tilde < 1.0:
        raise ValueError("rho_tilde must lie in [0, 1)")
    b1, b2, b3, Z = jscc_bounds(cfg, r_tilde, rho_tilde)
    if np.any(Z <= 1.0):
        raise DegenerateRates(f"Z = {Z.tolist()} must exceed 1")
    g1, g2 = cfg.g
    strong = 0 if g1 >= g2 else 1
    weak = 1 - strong
    eig = jscc_eigen(g1, g2, rho_tilde)
    cands = _jscc_candidates(cfg, (b1, b2), b3, rho_tilde, eig)
    pattern = min(cands, key=lambda k: cands[k].sum())
    P = cands[pattern]
    sb = np.sqrt([b1, b2])
    inside = float(sb @ eig["A"] @ sb) - b3
    identity = -cfg.sigma_w2 / (1.0 - rho_tilde ** 2) * (
        math.sqrt((Z[0] - 1.0) * (Z[1] - 1.0)) - rho_tilde) ** 2
    return OrderSolution(
        permutation=(weak, strong), decode_order=(strong, weak), powers=P,
        total_power=float(P.sum()), active_constraints=pattern,
        diagnostics={"b": (b1, b2, b3), "Z": tuple(Z), "inside_margin": inside,
                     "inside_identity": identity, "eigen": eig,
                     "candidates": {k: float(v.sum()) for k, v in cands.items()},
                     "slack_strong": P[strong] - (b1, b2)[strong]})


def jscc_information_rates(cfg: NetworkConfig, powers, rho_tilde: float) -> dict:
    """``I(U1;Z)``, ``I(U2;Z,U1)`` (and the mirrored pair) in bits for unit-variance codewords."""
    P = np.asarray(powers, dtype=float)
    g = cfg.g
    a = np.sqrt(P * g)
    C = np.array([[1.0, rho_tilde], [rho_tilde, 1.0]])
    cov = np.zeros((3, 3))
    cov[:2, :2] = C
    cov[:2, 2] = C @ a
    cov[2, :2] = C @ a
    cov[2, 2] = float(a @ C @ a) + cfg.sigma_w2
    mi = gi.gaussian_mutual_information
    return {
        "I(U1;Z)": mi(cov, [0], [2]),
        "I(U2;Z,U1)": mi(cov, [1], [2, 0]),
        "I(U2;Z)": mi(cov, [1], [2]),
        "I(U1;Z,U2)": mi(cov, [0], [2, 1]),
    }


# ---------------------------------------------------------------------------
# general-L separate coding over the optimal vertex

def _sscc_vertex_problem(cfg: NetworkConfig, D: float, perm: Sequence[int]) -> GpProblem:
    """Signomial program over quantizer excesses ``y`` and channel excesses ``V``.

    Berger-Tung constraints hold for every nonempty ``S`` with
    ``V_S = prod_S (1 + V_i) - 1``; the objective is the vertex cost
    ``sigma_W^2 sum_i V_pi(i) prod_{j<i} (1 + V_pi(j)) / g_pi(i)``.
    """
    L = cfg.L
    cons = [lv.distortion_constraint(cfg, D)]
    for S in gi.nonempty_subsets(L):
        VS = lv.excess_product([f"V{i}" for i in S])
        cons.append(lv.ceo_constraint(cfg, S, VS))
    terms = []
    done = []
    for i in perm:
        head = lv.mono(f"V{i}") * (cfg.sigma_w2 / cfg.g[i])
        terms.append(head * lv.one_plus_product(done) if done else Posynomial([head]))
        done.append(f"V{i}")
    obj = terms[0]
    for t in terms[1:]:
        obj = obj + t
    names = [f"y{i}" for i in range(L)] + [f"V{i}" for i in range(L)]
    return GpProblem(obj.simplify(), cons, tuple(names))


def minimize_power_sscc_vertex(cfg: NetworkConfig, target: DistortionLike, tol: float = 1e-6,
                               permutation: Optional[Sequence[int]] = None,
                               **_ignored) -> SchemeSolution:
    """Separate coding for any ``L``: minimize the ``pi*`` vertex cost over the rates."""
    D = as_distortion(target)
    rep = validate_feasibility(cfg, D)
    if not rep.feasible:
        raise Infeasible(f"target D={D:g} is not above d_min = {rep.d_min:g}")
    L = cfg.L
    if rep.degenerate:
        return SchemeSolution(scheme=Scheme.SSCC, powers=np.zeros(L), r=np.zeros(L),
                              rates=np.zeros(L), alpha=None, achieved_d=cfg.sigma_s2,
                              total_power=0.0, converged=True, status="degenerate")
    perm = list(optimal_permutation(cfg) if permutation is None else permutation)
    prob = _sscc_vertex_problem(cfg, D, perm)
    # start: equal test channels inside the target, every sensor granted the full sum rate
    d_in = D - lv.START_MARGIN * (D - min_distortion(cfg))
    yc = lv.common_level(cfg, D)
    Vc = (1.0 + yc) * cfg.sigma_s2 / d_in * 1.01 - 1.0
    x0 = {f"y{i}": yc for i in range(L)}
    x0.update({f"V{i}": Vc for i in range(L)})
    sol = solve_signomial(prob, x0, tol=tol)
    x = sol.x_star
    r = np.array([lv.rate_from_level(x[f"y{i}"]) for i in range(L)])
    R = np.array([lv.rate_from_level(x[f"V{i}"]) for i in range(L)])
    vert = vertex_power_allocation(cfg, R, perm)
    return SchemeSolution(scheme=Scheme.SSCC, powers=vert.powers, r=r, rates=R, alpha=None,
                          achieved_d=gi.distortion_from_r(cfg, r),
                          total_power=float(sol.objective_value),
                          converged=sol.converged, iterations=sol.outer_iterations,
                          status=sol.status.value,
                          diagnostics={"history": sol.history, "permutation": tuple(perm),
                                       "vertex_total": vert.total_power})
