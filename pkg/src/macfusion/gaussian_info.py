"""Closed-form information quantities for the Gaussian CEO / MAC model.

All rates are in bits.  Sensors are indexed from 0.  Subsets are any
iterable of sensor indices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import (
    IndexOutOfRange,
    InconsistentDistortion,
    NegativeRate,
    OverlappingSets,
    SingularBlock,
    SingularCovariance,
    TooManySensors,
)
from .model import NetworkConfig, Scheme

CONSISTENCY_TOL = 1e-9
FEASIBILITY_TOL = 1e-9
COND_LIMIT = 1e12
MAX_ENUM_SENSORS = 20


def _check_index(cfg: NetworkConfig, *idx: int) -> None:
    for i in idx:
        if not (0 <= i < cfg.L):
            raise IndexOutOfRange(f"sensor index {i} outside 0..{cfg.L - 1}")


def _rates(r, L: Optional[int] = None) -> np.ndarray:
    r = np.atleast_1d(np.asarray(r, dtype=float))
    if np.any(r < 0):
        raise NegativeRate(f"rates must be non-negative, got {r}")
    if L is not None and r.shape[0] != L:
        raise ValueError(f"expected {L} rates, got {r.shape[0]}")
    return r


def _subset(S: Iterable[int], L: int) -> list:
    S = sorted(set(int(i) for i in S))
    for i in S:
        if not (0 <= i < L):
            raise IndexOutOfRange(f"sensor index {i} outside 0..{L - 1}")
    return S


def nonempty_subsets(L: int):
    """All nonempty subsets of ``range(L)`` as tuples, by bitmask order."""
    for mask in range(1, 1 << L):
        yield tuple(i for i in range(L) if mask >> i & 1)


# ---------------------------------------------------------------------------
# correlations and rate/distortion maps

def measurement_correlation(cfg: NetworkConfig, i: int, j: int) -> float:
    """Correlation coefficient between the measurements of sensors ``i`` and ``j``."""
    _check_index(cfg, i, j)
    if i == j:
        raise IndexOutOfRange("measurement_correlation needs two distinct sensors")
    s = cfg.sigma_s2
    ni, nj = cfg.noise_vars[i], cfg.noise_vars[j]
    return s / math.sqrt((s + ni) * (s + nj))


def measurement_correlation_matrix(cfg: NetworkConfig) -> np.ndarray:
    a = np.sqrt(cfg.sigma_s2 / (cfg.sigma_s2 + cfg.sigma_n2))
    rho = np.outer(a, a)
    np.fill_diagonal(rho, 1.0)
    return rho


def quantizer_rate_from_r(cfg: NetworkConfig, i: int, r_i: float) -> float:
    """Quantization rate of sensor ``i`` given its conditional rate ``r_i``."""
    _check_index(cfg, i)
    if r_i < 0:
        raise NegativeRate(f"r_i must be non-negative, got {r_i}")
    snr = cfg.sigma_s2 / cfg.noise_vars[i]
    return r_i + 0.5 * math.log1p(snr * -math.expm1(-2.0 * r_i * math.log(2.0))) / math.log(2.0)


def quantizer_rates(cfg: NetworkConfig, r) -> np.ndarray:
    r = _rates(r, cfg.L)
    return np.array([quantizer_rate_from_r(cfg, i, ri) for i, ri in enumerate(r)])


def _info_terms(cfg: NetworkConfig, r: np.ndarray) -> np.ndarray:
    # (1 - 2^{-2 r_k}) / sigma_Nk^2
    return -np.expm1(-2.0 * np.log(2.0) * r) / cfg.sigma_n2


def distortion_from_r(cfg: NetworkConfig, r) -> float:
    """MMSE of the source estimate from the quantized measurements."""
    r = _rates(r, cfg.L)
    return 1.0 / (1.0 / cfg.sigma_s2 + float(np.sum(_info_terms(cfg, r))))


def _q(cfg: NetworkConfig, i: int, r_i: float) -> float:
    return cfg.sigma_s2 / cfg.noise_vars[i] * -math.expm1(-2.0 * r_i * math.log(2.0))


def codeword_correlation(cfg: NetworkConfig, i: int, j: int, r_i: float, r_j: float) -> float:
    """Correlation between the codewords of sensors ``i`` and ``j``.

    Evaluated from the conditional rates directly and again through the
    quantization rates; the two routes must agree.
    """
    _check_index(cfg, i, j)
    if r_i < 0 or r_j < 0:
        raise NegativeRate("rates must be non-negative")
    if i == j:
        return 1.0
    qi, qj = _q(cfg, i, r_i), _q(cfg, j, r_j)
    direct = math.sqrt(qi * qj / ((1.0 + qi) * (1.0 + qj)))
    ri_t = quantizer_rate_from_r(cfg, i, r_i)
    rj_t = quantizer_rate_from_r(cfg, j, r_j)
    via_rates = measurement_correlation(cfg, i, j) * math.sqrt(
        -math.expm1(-2.0 * ri_t * math.log(2.0)) * -math.expm1(-2.0 * rj_t * math.log(2.0)))
    if abs(direct - via_rates) > 1e-12 * max(1.0, direct):
        raise ArithmeticError(f"codeword correlation routes disagree: {direct} vs {via_rates}")
    return direct


def codeword_correlation_matrix(cfg: NetworkConfig, r) -> np.ndarray:
    r = _rates(r, cfg.L)
    q = cfg.sigma_s2 / cfg.sigma_n2 * -np.expm1(-2.0 * np.log(2.0) * r)
    a = np.sqrt(q / (1.0 + q))
    rt = np.outer(a, a)
    np.fill_diagonal(rt, 1.0)
    return rt


@dataclass(frozen=True)
class CovarianceModel:
    """Measurement and codeword correlations plus the transmit covariance."""

    rho: np.ndarray
    rho_tilde: np.ndarray
    sigma_u: np.ndarray


def covariance_model(cfg: NetworkConfig, r, powers) -> CovarianceModel:
    p = np.asarray(powers, dtype=float)
    rt = codeword_correlation_matrix(cfg, r)
    sp = np.sqrt(p)
    return CovarianceModel(rho=measurement_correlation_matrix(cfg), rho_tilde=rt,
                           sigma_u=rt * np.outer(sp, sp))


# ---------------------------------------------------------------------------
# rate-region predicates

def ceo_rate_lhs(cfg: NetworkConfig, r, S: Iterable[int], d_e: Optional[float] = None,
                 override: bool = False) -> float:
    """Rate that subset ``S`` must deliver for the CEO reconstruction.

    ``d_e`` defaults to the distortion implied by ``r``.  A supplied value
    must agree with it unless ``override`` is set.
    """
    r = _rates(r, cfg.L)
    S = _subset(S, cfg.L)
    implied = distortion_from_r(cfg, r)
    if d_e is None:
        d_e = implied
    elif not override and abs(d_e - implied) > CONSISTENCY_TOL:
        raise InconsistentDistortion(f"d_e={d_e} but rates imply {implied}")
    if not S:
        return 0.0
    t = _info_terms(cfg, r)
    mask = np.ones(cfg.L, dtype=bool)
    mask[S] = False
    inner = d_e / cfg.sigma_s2 + d_e * float(np.sum(t[mask]))
    return -0.5 * math.log2(inner) + float(np.sum(r[S]))


def conditional_covariance(sigma_u, S: Iterable[int]) -> np.ndarray:
    """Covariance of the ``S`` block given the complementary block (Schur complement)."""
    sigma_u = np.asarray(sigma_u, dtype=float)
    L = sigma_u.shape[0]
    S = _subset(S, L)
    Sc = [i for i in range(L) if i not in S]
    block = sigma_u[np.ix_(S, S)]
    if not Sc:
        return block.copy()
    cc = sigma_u[np.ix_(Sc, Sc)]
    u, s, vt = np.linalg.svd(cc)
    if s[0] == 0.0 or s[0] / s[-1] > COND_LIMIT:
        raise SingularBlock(f"conditioning block is numerically singular (sv={s})")
    cross = sigma_u[np.ix_(S, Sc)]
    # cc^{-1} via the SVD already computed
    inv_cross_t = vt.T @ ((u.T @ cross.T) / s[:, None])
    q = block - cross @ inv_cross_t
    return 0.5 * (q + q.T)


def mac_rhs_independent(cfg: NetworkConfig, powers, S: Iterable[int]) -> float:
    """Sum-rate bound of subset ``S`` on a MAC with independent inputs."""
    p = np.asarray(powers, dtype=float)
    S = _subset(S, cfg.L)
    if not S:
        return 0.0
    return 0.5 * math.log1p(float(np.sum(p[S] * cfg.g[S])) / cfg.sigma_w2) / math.log(2.0)


def mac_rhs_correlated(cfg: NetworkConfig, powers, r, S: Iterable[int]) -> float:
    """``I[U(S); Z | U(S^c)]`` for codewords correlated per the test channel.

    The Schur complement is taken on the codeword correlation matrix and
    rescaled by the powers, so sensors with zero power are handled exactly.
    """
    p = np.asarray(powers, dtype=float)
    if np.any(p < 0):
        raise ValueError("powers must be non-negative")
    S = _subset(S, cfg.L)
    if not S:
        return 0.0
    rt = codeword_correlation_matrix(cfg, r)
    qc = conditional_covariance(rt, S)
    a = np.sqrt(p[S] * cfg.g[S])
    quad = float(a @ qc @ a)
    return 0.5 * math.log1p(max(quad, 0.0) / cfg.sigma_w2) / math.log(2.0)


@dataclass(frozen=True)
class FeasibilityVerdict:
    feasible: bool
    worst_subset: Optional[tuple]
    worst_violation: float
    achieved_d: float
    distortion_ok: bool
    margins: dict

    def __bool__(self):
        return self.feasible


def check_feasible(cfg: NetworkConfig, powers, r, target_d: float, scheme) -> FeasibilityVerdict:
    """Check every subset inequality of the scheme's rate region plus the distortion target.

    ``margins`` maps each nonempty subset to ``LHS - RHS`` in bits; the
    verdict tolerates violations up to ``FEASIBILITY_TOL``.
    """
    scheme = Scheme(scheme)
    if scheme not in (Scheme.SSCC, Scheme.JSCC):
        raise ValueError("check_feasible handles SSCC and JSCC only")
    if cfg.L > MAX_ENUM_SENSORS:
        raise TooManySensors(f"L={cfg.L} exceeds {MAX_ENUM_SENSORS}")
    r = _rates(r, cfg.L)
    p = np.asarray(powers, dtype=float)
    d_e = distortion_from_r(cfg, r)
    margins = {}
    rt = codeword_correlation_matrix(cfg, r) if scheme is Scheme.JSCC else None
    for S in nonempty_subsets(cfg.L):
        lhs = ceo_rate_lhs(cfg, r, S, d_e)
        if scheme is Scheme.SSCC:
            rhs = mac_rhs_independent(cfg, p, S)
        else:
            qc = conditional_covariance(rt, S)
            a = np.sqrt(p[list(S)] * cfg.g[list(S)])
            rhs = 0.5 * math.log1p(max(float(a @ qc @ a), 0.0) / cfg.sigma_w2) / math.log(2.0)
        margins[S] = lhs - rhs
    worst = max(margins, key=margins.get)
    d_ok = d_e <= target_d * (1.0 + CONSISTENCY_TOL)
    worst_v = margins[worst]
    feasible = d_ok and worst_v <= FEASIBILITY_TOL
    return FeasibilityVerdict(feasible=feasible,
                              worst_subset=worst if worst_v > FEASIBILITY_TOL else None,
                              worst_violation=worst_v, achieved_d=d_e,
                              distortion_ok=d_ok, margins=margins)


# ---------------------------------------------------------------------------
# generic Gaussian mutual information

def _logdet(cov: np.ndarray, idx: Sequence[int]) -> float:
    if not idx:
        return 0.0
    sub = cov[np.ix_(idx, idx)]
    sign, ld = np.linalg.slogdet(sub)
    if sign <= 0 or not np.isfinite(ld):
        raise SingularCovariance(f"covariance block {list(idx)} is singular")
    return ld


def gaussian_mutual_information(cov, A: Iterable[int], B: Iterable[int],
                                given: Iterable[int] = ()) -> float:
    """``I(A; B | given)`` in bits for jointly Gaussian variables with covariance ``cov``."""
    cov = np.asarray(cov, dtype=float)
    A, B, C = list(A), list(B), list(given)
    if set(A) & set(B) or set(A) & set(C) or set(B) & set(C):
        raise OverlappingSets("index sets must be disjoint")
    if not A or not B:
        return 0.0
    nats = 0.5 * (_logdet(cov, A + C) + _logdet(cov, B + C)
                  - _logdet(cov, A + B + C) - _logdet(cov, C))
    return max(nats, 0.0) / math.log(2.0)


@dataclass(frozen=True)
class JointGaussianModel:
    """Joint covariance of source, measurements, codewords and the received signal.

    Codewords are stored scaled to unit test-channel noise
    (``a_j (X_j + V_j)``), which leaves every information quantity
    unchanged and stays finite at zero rate.
    """

    cov: np.ndarray
    x0: int
    x: tuple
    u: tuple
    z: int


def joint_test_channel(cfg: NetworkConfig, r, powers=None) -> JointGaussianModel:
    """Build ``(X0, X_1..X_L, U_1..U_L, Z)`` with ``U_j = X0 + N_j + V_j``.

    ``V_j`` has variance ``sigma_Nj^2 / (2^{2 r_j} - 1)`` so that
    ``I(X_j; U_j | X0) = r_j``.  ``Z`` is the received superposition of the
    power-scaled codewords.
    """
    L = cfg.L
    r = _rates(r, L)
    p = np.ones(L) if powers is None else np.asarray(powers, dtype=float)
    # independent generators: X0, N_1..N_L, V'_1..V'_L (unit), W
    n_gen = 1 + 2 * L + 1
    n_var = 1 + 2 * L + 1
    M = np.zeros((n_var, n_gen))
    var = np.empty(n_gen)
    var[0] = cfg.sigma_s2
    var[1:1 + L] = cfg.sigma_n2
    var[1 + L:1 + 2 * L] = 1.0
    var[-1] = cfg.sigma_w2
    a = np.sqrt(np.expm1(2.0 * np.log(2.0) * r) / cfg.sigma_n2)
    for j in range(L):
        M[0, 0] = 1.0
        M[1 + j, 0] = 1.0
        M[1 + j, 1 + j] = 1.0
        M[1 + L + j, 0] = a[j]
        M[1 + L + j, 1 + j] = a[j]
        M[1 + L + j, 1 + L + j] = 1.0
    cov = M @ np.diag(var) @ M.T
    var_u = cov[1 + L + np.arange(L), 1 + L + np.arange(L)]
    scale = np.sqrt(p * cfg.g / var_u)
    M[-1] = scale @ M[1 + L:1 + 2 * L]
    M[-1, -1] = 1.0
    cov = M @ np.diag(var) @ M.T
    return JointGaussianModel(cov=cov, x0=0, x=tuple(range(1, 1 + L)),
                            u=tuple(range(1 + L, 1 + 2 * L)), z=1 + 2 * L)


def lhs_via_mutual_information(cfg: NetworkConfig, r, S: Iterable[int]) -> float:
    """``I[U(S); X0 | U(S^c)] + sum_{i in S} I[U_i; X_i | X0]`` from determinants."""
    m = joint_test_channel(cfg, r)
    S = _subset(S, cfg.L)
    Sc = [i for i in range(cfg.L) if i not in S]
    us = [m.u[i] for i in S]
    usc = [m.u[i] for i in Sc]
    total = gaussian_mutual_information(m.cov, us, [m.x0], usc)
    for i in S:
        total += gaussian_mutual_information(m.cov, [m.u[i]], [m.x[i]], [m.x0])
    return total


def rhs_via_mutual_information(cfg: NetworkConfig, powers, r, S: Iterable[int]) -> float:
    """``I[U(S); Z | U(S^c)]`` from determinants of the joint covariance."""
    m = joint_test_channel(cfg, r, powers)
    S = _subset(S, cfg.L)
    Sc = [i for i in range(cfg.L) if i not in S]
    return gaussian_mutual_information(m.cov, [m.u[i] for i in S], [m.z],
                                       [m.u[i] for i in Sc])
