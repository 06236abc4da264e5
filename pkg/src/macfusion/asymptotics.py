"""Large-network and high-SNR behaviour of the symmetric closed forms."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import InvalidDistortion, InvalidExponent
from .schemes import symmetric_closed_forms

DEFAULT_NOISE_LEVELS = (1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8)


@dataclass(frozen=True)
class AsymptoticReport:
    """Limits of ``L g P/sigma_W^2`` (``limit_s``, ``limit_j``), ``L^2 g P/sigma_W^2``
    (``limit_a``, ``limit_lob``) and the high-SNR ratios ``(P g/sigma_W^2)/(sigma_S^2/D)``."""

    limit_s: Optional[float]
    limit_j: Optional[float]
    limit_a: Optional[float]
    limit_lob: Optional[float]
    lambda_star: float
    gamma_star: float
    ratio_s: float
    ratio_j: float
    ratio_a: float
    eta: float = 1.0


def _check_d(sigma_s2: float, D: float):
    if not (0.0 < D < sigma_s2):
        raise InvalidDistortion(f"D must lie in (0, sigma_S^2={sigma_s2:g}), got {D:g}")


def large_l_limits(sigma_s2: float, sigma_n2: float, D: float) -> tuple:
    """``(limit_s, limit_j, limit_a)`` as the number of sensors grows.

    With ``c = sigma_N^2 (1/D - 1/sigma_S^2)`` the symmetric test channel
    has ``z**L = (1 - c/L)**(-L)``, whose limit is ``exp(c)`` whatever base
    the rates are measured in.
    """
    _check_d(sigma_s2, D)
    c = sigma_n2 * (1.0 / D - 1.0 / sigma_s2)
    ec = math.exp(c)
    a = sigma_s2 / D
    limit_s = a * ec - 1.0
    limit_j = ec - D / sigma_s2
    limit_a = (1.0 / D - 1.0 / sigma_s2) * (sigma_s2 + sigma_n2)
    return limit_s, limit_j, limit_a


def lambda_star(L: int, gamma_star: float) -> float:
    if not 0.0 <= gamma_star <= 1.0:
        raise InvalidExponent(f"gamma* must lie in [0, 1], got {gamma_star}")
    return 0.0 if gamma_star < 1.0 else 1.0 / L


def high_snr_ratios(L: int, gamma_star: float) -> tuple:
    """``(lambda*, ratio_s, ratio_j, ratio_a, eta)`` as the measurement noise vanishes."""
    if L < 1:
        raise ValueError("L must be positive")
    lam = lambda_star(L, gamma_star)
    if lam >= 1.0:
        # a single sensor with D tracking sigma_N^2: the power ratio diverges
        return lam, math.inf, math.inf, math.inf, 1.0
    ratio_s = 1.0 / (L * (1.0 - lam) ** L)
    ratio_j = 1.0 / (L * L * (1.0 - lam) ** L)
    ratio_a = 1.0 / (L * L * (1.0 - lam))
    return lam, ratio_s, ratio_j, ratio_a, 1.0


def asymptotic_report(L: int, gamma_star: float, sigma_s2: float = 1.0,
                      sigma_n2: float = 1.0, D: float = 0.5) -> AsymptoticReport:
    lam, rs, rj, ra, eta = high_snr_ratios(L, gamma_star)
    limit_s, limit_j, limit_a = large_l_limits(sigma_s2, sigma_n2, D)
    return AsymptoticReport(limit_s=limit_s, limit_j=limit_j, limit_a=limit_a,
                            limit_lob=limit_a, lambda_star=lam, gamma_star=gamma_star,
                            ratio_s=rs, ratio_j=rj, ratio_a=ra, eta=eta)


def scaled_finite_l(L: int, sigma_s2: float, sigma_n2: float, D: float) -> dict:
    """``L p_s``, ``L p_j``, ``L^2 p_a``, ``L^2 p_lob`` at finite ``L``."""
    sp = symmetric_closed_forms(L, sigma_s2, sigma_n2, D)
    return {"s": L * sp.p_s, "j": L * sp.p_j, "a": L * L * sp.p_a, "lob": L * L * sp.p_lob}


def distortion_track(sigma_n2: float, gamma_star: float, sigma_s2: float = 1.0) -> float:
    """Target ``D = sigma_S^2 (sigma_N^2/sigma_S^2)**gamma*`` tied to the noise level.

    ``gamma* = 1`` gives ``D = sigma_N^2`` (so ``lambda -> 1/L``); any
    ``gamma*`` in ``(0, 1)`` sends ``lambda -> 0`` while ``D -> 0``.
    """
    if not 0.0 < gamma_star <= 1.0:
        raise InvalidExponent("a convergent sweep needs gamma* in (0, 1]")
    return sigma_s2 * (sigma_n2 / sigma_s2) ** gamma_star


def estimate_eta(distortions: Sequence[float], snrs: Sequence[float]) -> float:
    """Slope of ``-ln D`` against ``ln(P g/sigma_W^2)`` by least squares."""
    x = np.log(np.asarray(snrs, dtype=float))
    y = -np.log(np.asarray(distortions, dtype=float))
    slope, _ = np.polyfit(x, y, 1)
    return float(slope)


@dataclass
class ConvergenceTrace:
    L: int
    gamma_star: float
    noise_levels: np.ndarray
    distortions: np.ndarray
    ratios: dict            # scheme -> finite ratios along the sweep
    limits: dict            # scheme -> limiting ratio
    errors: dict = field(default_factory=dict)
    eta: dict = field(default_factory=dict)

    def monotone(self, scheme: str) -> bool:
        e = self.errors[scheme]
        return bool(np.all(np.diff(e) <= 1e-15))


def convergence_sweep(L: int, gamma_star: float, sigma_s2: float = 1.0,
                      noise_levels: Sequence[float] = DEFAULT_NOISE_LEVELS,
                      tail: int = 4) -> ConvergenceTrace:
    """Finite-``L`` ratios ``(P g/sigma_W^2)/(sigma_S^2/D)`` along a vanishing-noise track.

    ``eta`` is a limiting slope, so the regression uses only the last
    ``tail`` noise levels (all of them when ``tail`` is ``None``).
    """
    levels = np.asarray(noise_levels, dtype=float)
    Ds = np.array([distortion_track(n, gamma_star, sigma_s2) for n in levels])
    _, rs, rj, ra, _ = high_snr_ratios(L, gamma_star)
    limits = {"s": rs, "j": rj, "a": ra}
    ratios = {k: np.empty(len(levels)) for k in limits}
    snr = {k: np.empty(len(levels)) for k in limits}
    for i, (n, D) in enumerate(zip(levels, Ds)):
        sp = symmetric_closed_forms(L, sigma_s2, n, D)
        for k, p in (("s", sp.p_s), ("j", sp.p_j), ("a", sp.p_a)):
            snr[k][i] = p
            ratios[k][i] = p / (sigma_s2 / D)
    with np.errstate(invalid="ignore"):
        errors = {k: np.abs(ratios[k] / limits[k] - 1.0) for k in limits}
    sl = slice(None) if tail is None else slice(-max(2, tail), None)
    eta = {k: estimate_eta(Ds[sl], snr[k][sl]) for k in limits}
    return ConvergenceTrace(L=L, gamma_star=gamma_star, noise_levels=levels, distortions=Ds,
                            ratios=ratios, limits=limits, errors=errors, eta=eta)
