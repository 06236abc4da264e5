"""Rate-distortion constraints written in excess levels.

A quantizer rate ``r`` enters as ``y = 2**(2r) - 1`` and a channel rate
``R`` as ``V = 2**(2R) - 1``.  Writing the test-channel algebra in these
excesses cancels the constant that ``z = 2**(2r)`` carries on both sides
of every constraint, so low-rate operating points keep full relative
precision and condensation stays informative there.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .gp_core import Monomial, Posynomial, leq
from .model import NetworkConfig, min_distortion

START_MARGIN = 0.2


def mono(name: str, power: float = 1.0) -> Monomial:
    return Monomial(1.0, {name: power})


def excess_product(names: Sequence[str]) -> Posynomial:
    """``prod(1 + x_i) - 1`` expanded: the sum over nonempty subsets of products."""
    out = None
    for n in names:
        x = mono(n)
        out = x if out is None else (out + x + out * x)
    return Posynomial([out]) if isinstance(out, Monomial) else out.simplify()


def one_plus_product(names: Sequence[str]) -> Posynomial:
    """``prod(1 + x_i)`` expanded."""
    return (1 + excess_product(names)).simplify() if names else Posynomial([Monomial()])


def _weighted_quality(cfg: NetworkConfig, idx: Sequence[int], L: int):
    """``sum_k b_k q_k`` over ``idx`` times ``prod_all(1 + y)``, with ``q = y/(1+y)``."""
    b = 1.0 / cfg.sigma_n2
    out = None
    for k in idx:
        others = [f"y{j}" for j in range(L) if j != k]
        term = b[k] * mono(f"y{k}") * one_plus_product(others)
        out = term if out is None else out + term
    return out


def distortion_constraint(cfg: NetworkConfig, D: float):
    """``1/sigma_S^2 + sum b_k q_k >= 1/D`` (exact ``D_E(r) <= D``)."""
    L = cfg.L
    need = 1.0 / D - 1.0 / cfg.sigma_s2
    lhs = need * one_plus_product([f"y{k}" for k in range(L)])
    rhs = _weighted_quality(cfg, range(L), L).simplify()
    return leq(lhs.simplify(), rhs, "distortion")


def ceo_parts(cfg: NetworkConfig, S: Sequence[int]) -> tuple:
    """``(need, base)`` with the Berger-Tung bound for ``S`` reading ``need <= VS * base``.

    The bound ``(1 + VS)(a + B_c) >= prod_S(1 + y_i)(a + B_c + B_S)``, with
    ``a = 1/sigma_S^2`` and ``B`` the weighted qualities outside and inside
    ``S``, is scaled by ``prod_all(1 + y)``; the product of ones cancels and
    leaves ``VS (a + B_c) >= yS (a + B) + B_S``, ``VS = prod_S 2**(2R_i) - 1``.
    """
    L = cfg.L
    S = list(S)
    Sc = [k for k in range(L) if k not in S]
    a = 1.0 / cfg.sigma_s2
    Z = one_plus_product([f"y{k}" for k in range(L)])
    base = a * Z if not Sc else a * Z + _weighted_quality(cfg, Sc, L)
    full = a * Z + _weighted_quality(cfg, range(L), L)
    yS = excess_product([f"y{k}" for k in S])
    need = yS * full + _weighted_quality(cfg, S, L)
    return need.simplify(), base.simplify()


def ceo_constraint(cfg: NetworkConfig, S: Sequence[int], VS, name: str = ""):
    """``need <= VS * base`` for a channel excess ``VS`` (monomial or posynomial)."""
    need, base = ceo_parts(cfg, S)
    rhs = ((Posynomial([VS]) if isinstance(VS, Monomial) else VS) * base).simplify()
    return leq(need, rhs, name or "ceo" + "".join(map(str, S)))


def common_level(cfg: NetworkConfig, D: float, margin: float = START_MARGIN) -> float:
    """Equal ``y`` whose distortion sits strictly inside the target."""
    d_in = D - margin * (D - min_distortion(cfg))
    frac = (1.0 / d_in - 1.0 / cfg.sigma_s2) / float(np.sum(1.0 / cfg.sigma_n2))
    return frac / (1.0 - frac)


def rate_from_level(y: float) -> float:
    """``r`` with ``2**(2r) - 1 = y``."""
    return 0.5 * math.log1p(max(y, 0.0)) / math.log(2.0)


def level_from_rate(r) -> np.ndarray:
    return np.expm1(2.0 * math.log(2.0) * np.asarray(r, dtype=float))


def quality_weights(cfg: NetworkConfig):
    """``(s_i)`` measurement SNRs ``sigma_S^2 / sigma_Ni^2``."""
    return cfg.sigma_s2 / cfg.sigma_n2
