"""Problem instances: network description, linear topologies, feasibility screening."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .errors import PositionOutOfRange


class Scheme(str, enum.Enum):
    SSCC = "sscc"
    JSCC = "jscc"
    UNCODED = "uncoded"
    LOWER_BOUND = "lowerbound"


@dataclass(frozen=True)
class LinearTopology:
    """Source, sensors and fusion center on one line (source at 0, receiver at d0)."""

    d0: float
    positions: tuple
    beta_c: float = 2.0
    beta_s: float = 2.0
    kappa_c: float = 1.0
    kappa_s: float = 1.0


@dataclass(frozen=True)
class NetworkConfig:
    """A Gaussian sensor network observed through a Gaussian MAC.

    Parameters
    ----------
    sigma_s2 : float
        Source variance.
    sigma_w2 : float
        Receiver noise variance.
    gains : sequence of float
        Channel power gains ``g_i``.
    noise_vars : sequence of float
        Measurement noise variances.
    """

    sigma_s2: float
    sigma_w2: float
    gains: tuple
    noise_vars: tuple
    topology: Optional[LinearTopology] = field(default=None, compare=False)

    def __post_init__(self):
        gains = tuple(float(g) for g in self.gains)
        noise = tuple(float(n) for n in self.noise_vars)
        object.__setattr__(self, "gains", gains)
        object.__setattr__(self, "noise_vars", noise)
        if len(gains) != len(noise):
            raise ValueError("gains and noise_vars must have the same length")
        if len(gains) < 1:
            raise ValueError("at least one sensor is required")
        for name, v in (("sigma_s2", self.sigma_s2), ("sigma_w2", self.sigma_w2)):
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be positive and finite, got {v}")
        for v in gains + noise:
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"gains and noise variances must be positive and finite, got {v}")

    @property
    def L(self) -> int:
        return len(self.gains)

    @property
    def g(self) -> np.ndarray:
        return np.asarray(self.gains, dtype=float)

    @property
    def sigma_n2(self) -> np.ndarray:
        return np.asarray(self.noise_vars, dtype=float)

    @classmethod
    def symmetric(cls, L: int, sigma_s2: float = 1.0, sigma_n2: float = 1.0,
                  g: float = 1.0, sigma_w2: float = 1.0) -> "NetworkConfig":
        return cls(sigma_s2, sigma_w2, (g,) * L, (sigma_n2,) * L)

    def permuted(self, perm: Sequence[int]) -> "NetworkConfig":
        perm = list(perm)
        return NetworkConfig(self.sigma_s2, self.sigma_w2,
                             tuple(self.gains[i] for i in perm),
                             tuple(self.noise_vars[i] for i in perm))


@dataclass(frozen=True)
class DistortionTarget:
    d: float

    def __post_init__(self):
        if not (math.isfinite(self.d) and self.d > 0):
            raise ValueError(f"distortion target must be positive, got {self.d}")


DistortionLike = Union[float, DistortionTarget]


def as_distortion(target: DistortionLike) -> float:
    if isinstance(target, DistortionTarget):
        return target.d
    d = float(target)
    if not (math.isfinite(d) and d > 0):
        raise ValueError(f"distortion target must be positive, got {d}")
    return d


@dataclass
class SchemeSolution:
    """Optimal (or best found) operating point of one transmission scheme."""

    scheme: Scheme
    powers: np.ndarray
    r: np.ndarray
    rates: np.ndarray
    alpha: Optional[float]
    achieved_d: float
    total_power: float
    converged: bool
    iterations: int = 0
    status: str = "converged"
    diagnostics: dict = field(default_factory=dict)

    def as_record(self) -> dict:
        return {
            "scheme": self.scheme.value,
            "powers": [float(p) for p in self.powers],
            "r": [float(x) for x in self.r],
            "rates": [float(x) for x in self.rates],
            "alpha": None if self.alpha is None else float(self.alpha),
            "achieved_d": float(self.achieved_d),
            "total_power": float(self.total_power),
            "converged": bool(self.converged),
            "iterations": int(self.iterations),
            "status": self.status,
        }


def build_linear_topology(d0: float, positions: Sequence[float], beta_c: float = 2.0,
                          beta_s: float = 2.0, kappa_c: float = 1.0, kappa_s: float = 1.0,
                          sigma_s2: float = 1.0, sigma_w2: float = 1.0) -> NetworkConfig:
    """Sensors between a source at 0 and the fusion center at ``d0``.

    Channel gain decays with the distance to the fusion center and the
    measurement noise grows with the distance to the source::

        g_i = kappa_c / (d0 - d_i)**beta_c,   sigma_Ni^2 = kappa_s * d_i**beta_s
    """
    if beta_c < 0 or beta_s < 0:
        raise ValueError("path-loss exponents must be non-negative")
    if kappa_c <= 0 or kappa_s <= 0:
        raise ValueError("path-loss constants must be positive")
    pos = tuple(float(p) for p in positions)
    for p in pos:
        if not (0.0 < p < d0):
            raise PositionOutOfRange(f"position {p} is outside (0, {d0})")
    gains = tuple(kappa_c / (d0 - p) ** beta_c for p in pos)
    noise = tuple(kappa_s * p ** beta_s for p in pos)
    topo = LinearTopology(float(d0), pos, beta_c, beta_s, kappa_c, kappa_s)
    return NetworkConfig(sigma_s2, sigma_w2, gains, noise, topology=topo)


def uniform_spots(d0: float, n: int = 9) -> np.ndarray:
    """``n`` equally spaced candidate positions strictly between source and receiver."""
    return np.arange(1, n + 1) * d0 / (n + 1)


def min_distortion(cfg: NetworkConfig) -> float:
    """Distortion reached with perfect quantization of every measurement."""
    return 1.0 / (1.0 / cfg.sigma_s2 + float(np.sum(1.0 / cfg.sigma_n2)))


@dataclass(frozen=True)
class FeasibilityReport:
    d_min: float
    target: float
    feasible: bool
    degenerate: bool
    max_d0: Optional[float] = None

    def __bool__(self):
        return self.feasible


def validate_feasibility(cfg: NetworkConfig, target: DistortionLike) -> FeasibilityReport:
    """Screen a target distortion against the best achievable one.

    ``degenerate`` flags targets at or above the source variance, which
    zero transmit power already meets.  For linear topologies with equal
    path-loss exponents ``max_d0`` is the largest source/receiver distance
    for which any sensor placement can meet the target.
    """
    d = as_distortion(target)
    dmin = min_distortion(cfg)
    degenerate = d >= cfg.sigma_s2
    max_d0 = None
    topo = cfg.topology
    if topo is not None and topo.beta_c == topo.beta_s and topo.beta_s > 0 and not degenerate:
        max_d0 = (cfg.L * topo.kappa_s / (1.0 / d - 1.0 / cfg.sigma_s2)) ** (1.0 / topo.beta_s)
    return FeasibilityReport(d_min=dmin, target=d, feasible=degenerate or d > dmin,
                             degenerate=degenerate, max_d0=max_d0)
