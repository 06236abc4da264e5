"""Minimum-power estimation of a Gaussian source by sensors sharing a Gaussian MAC.

Separate source/channel coding, joint source/channel coding and uncoded
(amplify-and-forward) transmission are compared through their minimum
total transmit power at a target mean-squared error.
"""

from .errors import Infeasible, MacFusionError
from .kernels import BACKEND
from .model import (DistortionTarget, LinearTopology, NetworkConfig, Scheme, SchemeSolution,
                    build_linear_topology, min_distortion, uniform_spots, validate_feasibility)
from .ordering import (minimize_power_sscc_vertex, optimal_channel_decoding_order,
                       vertex_power_allocation)
from .schemes import (minimize_power, minimize_power_jscc, minimize_power_lower_bound,
                      minimize_power_sscc, minimize_power_uncoded, symmetric_closed_forms,
                      uncoded_mse)

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "DistortionTarget", "Infeasible", "LinearTopology", "MacFusionError",
    "NetworkConfig", "Scheme", "SchemeSolution", "build_linear_topology", "min_distortion",
    "minimize_power", "minimize_power_jscc", "minimize_power_lower_bound",
    "minimize_power_sscc", "minimize_power_sscc_vertex", "minimize_power_uncoded",
    "optimal_channel_decoding_order", "symmetric_closed_forms", "uncoded_mse",
    "uniform_spots", "validate_feasibility", "vertex_power_allocation",
]
