import math

import numpy as np
import pytest

from macfusion.errors import PositionOutOfRange
from macfusion.model import (DistortionTarget, NetworkConfig, Scheme, as_distortion,
                             build_linear_topology, min_distortion, uniform_spots,
                             validate_feasibility)


def test_symmetric_constructor(b1):
    assert b1.L == 2
    assert np.allclose(b1.g, 1.0) and np.allclose(b1.sigma_n2, 1.0)


@pytest.mark.parametrize("bad", [dict(sigma_s2=0.0), dict(sigma_w2=-1.0),
                                 dict(gains=(1.0, 0.0)), dict(noise_vars=(1.0, math.inf))])
def test_rejects_nonpositive_parameters(bad):
    kw = dict(sigma_s2=1.0, sigma_w2=1.0, gains=(1.0, 1.0), noise_vars=(1.0, 1.0))
    kw.update(bad)
    with pytest.raises(ValueError):
        NetworkConfig(**kw)


def test_length_mismatch():
    with pytest.raises(ValueError):
        NetworkConfig(1.0, 1.0, (1.0,), (1.0, 1.0))


def test_min_distortion_two_unit_sensors(b1):
    assert min_distortion(b1) == pytest.approx(1.0 / 3.0)


def test_feasibility_screen(b1):
    assert validate_feasibility(b1, 0.5).feasible
    rep = validate_feasibility(b1, 0.3)
    assert not rep.feasible and rep.d_min == pytest.approx(1 / 3)
    assert validate_feasibility(b1, 1.5).degenerate


def test_linear_topology_path_loss():
    cfg = build_linear_topology(2.0, [0.5, 1.5], beta_c=2.0, beta_s=2.0)
    assert cfg.gains == pytest.approx((1 / 1.5 ** 2, 1 / 0.5 ** 2))
    assert cfg.noise_vars == pytest.approx((0.25, 2.25))
    assert cfg.topology.d0 == 2.0


def test_position_outside_segment():
    with pytest.raises(PositionOutOfRange):
        build_linear_topology(1.0, [0.5, 1.0])


def test_max_d0_matches_screen():
    D = 0.1
    cfg = build_linear_topology(1.0, [0.3, 0.6])
    rep = validate_feasibility(cfg, D)
    assert rep.max_d0 == pytest.approx(math.sqrt(2.0 / (1.0 / D - 1.0)))


def test_uniform_spots():
    assert uniform_spots(1.0) == pytest.approx(np.arange(1, 10) / 10)


def test_distortion_target():
    assert as_distortion(DistortionTarget(0.2)) == 0.2
    with pytest.raises(ValueError):
        as_distortion(-1.0)


def test_scheme_values():
    assert {s.value for s in Scheme} == {"sscc", "jscc", "uncoded", "lowerbound"}
