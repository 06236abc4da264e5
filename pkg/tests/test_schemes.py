import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from macfusion import gaussian_info as gi
from macfusion.errors import Infeasible, InfeasibleSymmetric
from macfusion.model import NetworkConfig, Scheme, min_distortion
from macfusion.schemes import (minimize_power, minimize_power_jscc, minimize_power_lower_bound,
                               minimize_power_sscc, minimize_power_uncoded,
                               symmetric_closed_forms, uncoded_high_power_limit, uncoded_mse)
from conftest import random_two_sensor


def test_uncoded_mse_limits(b1):
    assert uncoded_mse(b1, [0.0, 0.0]) == pytest.approx(1.0)
    assert uncoded_mse(b1, [1.0, 1.0]) == pytest.approx(0.5)
    assert uncoded_mse(b1, [1e12, 1e12]) == pytest.approx(uncoded_high_power_limit(b1))
    with pytest.raises(ValueError):
        uncoded_mse(b1, [-1.0, 1.0])


@pytest.mark.parametrize("scheme,total", [("sscc", 7.0), ("jscc", 5.25), ("uncoded", 2.0),
                                          ("lowerbound", 2.0 / 3.0)])
def test_two_identical_sensors(b1, scheme, total):
    sol = minimize_power(b1, 0.5, scheme)
    assert sol.total_power == pytest.approx(total, rel=1e-4)
    if scheme != "sscc":
        # separate coding: every point of the dominant face costs the same
        assert sol.powers[0] == pytest.approx(sol.powers[1], rel=1e-3)
    assert sol.achieved_d == pytest.approx(0.5, rel=1e-6)


def test_sscc_methods_agree(rng):
    for _ in range(4):
        cfg = random_two_sensor(rng)
        D = min_distortion(cfg) + 0.4 * (1.0 - min_distortion(cfg))
        a = minimize_power(cfg, D, "sscc", method="alpha").total_power
        v = minimize_power(cfg, D, "sscc", method="vertex").total_power
        assert a == pytest.approx(v, rel=1e-4)


def test_solutions_are_feasible(rng):
    for _ in range(4):
        cfg = random_two_sensor(rng)
        D = min_distortion(cfg) + 0.5 * (1.0 - min_distortion(cfg))
        for scheme in (Scheme.SSCC, Scheme.JSCC):
            sol = minimize_power(cfg, D, scheme)
            assert sol.converged
            assert sol.achieved_d == pytest.approx(D, rel=1e-6)
            verdict = gi.check_feasible(cfg, sol.powers * (1 + 1e-6), sol.r, D, scheme)
            assert verdict.feasible, verdict
        u = minimize_power_uncoded(cfg, D) if uncoded_high_power_limit(cfg) < D else None
        if u is not None:
            assert uncoded_mse(cfg, u.powers) == pytest.approx(D, rel=1e-6)


def test_infeasible_targets(b1):
    for fn in (minimize_power_sscc, minimize_power_jscc, minimize_power_uncoded,
               minimize_power_lower_bound):
        with pytest.raises(Infeasible):
            fn(b1, 0.3)
    # reachable by coding but beyond amplify-and-forward's infinite-power limit
    D = 0.5 * (min_distortion(b1) + uncoded_high_power_limit(b1))
    if D > min_distortion(b1):
        with pytest.raises(Infeasible):
            minimize_power_uncoded(b1, D)


def test_degenerate_target_needs_no_power(b1):
    for s in ("sscc", "jscc", "uncoded", "lowerbound"):
        sol = minimize_power(b1, 1.0, s)
        assert sol.total_power == 0.0 and sol.status == "degenerate"


def test_two_sensor_only(rng):
    cfg = NetworkConfig.symmetric(3)
    with pytest.raises(ValueError):
        minimize_power_jscc(cfg, 0.5)
    sol = minimize_power(cfg, 0.5, "sscc")
    sp = symmetric_closed_forms(3, 1.0, 1.0, 0.5)
    assert sol.total_power == pytest.approx(3 * sp.p_s, rel=1e-4)


def test_unknown_method(b1):
    with pytest.raises(ValueError):
        minimize_power(b1, 0.5, "sscc", method="nope")


def test_power_increases_as_target_tightens(rng):
    cfg = random_two_sensor(rng)
    lo = min_distortion(cfg)
    Ds = lo + (1.0 - lo) * np.array([0.8, 0.5, 0.2])
    for s in ("sscc", "jscc"):
        p = [minimize_power(cfg, D, s).total_power for D in Ds]
        assert p[0] < p[1] < p[2]


def test_symmetric_closed_forms_single_sensor():
    sp = symmetric_closed_forms(1, 1.0, 1.0, 0.8)
    assert sp.p_s == pytest.approx(sp.p_j)
    # one sensor: separate coding needs 2^(2R) - 1 = sigma_S^2 z / D - 1
    assert sp.p_s == pytest.approx(1.0 / 0.8 / (1 - 0.25) - 1.0)


def test_symmetric_unreachable():
    with pytest.raises(InfeasibleSymmetric):
        symmetric_closed_forms(2, 1.0, 1.0, 0.3)


def test_alternative_joint_form_differs():
    sp = symmetric_closed_forms(2, 1.0, 1.0, 0.5)
    assert sp.p_j == pytest.approx(2.625)
    assert not math.isclose(sp.p_j_alt, sp.p_j)


@settings(max_examples=200)
@given(st.integers(2, 200), st.floats(0.1, 10), st.floats(0.01, 100), st.floats(0.02, 0.98))
def test_symmetric_ordering_property(L, ss, sn, u):
    dmin = 1.0 / (1.0 / ss + L / sn)
    D = dmin + (ss - dmin) * u
    sp = symmetric_closed_forms(L, ss, sn, D)
    if math.isfinite(sp.p_s):
        assert sp.ordered()


def test_lower_bound_below_every_scheme(rng):
    for _ in range(4):
        cfg = random_two_sensor(rng)
        lo = min_distortion(cfg)
        D = lo + 0.6 * (1.0 - lo)
        lob = minimize_power_lower_bound(cfg, D).total_power
        for s in ("sscc", "jscc"):
            assert lob <= minimize_power(cfg, D, s).total_power
