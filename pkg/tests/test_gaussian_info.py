import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from macfusion import gaussian_info as gi
from macfusion.errors import (InconsistentDistortion, IndexOutOfRange, NegativeRate,
                              OverlappingSets, SingularBlock)
from macfusion.model import NetworkConfig, Scheme


def test_measurement_correlation_examples(b1):
    assert gi.measurement_correlation(b1, 0, 1) == pytest.approx(0.5)
    cfg = NetworkConfig(1.0, 1.0, (1, 1), (1.0, 3.0))
    assert gi.measurement_correlation(cfg, 0, 1) == pytest.approx(1 / math.sqrt(8))
    tiny = NetworkConfig(1.0, 1.0, (1, 1), (1e-12, 1e-12))
    assert gi.measurement_correlation(tiny, 0, 1) == pytest.approx(1.0, abs=1e-9)
    with pytest.raises(IndexOutOfRange):
        gi.measurement_correlation(b1, 0, 0)


def test_quantizer_rate(b1):
    assert gi.quantizer_rate_from_r(b1, 0, 0.0) == 0.0
    assert gi.quantizer_rate_from_r(b1, 0, 0.5) == pytest.approx(0.5 + 0.5 * math.log2(1.5))
    with pytest.raises(NegativeRate):
        gi.quantizer_rate_from_r(b1, 0, -0.1)
    weak = NetworkConfig(1.0, 1.0, (1, 1), (1e12, 1e12))
    assert gi.quantizer_rate_from_r(weak, 0, 0.7) == pytest.approx(0.7, abs=1e-9)


def test_distortion_from_r(b1):
    assert gi.distortion_from_r(b1, [0, 0]) == 1.0
    assert gi.distortion_from_r(b1, [0.5, 0.5]) == pytest.approx(0.5)
    assert gi.distortion_from_r(b1, [60, 60]) == pytest.approx(1 / 3)


def test_codeword_correlation(b1):
    assert gi.codeword_correlation(b1, 0, 1, 0.0, 0.7) == 0.0
    assert gi.codeword_correlation(b1, 0, 1, 0.5, 0.5) == pytest.approx(1 / 3)
    assert gi.codeword_correlation(b1, 0, 1, 40, 40) == pytest.approx(0.5)


def test_codeword_correlation_tiny_rates():
    cfg = NetworkConfig(1.0, 1.0, (7.0, 0.14), (0.72, 1.09))
    rho = gi.codeword_correlation(cfg, 0, 1, 1e-7, 1e-7)
    assert 0 < rho < 1e-6


def test_ceo_rate_lhs(b1):
    r = [0.5, 0.5]
    assert gi.ceo_rate_lhs(b1, r, []) == 0.0
    assert gi.ceo_rate_lhs(b1, r, [0, 1], 0.5) == pytest.approx(1.5)
    assert gi.ceo_rate_lhs(b1, r, [0], 0.5) == pytest.approx(0.5 - 0.5 * math.log2(0.75))
    with pytest.raises(InconsistentDistortion):
        gi.ceo_rate_lhs(b1, r, [0], 0.4)


def test_conditional_covariance():
    sig = np.array([[1.0, 1 / 3], [1 / 3, 1.0]])
    assert gi.conditional_covariance(sig, [0]) == pytest.approx(np.array([[8 / 9]]))
    assert gi.conditional_covariance(sig, [0, 1]) == pytest.approx(sig)
    assert gi.conditional_covariance(np.eye(2), [1]) == pytest.approx(np.eye(1))
    with pytest.raises(SingularBlock):
        gi.conditional_covariance(np.array([[1.0, 0.0], [0.0, 0.0]]), [0])


def test_mac_rhs(b1):
    assert gi.mac_rhs_independent(b1, [3, 0], [0, 1]) == pytest.approx(1.0)
    assert gi.mac_rhs_independent(b1, [1, 1], [0, 1]) == pytest.approx(0.5 * math.log2(3))
    assert gi.mac_rhs_independent(b1, [1, 1], []) == 0.0
    assert gi.mac_rhs_correlated(b1, [1, 1], [0.5, 0.5], [0, 1]) == \
        pytest.approx(0.5 * math.log2(11 / 3))
    assert gi.mac_rhs_correlated(b1, [3, 1], [0, 0], [0]) == pytest.approx(1.0)


def test_check_feasible_b1(b1):
    v = gi.check_feasible(b1, [2.625, 2.625], [0.5, 0.5], 0.5, Scheme.JSCC)
    assert v.feasible and abs(v.margins[(0, 1)]) < 1e-6
    v = gi.check_feasible(b1, [3.5, 3.5], [0.5, 0.5], 0.5, Scheme.SSCC)
    assert v.feasible and abs(v.margins[(0, 1)]) < 1e-6
    v = gi.check_feasible(b1, [0, 0], [0.5, 0.5], 0.5, Scheme.SSCC)
    assert not v.feasible and v.worst_subset == (0, 1)


def test_mutual_information_basics():
    cov = np.array([[1.0, 1.0], [1.0, 2.0]])
    assert gi.gaussian_mutual_information(cov, [0], [1]) == pytest.approx(0.5)
    assert gi.gaussian_mutual_information(np.eye(3), [0], [1, 2]) == 0.0
    with pytest.raises(OverlappingSets):
        gi.gaussian_mutual_information(np.eye(2), [0], [0])


def test_pair_markov_identity(b1):
    m = gi.joint_test_channel(b1, [0.5, 0.5])
    mi = gi.gaussian_mutual_information
    u1, u2 = m.u
    x1, x2 = m.x
    lhs = mi(m.cov, [u1, u2], [x1, x2])
    rhs = mi(m.cov, [x1], [u1]) + mi(m.cov, [x2], [u2]) - mi(m.cov, [u1], [u2])
    assert lhs == pytest.approx(rhs, abs=1e-9)


rate = st.floats(0.01, 3.0)
scale = st.floats(0.1, 10.0)


@given(st.tuples(scale, scale, scale), st.tuples(scale, scale, scale),
       st.tuples(rate, rate, rate), st.tuples(scale, scale, scale),
       st.sampled_from([(0,), (1, 2), (0, 2), (0, 1, 2)]))
def test_region_bounds_match_determinant_route(g, n, r, P, S):
    cfg = NetworkConfig(1.0, 1.0, g, n)
    assert gi.ceo_rate_lhs(cfg, r, S) == pytest.approx(
        gi.lhs_via_mutual_information(cfg, r, S), abs=1e-9)
    assert gi.mac_rhs_correlated(cfg, P, r, S) == pytest.approx(
        gi.rhs_via_mutual_information(cfg, P, r, S), abs=1e-9)


@given(st.tuples(scale, scale), st.tuples(scale, scale), st.tuples(rate, rate))
def test_more_power_never_hurts(g, n, r):
    cfg = NetworkConfig(1.0, 1.0, g, n)
    for S in ([0], [1], [0, 1]):
        lo = gi.mac_rhs_correlated(cfg, [1.0, 1.0], r, S)
        hi = gi.mac_rhs_correlated(cfg, [2.0, 2.0], r, S)
        assert hi >= lo
