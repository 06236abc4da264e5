import os
import subprocess
import sys

import numpy as np
import pytest

from macfusion import kernels
from macfusion.model import NetworkConfig
from macfusion.schemes import uncoded_mse
from macfusion.verify import _params


def test_backend_reported():
    assert kernels.BACKEND in ("python", "cython")
    assert "python" in kernels.backends()


def test_pure_python_switch():
    env = dict(os.environ, MACFUSION_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import macfusion; print(macfusion.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


@pytest.fixture
def both():
    b = kernels.backends()
    if "cython" not in b:
        pytest.skip("compiled extension not built")
    return b["python"], b["cython"]


def test_uncoded_kernel_matches_formula():
    cfg = NetworkConfig(1.0, 0.7, (2.0, 0.5), (0.4, 1.3))
    params = _params(cfg, 0.5)
    p1, p2 = np.array([0.3, 2.0, 7.0]), np.array([1.0, 0.1, 4.0])
    got = kernels.uncoded_mse_l2(params, p1, p2)
    want = [uncoded_mse(cfg, [a, b]) for a, b in zip(p1, p2)]
    assert np.allclose(got, want, rtol=1e-12)


def test_backends_agree(both):
    py, cy = both
    cfg = NetworkConfig(1.0, 1.0, (4.0, 0.5), (0.7, 1.6))
    params = _params(cfg, 0.45)
    rng = np.random.default_rng(0)
    r1, r2 = rng.uniform(0, 3, 500), rng.uniform(0, 3, 500)
    p1 = rng.uniform(0, 20, 500)
    for jscc in (False, True):
        a = py.min_p2_l2(params, r1, r2, p1, 40.0, jscc)
        b = cy.min_p2_l2(params, r1, r2, p1, 40.0, jscc)
        assert np.allclose(a, b, rtol=1e-9, equal_nan=True)
        p2 = rng.uniform(0, 20, 500)
        assert np.array_equal(py.feasible_l2(params, r1, r2, p1, p2, jscc),
                              cy.feasible_l2(params, r1, r2, p1, p2, jscc))
    q1, q2 = rng.uniform(0, 20, (2, 1000))
    assert np.allclose(py.uncoded_mse_l2(params, q1, q2), cy.uncoded_mse_l2(params, q1, q2),
                       rtol=1e-12)


def test_barrier_kernels_agree(both):
    sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "benchmarks"))
    from bench_kernels import _gp_case
    py, cy = both
    cp, u0, _, _ = _gp_case()
    for t in (1.0, 10.0, 1e3):
        fa, ga, Ha = py.barrier_eval(cp.A, cp.logc, cp.starts, u0, t)[:3]
        fb, gb, Hb = cy.barrier_eval(cp.A, cp.logc, cp.starts, u0, t)[:3]
        assert np.allclose(fa, fb, rtol=1e-10)
        assert np.allclose(ga, gb, rtol=1e-9, atol=1e-12)
        assert np.allclose(Ha, Hb, rtol=1e-9, atol=1e-12)
    ua = py.newton_center(cp.A, cp.logc, cp.starts, u0, 1e3, 1e-10, 60)[0]
    ub = cy.newton_center(cp.A, cp.logc, cp.starts, u0, 1e3, 1e-10, 60)[0]
    assert np.allclose(ua, ub, rtol=1e-8, atol=1e-10)
