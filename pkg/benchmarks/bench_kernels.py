"""Compiled versus pure-Python kernels.

Times each kernel on identical inputs under both backends, checks that the
results agree, and prints a table of best-of-``repeat`` wall times.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""

from __future__ import annotations

import argparse
import sys
import timeit

import numpy as np

from macfusion import gp_core, kernels, schemes
from macfusion.model import NetworkConfig
from macfusion.verify import _params


def _gp_case():
    """A condensed joint-coding GP, compiled, with a strictly feasible start."""
    cfg = NetworkConfig(1.0, 1.0, (4.0, 0.5), (0.7, 1.6))
    D = 0.45
    prob = schemes._jscc_problem(cfg, D)
    x0 = schemes._jscc_start(cfg, D, prob, False)
    gp = gp_core.condensed_gp(prob, x0)
    cp = gp_core._compile(gp.objective, gp_core._gp_posys(gp), prob.variables)
    u0 = np.log([x0[n] for n in prob.variables])
    return cp, u0, cfg, D


def cases():
    cp, u0, cfg, D = _gp_case()
    params = _params(cfg, D)
    rng = np.random.default_rng(0)
    n = 20_000
    r1, r2 = rng.uniform(0.0, 3.0, n), rng.uniform(0.0, 3.0, n)
    p1 = rng.uniform(0.0, 20.0, n)
    q1, q2 = rng.uniform(0.0, 20.0, (2, 200_000))
    return {
        "newton_center (barrier, t=1e3)":
            lambda k: k.newton_center(cp.A, cp.logc, cp.starts, u0, 1e3, 1e-10, 60)[0],
        "barrier_eval x200":
            lambda k: [k.barrier_eval(cp.A, cp.logc, cp.starts, u0, 10.0)[0]
                       for _ in range(200)][-1],
        f"min_p2_l2 ({n} bisections, jscc)":
            lambda k: k.min_p2_l2(params, r1, r2, p1, 40.0, True),
        "uncoded_mse_l2 (2e5 points)":
            lambda k: k.uncoded_mse_l2(params, q1, q2),
    }


def _agree(a, b) -> bool:
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    return bool(np.allclose(a, b, rtol=1e-9, atol=1e-12, equal_nan=True))


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    backends = kernels.backends()
    if "cython" not in backends:
        print("compiled extension not built; only the Python backend is available")
    print(f"active backend at import: {kernels.BACKEND}")
    header = f"{'kernel':38s}" + "".join(f"{b:>12s}" for b in backends) + "   speedup  agree"
    print(header)
    print("-" * len(header))
    for name, fn in cases().items():
        times, outs = {}, {}
        for b, mod in backends.items():
            outs[b] = fn(mod)
            times[b] = min(timeit.repeat(lambda: fn(mod), number=1, repeat=args.repeat))
        row = f"{name:38s}" + "".join(f"{times[b] * 1e3:10.2f}ms" for b in backends)
        if "cython" in times:
            row += f"  {times['python'] / times['cython']:8.1f}x  {_agree(outs['python'], outs['cython'])}"
        print(row)
    return 0


if __name__ == "__main__":
    sys.exit(main())
