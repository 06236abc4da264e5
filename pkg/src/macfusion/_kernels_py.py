"""Vectorized numpy implementations of the hot kernels.

Same signatures and semantics as the compiled ``_kernels`` extension; used
when the extension is unavailable or ``MACFUSION_PURE_PYTHON`` is set.
"""

import math

import numpy as np

_LN2 = math.log(2.0)


def barrier_eval(A, logc, starts, u, t):
    """Log-barrier objective, gradient and Hessian for a GP in log space.

    Group 0 of the stacked terms is the objective, every later group a
    constraint ``lse(A_g u + logc_g) <= 0``.  Returns
    ``(phi, grad, hess, F)`` where ``F`` holds the group log-sum-exps;
    ``phi`` is ``inf`` (and grad/hess ``None``) outside the domain.
    """
    A = np.asarray(A, dtype=float)
    starts = np.asarray(starts, dtype=np.intp)
    y = A @ u + logc
    heads = starts[:-1]
    counts = np.diff(starts)
    gmax = np.maximum.reduceat(y, heads)
    e = np.exp(y - np.repeat(gmax, counts))
    s = np.add.reduceat(e, heads)
    F = gmax + np.log(s)
    if np.any(F[1:] >= 0.0):
        return math.inf, None, None, F
    w = e / np.repeat(s, counts)
    grads = np.add.reduceat(w[:, None] * A, heads, axis=0)
    negF = -F[1:]
    c = np.empty(len(heads))
    c[0] = t
    c[1:] = 1.0 / negF
    wc = w * np.repeat(c, counts)
    grad = c @ grads
    hess = (A.T * wc) @ A
    hess -= (grads.T * c) @ grads
    gi = grads[1:]
    hess += (gi.T * (1.0 / negF ** 2)) @ gi
    phi = t * F[0] - float(np.sum(np.log(negF)))
    return phi, grad, hess, F


def barrier_value(A, logc, starts, u, t):
    """Barrier objective only (``inf`` outside the domain)."""
    starts = np.asarray(starts, dtype=np.intp)
    y = np.asarray(A) @ u + logc
    heads = starts[:-1]
    gmax = np.maximum.reduceat(y, heads)
    F = gmax + np.log(np.add.reduceat(np.exp(y - np.repeat(gmax, np.diff(starts))), heads))
    if np.any(F[1:] >= 0.0):
        return math.inf
    return t * F[0] - float(np.sum(np.log(-F[1:])))


def newton_center(A, logc, starts, u0, t, eps, max_steps):
    """Damped Newton minimization of the barrier at fixed ``t``.

    Stops when half the squared Newton decrement drops below ``eps``, the
    line search stalls, or after ``max_steps``.  Returns ``(u, steps, grad)``.
    """
    u = np.array(u0, dtype=float)
    steps = 0
    n = len(u)
    while steps < max_steps:
        phi, grad, hess, _ = barrier_eval(A, logc, starts, u, t)
        if not math.isfinite(phi):
            raise ArithmeticError("Newton iterate left the barrier domain")
        jitter = 1e-13 * max(1.0, float(np.max(np.abs(np.diag(hess)))))
        du = None
        for _ in range(8):
            try:
                c = np.linalg.cholesky(hess + jitter * np.eye(n))
                du = np.linalg.solve(c.T, np.linalg.solve(c, -grad))
                break
            except np.linalg.LinAlgError:
                jitter *= 100.0
        steps += 1
        if du is None:
            break
        lam2 = float(-grad @ du)
        if lam2 <= 2.0 * eps or not math.isfinite(lam2):
            break
        s = 1.0
        while True:
            un = u + s * du
            phin = barrier_value(A, logc, starts, un, t)
            # allow for rounding in phi, which grows like t
            if phin <= phi - 0.25 * s * lam2 + 1e-13 * abs(phi):
                break
            s *= 0.5
            if s < 1e-12:
                break
        if s < 1e-12:
            break
        u = un
    _, grad, _, _ = barrier_eval(A, logc, starts, u, t)
    return u, steps, grad


def _lhs_l2(r1, r2, s2, n1, n2):
    t1 = -np.expm1(-2.0 * _LN2 * r1) / n1
    t2 = -np.expm1(-2.0 * _LN2 * r2) / n2
    a = 1.0 / s2
    inv_de = a + t1 + t2
    l1 = r1 + 0.5 * np.log2(inv_de / (a + t2))
    l2 = r2 + 0.5 * np.log2(inv_de / (a + t1))
    l12 = r1 + r2 + 0.5 * np.log2(inv_de * s2)
    return l1, l2, l12, 1.0 / inv_de, s2 * t1, s2 * t2


def _feasible_l2(params, r1, r2, p1, p2, jscc, lhs=None):
    s2, w2, g1, g2, n1, n2, d, tol = params
    if lhs is None:
        lhs = _lhs_l2(r1, r2, s2, n1, n2)
    l1, l2, l12, de, q1, q2 = lhs
    x1 = p1 * g1 / w2
    x2 = p2 * g2 / w2
    if jscc:
        rho2 = q1 * q2 / ((1.0 + q1) * (1.0 + q2))
        c1 = 0.5 * np.log2(1.0 + x1 * (1.0 - rho2))
        c2 = 0.5 * np.log2(1.0 + x2 * (1.0 - rho2))
        c12 = 0.5 * np.log2(1.0 + x1 + x2 + 2.0 * np.sqrt(rho2 * x1 * x2))
    else:
        c1 = 0.5 * np.log2(1.0 + x1)
        c2 = 0.5 * np.log2(1.0 + x2)
        c12 = 0.5 * np.log2(1.0 + x1 + x2)
    return ((de <= d * (1.0 + 1e-9)) & (l1 <= c1 + tol) & (l2 <= c2 + tol)
            & (l12 <= c12 + tol))


def feasible_l2(params, r1, r2, p1, p2, jscc):
    """Two-sensor rate-region test (elementwise over broadcast arrays).

    ``params`` is ``(sigma_s2, sigma_w2, g1, g2, n1, n2, D, tol)``.
    """
    r1, r2, p1, p2 = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (r1, r2, p1, p2)))
    return _feasible_l2(params, r1, r2, p1, p2, bool(jscc))


def min_p2_l2(params, r1, r2, p1, pmax, jscc, n_bisect=48):
    """Smallest feasible ``P2`` for each ``(r1, r2, P1)`` triple, by bisection.

    Relies on every region inequality being monotone in ``P2``.  Returns
    ``nan`` where even ``pmax`` is infeasible.
    """
    r1, r2, p1 = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (r1, r2, p1)))
    r1, r2, p1 = r1.ravel(), r2.ravel(), p1.ravel()
    jscc = bool(jscc)
    lhs = _lhs_l2(r1, r2, params[0], params[4], params[5])
    hi = np.full(r1.shape, float(pmax))
    lo = np.zeros(r1.shape)
    ok_hi = _feasible_l2(params, r1, r2, p1, hi, jscc, lhs)
    ok_lo = _feasible_l2(params, r1, r2, p1, lo, jscc, lhs)
    for _ in range(n_bisect):
        mid = 0.5 * (lo + hi)
        ok = _feasible_l2(params, r1, r2, p1, mid, jscc, lhs)
        hi = np.where(ok, mid, hi)
        lo = np.where(ok, lo, mid)
    out = np.where(ok_lo, 0.0, hi)
    return np.where(ok_hi, out, np.nan)


def uncoded_mse_l2(params, p1, p2):
    """Uncoded two-sensor LMMSE distortion over broadcast power arrays."""
    s2, w2, g1, g2, n1, n2 = params[:6]
    p1, p2 = np.broadcast_arrays(np.asarray(p1, dtype=float), np.asarray(p2, dtype=float))
    rho = s2 / math.sqrt((s2 + n1) * (s2 + n2))
    x1 = p1 * g1
    x2 = p2 * g2
    num = x1 * n1 / (s2 + n1) + x2 * n2 / (s2 + n2) + w2
    den = x1 + x2 + 2.0 * rho * np.sqrt(x1 * x2) + w2
    return s2 * num / den
