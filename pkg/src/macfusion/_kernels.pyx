# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels; see ``_kernels_py`` for the reference semantics."""

import numpy as np
cimport numpy as cnp
from libc.math cimport exp, log, log2, sqrt, expm1, fabs, INFINITY, NAN

cnp.import_array()

cdef double LN2 = 0.6931471805599453


cdef double _eval(double[:, ::1] A, double[::1] logc, cnp.intp_t[::1] starts,
                  double[::1] u, double t, double[::1] y, double[::1] ssum, double[::1] F,
                  double[::1] gg, double[::1] grad, double[:, ::1] hess, bint derivs) nogil:
    """Barrier value (and optionally gradient/Hessian); INFINITY outside the domain."""
    cdef Py_ssize_t K = A.shape[0], n = A.shape[1], G = starts.shape[0] - 1
    cdef Py_ssize_t g, k, i, j, k0, k1
    cdef double gmax, s, acc, c, wk, phi
    for k in range(K):
        acc = logc[k]
        for i in range(n):
            acc = acc + A[k, i] * u[i]
        y[k] = acc
    phi = 0.0
    for g in range(G):
        k0 = starts[g]
        k1 = starts[g + 1]
        gmax = y[k0]
        for k in range(k0 + 1, k1):
            if y[k] > gmax:
                gmax = y[k]
        s = 0.0
        for k in range(k0, k1):
            y[k] = exp(y[k] - gmax)
            s = s + y[k]
        ssum[g] = s
        F[g] = gmax + log(s)
        if g == 0:
            phi = t * F[0]
        elif F[g] >= 0.0:
            return INFINITY
        else:
            phi = phi - log(-F[g])
    if not derivs:
        return phi
    for i in range(n):
        grad[i] = 0.0
        for j in range(n):
            hess[i, j] = 0.0
    for g in range(G):
        k0 = starts[g]
        k1 = starts[g + 1]
        if g == 0:
            c = t
        else:
            c = 1.0 / (-F[g])
        for i in range(n):
            gg[i] = 0.0
        for k in range(k0, k1):
            wk = y[k] / ssum[g]
            for i in range(n):
                gg[i] = gg[i] + wk * A[k, i]
            wk = wk * c
            for i in range(n):
                if A[k, i] != 0.0:
                    for j in range(i, n):
                        hess[i, j] = hess[i, j] + wk * A[k, i] * A[k, j]
        if g == 0:
            wk = -c
        else:
            wk = -c + c * c
        for i in range(n):
            grad[i] = grad[i] + c * gg[i]
            for j in range(i, n):
                hess[i, j] = hess[i, j] + wk * gg[i] * gg[j]
    for i in range(n):
        for j in range(i + 1, n):
            hess[j, i] = hess[i, j]
    return phi


cdef bint _cholesky_solve(double[:, ::1] H, double[::1] b, double[:, ::1] Lm,
                          double[::1] x, double jitter) nogil:
    """Solve ``(H + jitter I) x = b``; False when not positive definite."""
    cdef Py_ssize_t n = H.shape[0], i, j, k
    cdef double s
    for i in range(n):
        for j in range(i + 1):
            s = H[i, j]
            if i == j:
                s = s + jitter
            for k in range(j):
                s = s - Lm[i, k] * Lm[j, k]
            if i == j:
                if s <= 0.0:
                    return False
                Lm[i, i] = sqrt(s)
            else:
                Lm[i, j] = s / Lm[j, j]
    for i in range(n):
        s = b[i]
        for k in range(i):
            s = s - Lm[i, k] * x[k]
        x[i] = s / Lm[i, i]
    for i in range(n - 1, -1, -1):
        s = x[i]
        for k in range(i + 1, n):
            s = s - Lm[k, i] * x[k]
        x[i] = s / Lm[i, i]
    return True


def barrier_eval(double[:, ::1] A, double[::1] logc, cnp.intp_t[::1] starts,
                 double[::1] u, double t):
    cdef Py_ssize_t K = A.shape[0], n = A.shape[1], G = starts.shape[0] - 1
    F_arr = np.empty(G)
    grad_arr = np.zeros(n)
    hess_arr = np.zeros((n, n))
    cdef double phi = _eval(A, logc, starts, u, t, np.empty(K), np.empty(G), F_arr,
                            np.empty(n), grad_arr, hess_arr, True)
    if phi == INFINITY:
        return INFINITY, None, None, F_arr
    return phi, grad_arr, hess_arr, F_arr


def barrier_value(double[:, ::1] A, double[::1] logc, cnp.intp_t[::1] starts,
                  double[::1] u, double t):
    cdef Py_ssize_t K = A.shape[0], n = A.shape[1], G = starts.shape[0] - 1
    return _eval(A, logc, starts, u, t, np.empty(K), np.empty(G), np.empty(G),
                 np.empty(n), np.empty(n), np.empty((1, 1)), False)


def newton_center(double[:, ::1] A, double[::1] logc, cnp.intp_t[::1] starts,
                  u0, double t, double eps, int max_steps):
    cdef Py_ssize_t K = A.shape[0], n = A.shape[1], G = starts.shape[0] - 1
    cdef Py_ssize_t i
    u_arr = np.array(u0, dtype=float)
    grad_arr = np.zeros(n)
    cdef double[::1] u = u_arr
    cdef double[::1] grad = grad_arr
    cdef double[::1] y = np.empty(K)
    cdef double[::1] ssum = np.empty(G)
    cdef double[::1] F = np.empty(G)
    cdef double[::1] gg = np.empty(n)
    cdef double[:, ::1] hess = np.zeros((n, n))
    cdef double[:, ::1] Lm = np.zeros((n, n))
    cdef double[::1] du = np.empty(n)
    cdef double[::1] un = np.empty(n)
    cdef double[::1] mg = np.empty(n)
    cdef double phi, phin, lam2, s, hmax, jitter
    cdef int steps = 0, tries
    cdef bint ok, failed = False
    with nogil:
        while steps < max_steps:
            phi = _eval(A, logc, starts, u, t, y, ssum, F, gg, grad, hess, True)
            if phi == INFINITY:
                failed = True
                break
            hmax = 1.0
            for i in range(n):
                mg[i] = -grad[i]
                if fabs(hess[i, i]) > hmax:
                    hmax = fabs(hess[i, i])
            jitter = 1e-13 * hmax
            ok = False
            for tries in range(8):
                if _cholesky_solve(hess, mg, Lm, du, jitter):
                    ok = True
                    break
                jitter = jitter * 100.0
            steps += 1
            if not ok:
                break
            lam2 = 0.0
            for i in range(n):
                lam2 = lam2 + mg[i] * du[i]
            if lam2 <= 2.0 * eps or lam2 != lam2:
                break
            s = 1.0
            while True:
                for i in range(n):
                    un[i] = u[i] + s * du[i]
                phin = _eval(A, logc, starts, un, t, y, ssum, F, gg, grad, hess, False)
                if phin <= phi - 0.25 * s * lam2 + 1e-13 * fabs(phi):
                    break
                s = s * 0.5
                if s < 1e-12:
                    break
            if s < 1e-12:
                break
            for i in range(n):
                u[i] = un[i]
    if failed:
        raise ArithmeticError("Newton iterate left the barrier domain")
    _eval(A, logc, starts, u, t, y, ssum, F, gg, grad, hess, True)
    return u_arr, steps, grad_arr


cdef inline bint _feasible(double s2, double w2, double g1, double g2, double n1, double n2,
                           double d, double tol, double l1, double l2, double l12,
                           double de, double rho2, double p1, double p2, bint jscc) nogil:
    cdef double x1 = p1 * g1 / w2
    cdef double x2 = p2 * g2 / w2
    cdef double c1, c2, c12
    if de > d * (1.0 + 1e-9):
        return False
    if jscc:
        c1 = 0.5 * log2(1.0 + x1 * (1.0 - rho2))
        c2 = 0.5 * log2(1.0 + x2 * (1.0 - rho2))
        c12 = 0.5 * log2(1.0 + x1 + x2 + 2.0 * sqrt(rho2 * x1 * x2))
    else:
        c1 = 0.5 * log2(1.0 + x1)
        c2 = 0.5 * log2(1.0 + x2)
        c12 = 0.5 * log2(1.0 + x1 + x2)
    return l1 <= c1 + tol and l2 <= c2 + tol and l12 <= c12 + tol


cdef inline void _lhs(double r1, double r2, double s2, double n1, double n2,
                      double* l1, double* l2, double* l12, double* de, double* rho2) nogil:
    cdef double t1 = -expm1(-2.0 * LN2 * r1) / n1
    cdef double t2 = -expm1(-2.0 * LN2 * r2) / n2
    cdef double a = 1.0 / s2
    cdef double inv_de = a + t1 + t2
    cdef double q1 = s2 * t1, q2 = s2 * t2
    l1[0] = r1 + 0.5 * log2(inv_de / (a + t2))
    l2[0] = r2 + 0.5 * log2(inv_de / (a + t1))
    l12[0] = r1 + r2 + 0.5 * log2(inv_de * s2)
    de[0] = 1.0 / inv_de
    rho2[0] = q1 * q2 / ((1.0 + q1) * (1.0 + q2))


def feasible_l2(params, r1, r2, p1, p2, jscc):
    cdef double s2, w2, g1, g2, n1, n2, d, tol
    s2, w2, g1, g2, n1, n2, d, tol = params
    b = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (r1, r2, p1, p2)))
    shape = b[0].shape
    cdef double[::1] R1 = np.ascontiguousarray(b[0]).ravel()
    cdef double[::1] R2 = np.ascontiguousarray(b[1]).ravel()
    cdef double[::1] P1 = np.ascontiguousarray(b[2]).ravel()
    cdef double[::1] P2 = np.ascontiguousarray(b[3]).ravel()
    cdef Py_ssize_t N = R1.shape[0], k
    out = np.empty(N, dtype=bool)
    cdef cnp.npy_bool[::1] o = out
    cdef double l1, l2, l12, de, rho2
    cdef bint jj = bool(jscc)
    for k in range(N):
        _lhs(R1[k], R2[k], s2, n1, n2, &l1, &l2, &l12, &de, &rho2)
        o[k] = _feasible(s2, w2, g1, g2, n1, n2, d, tol, l1, l2, l12, de, rho2,
                         P1[k], P2[k], jj)
    return out.reshape(shape)


def min_p2_l2(params, r1, r2, p1, double pmax, jscc, int n_bisect=48):
    cdef double s2, w2, g1, g2, n1, n2, d, tol
    s2, w2, g1, g2, n1, n2, d, tol = params
    b = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (r1, r2, p1)))
    cdef double[::1] R1 = np.ascontiguousarray(b[0]).ravel()
    cdef double[::1] R2 = np.ascontiguousarray(b[1]).ravel()
    cdef double[::1] P1 = np.ascontiguousarray(b[2]).ravel()
    cdef Py_ssize_t N = R1.shape[0], k
    cdef int it
    out = np.empty(N)
    cdef double[::1] o = out
    cdef double l1, l2, l12, de, rho2, lo, hi, mid
    cdef bint jj = bool(jscc)
    with nogil:
        for k in range(N):
            _lhs(R1[k], R2[k], s2, n1, n2, &l1, &l2, &l12, &de, &rho2)
            if not _feasible(s2, w2, g1, g2, n1, n2, d, tol, l1, l2, l12, de, rho2,
                             P1[k], pmax, jj):
                o[k] = NAN
                continue
            if _feasible(s2, w2, g1, g2, n1, n2, d, tol, l1, l2, l12, de, rho2,
                         P1[k], 0.0, jj):
                o[k] = 0.0
                continue
            lo = 0.0
            hi = pmax
            for it in range(n_bisect):
                mid = 0.5 * (lo + hi)
                if _feasible(s2, w2, g1, g2, n1, n2, d, tol, l1, l2, l12, de, rho2,
                             P1[k], mid, jj):
                    hi = mid
                else:
                    lo = mid
            o[k] = hi
    return out


def uncoded_mse_l2(params, p1, p2):
    cdef double s2, w2, g1, g2, n1, n2
    s2, w2, g1, g2, n1, n2 = params[:6]
    b = np.broadcast_arrays(np.asarray(p1, dtype=float), np.asarray(p2, dtype=float))
    shape = b[0].shape
    cdef double[::1] P1 = np.ascontiguousarray(b[0]).ravel()
    cdef double[::1] P2 = np.ascontiguousarray(b[1]).ravel()
    cdef Py_ssize_t N = P1.shape[0], k
    out = np.empty(N)
    cdef double[::1] o = out
    cdef double rho = s2 / sqrt((s2 + n1) * (s2 + n2))
    cdef double x1, x2, num, den
    cdef double f1 = n1 / (s2 + n1), f2 = n2 / (s2 + n2)
    with nogil:
        for k in range(N):
            x1 = P1[k] * g1
            x2 = P2[k] * g2
            num = x1 * f1 + x2 * f2 + w2
            den = x1 + x2 + 2.0 * rho * sqrt(x1 * x2) + w2
            o[k] = s2 * num / den
    return out.reshape(shape)
