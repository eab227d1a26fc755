# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot kernels; see ``_pykernels`` for the contract."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs, exp, log, lgamma, copysign

cnp.import_array()

cdef double _TINY = 1e-300


def jacobi_eigh(a, double tol=1e-14, int max_sweeps=60):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] A = np.array(a, dtype=np.float64, order="C", copy=True)
    cdef Py_ssize_t n = A.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] V = np.eye(n)
    cdef double[:, ::1] av = A
    cdef double[:, ::1] vv = V
    cdef Py_ssize_t p, q, r
    cdef double norm = 0.0, off, apq, theta, t, c, s, tau, g, h, app, aqq
    cdef int sweep, sweeps = -1
    for p in range(n):
        for q in range(n):
            norm += av[p, q] * av[p, q]
    norm = sqrt(norm)
    if n == 1 or norm == 0.0:
        sweeps = 0
    else:
        for sweep in range(max_sweeps + 1):
            off = 0.0
            for p in range(n):
                for q in range(n):
                    if p != q:
                        off += av[p, q] * av[p, q]
            off = sqrt(off)
            if off <= tol * norm:
                sweeps = sweep
                break
            if sweep == max_sweeps:
                break
            for p in range(n - 1):
                for q in range(p + 1, n):
                    apq = av[p, q]
                    if fabs(apq) < _TINY:
                        continue
                    app = av[p, p]
                    aqq = av[q, q]
                    theta = (aqq - app) / (2.0 * apq)
                    if fabs(theta) > 1e150:
                        t = 0.5 / theta
                    else:
                        t = copysign(1.0, theta) / (fabs(theta) + sqrt(theta * theta + 1.0))
                    c = 1.0 / sqrt(t * t + 1.0)
                    s = t * c
                    tau = s / (1.0 + c)
                    for r in range(n):
                        if r == p or r == q:
                            continue
                        g = av[r, p]
                        h = av[r, q]
                        av[r, p] = g - s * (h + g * tau)
                        av[r, q] = h + s * (g - h * tau)
                        av[p, r] = av[r, p]
                        av[q, r] = av[r, q]
                    av[p, p] = app - t * apq
                    av[q, q] = aqq + t * apq
                    av[p, q] = 0.0
                    av[q, p] = 0.0
                    for r in range(n):
                        g = vv[r, p]
                        h = vv[r, q]
                        vv[r, p] = g - s * (h + g * tau)
                        vv[r, q] = h + s * (g - h * tau)
    w = np.diag(A).copy()
    order = np.argsort(w, kind="stable")
    return w[order], V[:, order], sweeps


def hyp2f1_a1_series(double b, double c, double z, double rel_tol=1e-15, long max_terms=10000):
    cdef double total = 1.0, comp = 0.0, term = 1.0, ratio, tt, r_next, bound, tail
    cdef long k
    for k in range(max_terms):
        ratio = (b + k) / (c + k) * z
        term *= ratio
        tt = total + term
        if fabs(total) >= fabs(term):
            comp += (total - tt) + term
        else:
            comp += (term - tt) + total
        total = tt
        r_next = fabs((b + k + 1) / (c + k + 1) * z)
        if b >= c:
            bound = r_next
        else:
            bound = r_next if r_next > fabs(z) else fabs(z)
        if bound < 1.0:
            tail = fabs(term) * bound / (1.0 - bound)
            if tail <= rel_tol * fabs(total + comp):
                return total + comp, k + 1, True
        if term == 0.0:
            return total + comp, k + 1, True
    return total + comp, max_terms, False


cdef double _lower_gamma(double s, double x, double rel_tol, long max_terms, bint* ok) nogil:
    cdef double lg, ap, term, total, bb, cc, dd, h, an, delta, upper
    cdef long i
    if x == 0.0:
        return 0.0
    lg = lgamma(s)
    if x < s + 1.0:
        ap = s
        term = 1.0 / s
        total = term
        for i in range(max_terms):
            ap += 1.0
            term *= x / ap
            total += term
            if fabs(term) < fabs(total) * rel_tol:
                return total * exp(-x + s * log(x))
        ok[0] = False
        return total * exp(-x + s * log(x))
    bb = x + 1.0 - s
    cc = 1.0 / _TINY
    dd = 1.0 / bb
    h = dd
    for i in range(1, max_terms + 1):
        an = -i * (i - s)
        bb += 2.0
        dd = an * dd + bb
        if fabs(dd) < _TINY:
            dd = _TINY
        cc = bb + an / cc
        if fabs(cc) < _TINY:
            cc = _TINY
        dd = 1.0 / dd
        delta = dd * cc
        h *= delta
        if fabs(delta - 1.0) < rel_tol:
            upper = exp(-x + s * log(x) - lg) * h
            return exp(lg) * (1.0 - upper)
    ok[0] = False
    upper = exp(-x + s * log(x) - lg) * h
    return exp(lg) * (1.0 - upper)


def lower_gamma_array(double s, x, double rel_tol=1e-15, long max_terms=10000):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] xin = np.ascontiguousarray(np.ravel(x), dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(xin.shape[0])
    cdef double[::1] xv = xin
    cdef double[::1] ov = out
    cdef bint ok = True
    cdef Py_ssize_t i
    for i in range(xin.shape[0]):
        ov[i] = _lower_gamma(s, xv[i], rel_tol, max_terms, &ok)
    return out.reshape(np.shape(x)), bool(ok)


def laguerre_table(int m, double beta, x):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] xin = np.ascontiguousarray(np.ravel(x), dtype=np.float64)
    cdef Py_ssize_t npts = xin.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.empty((m + 1, npts))
    cdef double[::1] xv = xin
    cdef double[:, ::1] ov = out
    cdef Py_ssize_t i
    cdef int k
    cdef double xi
    for i in range(npts):
        xi = xv[i]
        ov[0, i] = 1.0
        if m >= 1:
            ov[1, i] = 1.0 + beta - xi
        for k in range(1, m):
            ov[k + 1, i] = ((2 * k + 1 + beta - xi) * ov[k, i] - (k + beta) * ov[k - 1, i]) / (k + 1)
    return out.reshape((m + 1,) + np.shape(x))
