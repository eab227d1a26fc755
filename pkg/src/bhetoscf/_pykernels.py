"""Pure-Python/numpy implementations of the hot numerical kernels.

Every function here has a twin with the same signature in ``_ckernels.pyx``.
``bhetoscf.kernels`` picks the compiled module when it imports cleanly and
falls back to this one otherwise.
"""

import math

import numpy as np

_EPS = np.finfo(float).eps
_TINY = 1e-300


def jacobi_eigh(a, tol=1e-14, max_sweeps=60):
    """Cyclic-sweep Jacobi diagonalization of a real symmetric matrix.

    Returns ``(w, v, sweeps)`` with eigenvalues ascending and eigenvectors in
    the columns of ``v``.  ``sweeps`` is -1 when the off-diagonal norm did
    not fall below ``tol * ||a||_F`` within ``max_sweeps`` sweeps.
    """
    a = np.array(a, dtype=float, copy=True)
    n = a.shape[0]
    v = np.eye(n)
    norm = math.sqrt(float(np.sum(a * a)))
    sweeps = -1
    if n == 1 or norm == 0.0:
        sweeps = 0
    else:
        for sweep in range(max_sweeps + 1):
            offd = a - np.diag(np.diag(a))
            off = math.sqrt(float(np.sum(offd * offd)))
            if off <= tol * norm:
                sweeps = sweep
                break
            if sweep == max_sweeps:
                break
            for p in range(n - 1):
                for q in range(p + 1, n):
                    apq = a[p, q]
                    if abs(apq) < _TINY:
                        continue
                    theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                    if abs(theta) > 1e150:
                        t = 0.5 / theta
                    else:
                        t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                    c = 1.0 / math.sqrt(t * t + 1.0)
                    s = t * c
                    tau = s / (1.0 + c)
                    gp = a[:, p].copy()
                    gq = a[:, q].copy()
                    a[:, p] = gp - s * (gq + gp * tau)
                    a[:, q] = gq + s * (gp - gq * tau)
                    a[p, :] = a[:, p]
                    a[q, :] = a[:, q]
                    a[p, p] = gp[p] - t * apq
                    a[q, q] = gq[q] + t * apq
                    a[p, q] = a[q, p] = 0.0
                    vp = v[:, p].copy()
                    vq = v[:, q].copy()
                    v[:, p] = vp - s * (vq + vp * tau)
                    v[:, q] = vq + s * (vp - vq * tau)
    w = np.diag(a).copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order], sweeps


def hyp2f1_a1_series(b, c, z, rel_tol=1e-15, max_terms=10000):
    """Sum 2F1(1, b; c; z) = sum_k (b)_k / (c)_k z^k with a rigorous tail test.

    Returns ``(value, nterms, converged)``.  Summation is compensated
    (Neumaier), which keeps the long positive-term sums near z -> 1 accurate.
    """
    total = 1.0
    comp = 0.0
    term = 1.0
    for k in range(max_terms):
        ratio = (b + k) / (c + k) * z
        term *= ratio
        t = total + term
        if abs(total) >= abs(term):
            comp += (total - t) + term
        else:
            comp += (term - t) + total
        total = t
        # geometric bound on the remaining tail once the ratio is below one
        r_next = abs((b + k + 1) / (c + k + 1) * z)
        bound = r_next if b >= c else max(r_next, abs(z))
        if bound < 1.0:
            tail = abs(term) * bound / (1.0 - bound)
            if tail <= rel_tol * abs(total + comp):
                return total + comp, k + 1, True
        if term == 0.0:
            return total + comp, k + 1, True
    return total + comp, max_terms, False


def _lower_gamma_scalar(s, x, rel_tol, max_terms):
    if x == 0.0:
        return 0.0, True
    lg = math.lgamma(s)
    if x < s + 1.0:
        # gamma(s, x) = x^s e^-x sum_k x^k / (s (s+1) ... (s+k))
        ap = s
        term = 1.0 / s
        total = term
        for _ in range(max_terms):
            ap += 1.0
            term *= x / ap
            total += term
            if abs(term) < abs(total) * rel_tol:
                return total * math.exp(-x + s * math.log(x)), True
        return total * math.exp(-x + s * math.log(x)), False
    # upper function by modified Lentz continued fraction, then complement
    bb = x + 1.0 - s
    cc = 1.0 / _TINY
    dd = 1.0 / bb
    h = dd
    converged = False
    for i in range(1, max_terms + 1):
        an = -i * (i - s)
        bb += 2.0
        dd = an * dd + bb
        if abs(dd) < _TINY:
            dd = _TINY
        cc = bb + an / cc
        if abs(cc) < _TINY:
            cc = _TINY
        dd = 1.0 / dd
        delta = dd * cc
        h *= delta
        if abs(delta - 1.0) < rel_tol:
            converged = True
            break
    upper = math.exp(-x + s * math.log(x) - lg) * h
    return math.exp(lg) * (1.0 - upper), converged


def lower_gamma_array(s, x, rel_tol=1e-15, max_terms=10000):
    """Lower incomplete gamma over an array of arguments.

    Returns ``(values, all_converged)``.
    """
    x = np.asarray(x, dtype=float)
    out = np.empty(x.shape)
    ok = True
    flat_in = x.ravel()
    flat_out = out.ravel()
    for i in range(flat_in.size):
        val, conv = _lower_gamma_scalar(s, float(flat_in[i]), rel_tol, max_terms)
        flat_out[i] = val
        ok = ok and conv
    return out, ok


def laguerre_table(m, beta, x):
    """Rows L^beta_0(x) .. L^beta_m(x) by the three-term recurrence in degree."""
    x = np.asarray(x, dtype=float)
    out = np.empty((m + 1,) + x.shape)
    out[0] = 1.0
    if m >= 1:
        out[1] = 1.0 + beta - x
    for k in range(1, m):
        out[k + 1] = ((2 * k + 1 + beta - x) * out[k] - (k + beta) * out[k - 1]) / (k + 1)
    return out
