# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled replication kernels (hot path).

Same row-block API and semantics as the numpy fallback, with per-row C loops
instead of vectorized passes.  Sums accumulate sequentially, so values agree
with the fallback to rounding (~1e-12 relative) rather than bit for bit;
within this backend results are fully deterministic.
"""

import numpy as np

from ..errors import SolverError

cdef extern from "<complex.h>" nogil:
    double complex clog(double complex)
    double complex cexp(double complex)
    double cabs(double complex)
    double creal(double complex)
    double cimag(double complex)
    double complex conj(double complex)

cdef extern from "<math.h>" nogil:
    double log(double)
    double fabs(double)

cdef double LOG_PI = log(3.141592653589793)
cdef double RECIPROCAL_FLOOR = 1e-300
cdef int MAX_HALVINGS = 60
cdef int MAX_BACKTRACKS = 60
# Rounding slack of the monotone-likelihood test; see the scalar solver.
cdef double LL_SLACK_SCALE = 16.0 * 2.220446049250313e-16

KIND_LOG = 0
KIND_RECIPROCAL = 1

STATUS_OK = 0
STATUS_BOUNDARY = 1
STATUS_BRANCH = 2
STATUS_NO_CONVERGENCE = 3

cdef double complex CI = 1j


cdef inline double complex _score_row(const double[:, ::1] x, Py_ssize_t i,
                                      Py_ssize_t n, double complex t) nogil:
    cdef double complex acc = 0
    cdef double complex tc = conj(t)
    cdef Py_ssize_t j
    for j in range(n):
        acc = acc + (x[i, j] - t) / (x[i, j] - tc)
    return acc / <double> n


cdef inline double _loglik_row(const double[:, ::1] x, Py_ssize_t i,
                               Py_ssize_t n, double complex t) nogil:
    cdef double tr = creal(t)
    cdef double ti = cimag(t)
    cdef double acc = 0.0
    cdef double dx
    cdef Py_ssize_t j
    for j in range(n):
        dx = x[i, j] - tr
        acc += log(dx * dx + ti * ti)
    return (<double> n) * (log(ti) - LOG_PI) - acc


def qam_rows(const double[:, ::1] x, int kind, alpha, shifts):
    """Quasi-arithmetic mean per row; see the fallback backend for the contract."""
    cdef Py_ssize_t m = x.shape[0]
    cdef Py_ssize_t n = x.shape[1]
    cdef double complex a = alpha
    cdef double are = creal(a)
    cdef double aim = cimag(a)
    shifts_arr = np.ascontiguousarray(shifts, dtype=np.float64)
    cdef const double[::1] sh = shifts_arr
    y_arr = np.empty(m, dtype=np.complex128)
    status_arr = np.zeros(m, dtype=np.uint8)
    cdef double complex[::1] y = y_arr
    cdef unsigned char[::1] status = status_arr
    cdef Py_ssize_t i, j
    cdef double complex acc, mean, val
    cdef double xs
    cdef bint branch
    if kind != KIND_LOG and kind != KIND_RECIPROCAL:
        raise ValueError(f"unknown generator kind code {kind!r}")
    for i in range(m):
        acc = 0
        branch = False
        if kind == KIND_LOG:
            for j in range(n):
                xs = x[i, j] - sh[i]
                if aim == 0.0 and xs == -are:
                    branch = True
                    break
                acc = acc + clog(xs + a)
            if branch:
                y[i] = 0
                status[i] = STATUS_BRANCH
                continue
            mean = acc / <double> n
            val = cexp(mean) - a
        else:
            for j in range(n):
                xs = x[i, j] - sh[i]
                acc = acc + 1.0 / (xs + a)
            mean = acc / <double> n
            if cabs(mean) < RECIPROCAL_FLOOR:
                y[i] = 0
                status[i] = STATUS_BRANCH
                continue
            val = 1.0 / mean - a
        val = sh[i] + val
        y[i] = val
        if not cimag(val) > 0.0:
            status[i] = STATUS_BOUNDARY
    return y_arr, status_arr


def score_rows(const double[:, ::1] x, t):
    cdef Py_ssize_t m = x.shape[0]
    cdef Py_ssize_t n = x.shape[1]
    t_arr = np.ascontiguousarray(t, dtype=np.complex128)
    cdef const double complex[::1] tv = t_arr
    out_arr = np.empty(m, dtype=np.complex128)
    cdef double complex[::1] out = out_arr
    cdef Py_ssize_t i
    for i in range(m):
        out[i] = _score_row(x, i, n, tv[i])
    return out_arr


def loglik_rows(const double[:, ::1] x, t):
    cdef Py_ssize_t m = x.shape[0]
    cdef Py_ssize_t n = x.shape[1]
    t_arr = np.ascontiguousarray(t, dtype=np.complex128)
    cdef const double complex[::1] tv = t_arr
    out_arr = np.empty(m, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i
    for i in range(m):
        out[i] = _loglik_row(x, i, n, tv[i])
    return out_arr


def one_step_rows(const double[:, ::1] x, y):
    cdef Py_ssize_t m = x.shape[0]
    cdef Py_ssize_t n = x.shape[1]
    y_arr = np.ascontiguousarray(y, dtype=np.complex128)
    cdef const double complex[::1] yv = y_arr
    z_arr = np.empty(m, dtype=np.complex128)
    halv_arr = np.zeros(m, dtype=np.int32)
    cdef double complex[::1] z = z_arr
    cdef int[::1] halv = halv_arr
    cdef Py_ssize_t i
    cdef double complex t, s, step, cand
    cdef int k
    for i in range(m):
        t = yv[i]
        s = _score_row(x, i, n, t)
        step = (2.0 * cimag(t)) * s * CI
        cand = t + step
        k = 0
        while not cimag(cand) > 0.0:
            k += 1
            if k > MAX_HALVINGS:
                raise SolverError("step halving failed to restore Im > 0")
            step = step * 0.5
            cand = t + step
        z[i] = cand
        halv[i] = k
    return z_arr, halv_arr


def mle_rows(const double[:, ::1] x, start, double score_tol, double step_tol,
             int max_iters):
    cdef Py_ssize_t m = x.shape[0]
    cdef Py_ssize_t n = x.shape[1]
    start_arr = np.ascontiguousarray(start, dtype=np.complex128)
    cdef const double complex[::1] sv = start_arr
    theta_arr = np.empty(m, dtype=np.complex128)
    iters_arr = np.zeros(m, dtype=np.int32)
    norm_arr = np.empty(m, dtype=np.float64)
    conv_arr = np.zeros(m, dtype=np.bool_)
    cdef double complex[::1] thv = theta_arr
    cdef int[::1] itv = iters_arr
    cdef double[::1] nov = norm_arr
    cdef unsigned char[::1] cov = conv_arr.view(np.uint8)
    cdef Py_ssize_t i
    cdef double complex theta, s, step, cand
    cdef double ll, ll_cand, lam, norm, moved, final, slack
    cdef int iters, b
    cdef bint accepted, have_final
    for i in range(m):
        theta = sv[i]
        ll = _loglik_row(x, i, n, theta)
        iters = 0
        have_final = False
        final = 0.0
        while iters < max_iters:
            s = _score_row(x, i, n, theta)
            norm = cabs(s)
            if norm < score_tol:
                final = norm
                have_final = True
                break
            step = (2.0 * cimag(theta)) * s * CI
            lam = 1.0
            accepted = False
            cand = theta
            ll_cand = ll
            slack = LL_SLACK_SCALE * (1.0 + fabs(ll))
            for b in range(MAX_BACKTRACKS):
                cand = theta + lam * step
                if cimag(cand) > 0.0:
                    ll_cand = _loglik_row(x, i, n, cand)
                    if ll_cand >= ll - slack:
                        accepted = True
                        break
                lam *= 0.5
            if not accepted:
                final = norm
                have_final = True
                break
            moved = cabs(cand - theta) / cimag(theta)
            theta = cand
            ll = ll_cand
            iters += 1
            if moved < step_tol:
                break
        if not have_final:
            final = cabs(_score_row(x, i, n, theta))
        thv[i] = theta
        itv[i] = iters
        nov[i] = final
        cov[i] = 1 if final < score_tol else 0
    return theta_arr, iters_arr, norm_arr, conv_arr
