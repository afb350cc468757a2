# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernel: field evaluation and the RK 2(3) stepping loop.

Semantics match ratecert._kernels_py; that module is the fallback when this
extension is not built.
"""

import numpy as np

from libc.math cimport fabs, pow, sqrt

IS_NATIVE = True

DONE = 0
STOPPED = 1
UNDERFLOW = 2
MAX_STEPS = 3


cdef inline double _ipow(double x, long e) nogil:
    cdef double r = 1.0
    cdef double b = x
    cdef long n = e
    if n < 0:
        return pow(x, <double> e)
    while n:
        if n & 1:
            r *= b
        b *= b
        n >>= 1
    return r


cdef void _eval_field(
    int kind,
    double[::1] coeffs,
    long[::1] offsets,
    long[:, ::1] iexp,
    long[:, ::1] sexp,
    double[:, ::1] aexp,
    double* x,
    double* out,
    int n,
) nogil:
    cdef int comp, i
    cdef long k
    cdef double acc, v, xi, a
    cdef long s
    for comp in range(n):
        acc = 0.0
        for k in range(offsets[comp], offsets[comp + 1]):
            v = coeffs[k]
            if kind == 0:
                for i in range(n):
                    if iexp[k, i] != 0:
                        v *= _ipow(x[i], iexp[k, i])
            else:
                for i in range(n):
                    xi = x[i]
                    a = aexp[k, i]
                    if a != 0.0:
                        v *= pow(fabs(xi), a)
                    if sexp[k, i] != 0:
                        if xi > 0.0:
                            pass
                        elif xi < 0.0:
                            v = -v
                        else:
                            v = 0.0
            acc += v
        out[comp] = acc


def eval_field(kind, coeffs, offsets, iexp, sexp, aexp, x):
    cdef double[::1] cf = np.ascontiguousarray(coeffs, dtype=np.float64)
    cdef long[::1] off = np.ascontiguousarray(offsets, dtype=np.int64)
    cdef long[:, ::1] ie = np.ascontiguousarray(iexp, dtype=np.int64)
    cdef long[:, ::1] se = np.ascontiguousarray(sexp, dtype=np.int64)
    cdef double[:, ::1] ae = np.ascontiguousarray(aexp, dtype=np.float64)
    xa = np.ascontiguousarray(x, dtype=np.float64)
    cdef double[::1] xv = xa
    cdef int n = xa.shape[0]
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] ov = out
    _eval_field(<int> kind, cf, off, ie, se, ae, &xv[0], &ov[0], n)
    return out


cdef inline double _norm(double* v, int n) nogil:
    cdef double s = 0.0
    cdef int i
    for i in range(n):
        s += v[i] * v[i]
    return sqrt(s)


def rk23_integrate(
    kind,
    coeffs,
    offsets,
    iexp,
    sexp,
    aexp,
    x0,
    double t_end,
    double rtol,
    double atol,
    long max_steps,
    double stop_norm,
):
    cdef double[::1] cf = np.ascontiguousarray(coeffs, dtype=np.float64)
    cdef long[::1] off = np.ascontiguousarray(offsets, dtype=np.int64)
    cdef long[:, ::1] ie = np.ascontiguousarray(iexp, dtype=np.int64)
    cdef long[:, ::1] se = np.ascontiguousarray(sexp, dtype=np.int64)
    cdef double[:, ::1] ae = np.ascontiguousarray(aexp, dtype=np.float64)
    cdef int ikind = <int> kind

    x0a = np.ascontiguousarray(x0, dtype=np.float64)
    cdef int n = x0a.shape[0]

    cdef long cap = 1024
    ts_arr = np.empty(cap, dtype=np.float64)
    xs_arr = np.empty((cap, n), dtype=np.float64)
    fs_arr = np.empty((cap, n), dtype=np.float64)
    cdef double[::1] ts = ts_arr
    cdef double[:, ::1] xs = xs_arr
    cdef double[:, ::1] fs = fs_arr

    work = np.empty((7, n), dtype=np.float64)
    cdef double[:, ::1] w = work
    cdef double* x = &w[0, 0]
    cdef double* k1 = &w[1, 0]
    cdef double* k2 = &w[2, 0]
    cdef double* k3 = &w[3, 0]
    cdef double* k4 = &w[4, 0]
    cdef double* x_new = &w[5, 0]
    cdef double* stage = &w[6, 0]

    cdef int i
    for i in range(n):
        x[i] = x0a[i]

    _eval_field(ikind, cf, off, ie, se, ae, x, k1, n)

    cdef long count = 0
    ts[0] = 0.0
    for i in range(n):
        xs[0, i] = x[i]
        fs[0, i] = k1[i]
    count = 1

    if t_end <= 0.0:
        return DONE, ts_arr[:1].copy(), xs_arr[:1].copy(), fs_arr[:1].copy(), 0, 0, 0.0

    cdef double d0 = _norm(x, n)
    cdef double d1 = _norm(k1, n)
    cdef double h = 0.01 * (d0 + atol) / (d1 + 1e-300)
    if h < 1e-300:
        h = 1e-300
    if h > t_end:
        h = t_end

    cdef double t = 0.0
    cdef long n_accept = 0
    cdef long n_reject = 0
    cdef double max_ratio = 0.0
    cdef double eps = 2.220446049250313e-16
    cdef int status = MAX_STEPS
    cdef long step
    cdef double err_norm, tol, factor, e
    cdef double nx, nxn

    for step in range(max_steps):
        if t >= t_end:
            status = DONE
            break
        if h > t_end - t:
            h = t_end - t

        for i in range(n):
            stage[i] = x[i] + (0.5 * h) * k1[i]
        _eval_field(ikind, cf, off, ie, se, ae, stage, k2, n)
        for i in range(n):
            stage[i] = x[i] + (0.75 * h) * k2[i]
        _eval_field(ikind, cf, off, ie, se, ae, stage, k3, n)
        for i in range(n):
            x_new[i] = x[i] + h * (
                (2.0 / 9.0) * k1[i] + (1.0 / 3.0) * k2[i] + (4.0 / 9.0) * k3[i]
            )
        _eval_field(ikind, cf, off, ie, se, ae, x_new, k4, n)

        err_norm = 0.0
        for i in range(n):
            e = h * (
                (-5.0 / 72.0) * k1[i]
                + (1.0 / 12.0) * k2[i]
                + (1.0 / 9.0) * k3[i]
                - (1.0 / 8.0) * k4[i]
            )
            err_norm += e * e
        err_norm = sqrt(err_norm)
        nx = _norm(x, n)
        nxn = _norm(x_new, n)
        tol = atol + rtol * (nx if nx > nxn else nxn)

        if err_norm <= tol:
            t = t + h
            for i in range(n):
                x[i] = x_new[i]
                k1[i] = k4[i]
            if count == cap:
                cap *= 2
                ts_arr = np.resize(ts_arr, cap)
                xs_arr = np.resize(xs_arr, (cap, n))
                fs_arr = np.resize(fs_arr, (cap, n))
                ts = ts_arr
                xs = xs_arr
                fs = fs_arr
            ts[count] = t
            for i in range(n):
                xs[count, i] = x[i]
                fs[count, i] = k1[i]
            count += 1
            n_accept += 1
            if tol > 0.0 and err_norm / tol > max_ratio:
                max_ratio = err_norm / tol
            if stop_norm > 0.0 and _norm(x, n) <= stop_norm:
                status = STOPPED
                break
            if t >= t_end:
                status = DONE
                break
        else:
            n_reject += 1

        if err_norm == 0.0:
            factor = 5.0
        else:
            factor = 0.9 * pow(tol / err_norm, 1.0 / 3.0)
            if factor > 5.0:
                factor = 5.0
            elif factor < 0.2:
                factor = 0.2
        h = h * factor
        if h < 16.0 * eps * (t if t > 1.0 else 1.0):
            status = UNDERFLOW
            break

    return (
        status,
        ts_arr[:count].copy(),
        xs_arr[:count].copy(),
        fs_arr[:count].copy(),
        n_accept,
        n_reject,
        max_ratio,
    )
