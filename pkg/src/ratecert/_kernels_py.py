"""Pure NumPy fallback for the hot integration kernel.

Mirrors ratecert._native operation-for-operation; selected by
ratecert.kernels when the compiled extension is unavailable or disabled.
"""

from __future__ import annotations

import numpy as np

IS_NATIVE = False

# status codes shared with the native kernel
DONE = 0
STOPPED = 1
UNDERFLOW = 2
MAX_STEPS = 3


def eval_field(kind, coeffs, offsets, iexp, sexp, aexp, x):
    """Evaluate all components of a compiled field at state x."""
    x = np.asarray(x, dtype=float)
    if kind == 0:
        with np.errstate(divide="ignore", invalid="ignore"):
            powers = np.power(x[None, :], iexp)
        powers = np.where(iexp == 0, 1.0, powers)
        vals = coeffs * np.prod(powers, axis=1)
    else:
        absx = np.abs(x)
        with np.errstate(divide="ignore", invalid="ignore"):
            base = np.power(absx[None, :], aexp)
        base = np.where(aexp == 0.0, 1.0, base)
        sgn = np.where(sexp != 0, np.sign(x)[None, :], 1.0)
        vals = coeffs * np.prod(base * sgn, axis=1)
    sums = np.add.reduceat(vals, offsets[:-1])
    return sums


def rk23_integrate(
    kind,
    coeffs,
    offsets,
    iexp,
    sexp,
    aexp,
    x0,
    t_end,
    rtol,
    atol,
    max_steps,
    stop_norm,
):
    """Adaptive Bogacki-Shampine 2(3) integration of dx/dt = f(x).

    Returns (status, ts, xs, fs, n_accept, n_reject, max_err_ratio); fs holds
    the derivative at each accepted node for dense cubic-Hermite output.
    """
    n = len(x0)
    x = np.array(x0, dtype=float)

    def f(state):
        return eval_field(kind, coeffs, offsets, iexp, sexp, aexp, state)

    ts = [0.0]
    xs = [x.copy()]
    k1 = f(x)
    fs = [k1.copy()]

    if t_end <= 0.0:
        return DONE, np.array(ts), np.array(xs), np.array(fs), 0, 0, 0.0

    d0 = float(np.linalg.norm(x))
    d1 = float(np.linalg.norm(k1))
    h = 0.01 * (d0 + atol) / (d1 + 1e-300)
    h = min(max(h, 1e-300), t_end)

    t = 0.0
    n_accept = 0
    n_reject = 0
    max_ratio = 0.0
    eps = np.finfo(float).eps
    status = MAX_STEPS

    for _ in range(max_steps):
        if t >= t_end:
            status = DONE
            break
        h = min(h, t_end - t)

        k2 = f(x + (0.5 * h) * k1)
        k3 = f(x + (0.75 * h) * k2)
        x_new = x + h * ((2.0 / 9.0) * k1 + (1.0 / 3.0) * k2 + (4.0 / 9.0) * k3)
        k4 = f(x_new)
        err = h * (
            (-5.0 / 72.0) * k1 + (1.0 / 12.0) * k2 + (1.0 / 9.0) * k3 - (1.0 / 8.0) * k4
        )
        err_norm = float(np.linalg.norm(err))
        tol = atol + rtol * max(float(np.linalg.norm(x)), float(np.linalg.norm(x_new)))

        if err_norm <= tol:
            t = t + h
            x = x_new
            k1 = k4  # first-same-as-last
            ts.append(t)
            xs.append(x.copy())
            fs.append(k1.copy())
            n_accept += 1
            if tol > 0:
                max_ratio = max(max_ratio, err_norm / tol)
            if stop_norm > 0.0 and float(np.linalg.norm(x)) <= stop_norm:
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
            factor = min(5.0, max(0.2, 0.9 * (tol / err_norm) ** (1.0 / 3.0)))
        h = h * factor
        if h < 16.0 * eps * max(t, 1.0):
            status = UNDERFLOW
            break

    return (
        status,
        np.array(ts),
        np.array(xs),
        np.array(fs),
        n_accept,
        n_reject,
        max_ratio,
    )
