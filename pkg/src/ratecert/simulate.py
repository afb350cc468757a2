"""Trajectory integration and simulation-based rate/gain estimators.

The integrator is an explicit embedded Runge-Kutta 2(3) pair
(Bogacki-Shampine coefficients) with proportional step control on
rel_tol*||x|| + abs_tol, so step selection switches to absolute-error
dominance near the origin; dense output is cubic Hermite on the accepted
nodes. The stepping loop lives in ratecert.kernels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import kernels
from .beta import AlphaMeasure, BetaFamily, pointwise_bound
from .polynomials import Polynomial, PolyVectorField
from .signed_power import SignedPowerExpr


class StepSizeUnderflow(RuntimeError):
    def __init__(self, t: float):
        super().__init__(f"step size underflow at t={t:.6g} (likely blow-up)")
        self.t = t


class IntegrationError(RuntimeError):
    pass


class GainViolation(RuntimeError):
    """The trajectory bound fails already at rate zero."""

    def __init__(self, message: str, ic=None, time: float = 0.0):
        super().__init__(message)
        self.ic = ic
        self.time = time


class NotSettled(Exception):
    pass


@dataclass(frozen=True)
class CompiledField:
    kind: int  # 0 polynomial, 1 signed-power
    nvars: int
    coeffs: np.ndarray
    offsets: np.ndarray
    iexp: np.ndarray
    sexp: np.ndarray
    aexp: np.ndarray

    def __call__(self, x) -> np.ndarray:
        return kernels.eval_field(
            self.kind, self.coeffs, self.offsets, self.iexp, self.sexp, self.aexp, x
        )


def compile_field(field_in) -> CompiledField:
    """Pack a PolyVectorField or list of SignedPowerExpr into flat arrays."""
    if isinstance(field_in, CompiledField):
        return field_in
    if isinstance(field_in, PolyVectorField):
        comps = field_in.components
        n = field_in.nvars
        coeffs, exps, offsets = [], [], [0]
        for p in comps:
            items = sorted(p.terms.items()) or [((0,) * n, 0.0)]
            for m, c in items:
                coeffs.append(c)
                exps.append(m)
            offsets.append(len(coeffs))
        k = len(coeffs)
        return CompiledField(
            kind=0,
            nvars=n,
            coeffs=np.array(coeffs, dtype=float),
            offsets=np.array(offsets, dtype=np.int64),
            iexp=np.array(exps, dtype=np.int64).reshape(k, n),
            sexp=np.zeros((k, n), dtype=np.int64),
            aexp=np.zeros((k, n), dtype=float),
        )
    comps = list(field_in)
    if not comps or not isinstance(comps[0], SignedPowerExpr):
        raise TypeError("expected PolyVectorField or a list of SignedPowerExpr")
    n = comps[0].nvars
    coeffs, sexps, aexps, offsets = [], [], [], [0]
    for e in comps:
        items = sorted(
            e.terms.items(), key=lambda kv: (kv[0][0], tuple(map(float, kv[0][1])))
        ) or [(((0,) * n, (0,) * n), 0.0)]
        for (s, a), c in items:
            coeffs.append(c)
            sexps.append(s)
            aexps.append([float(x) for x in a])
        offsets.append(len(coeffs))
    k = len(coeffs)
    return CompiledField(
        kind=1,
        nvars=n,
        coeffs=np.array(coeffs, dtype=float),
        offsets=np.array(offsets, dtype=np.int64),
        iexp=np.zeros((k, n), dtype=np.int64),
        sexp=np.array(sexps, dtype=np.int64).reshape(k, n),
        aexp=np.array(aexps, dtype=float).reshape(k, n),
    )


@dataclass
class IntegrationStats:
    accepted: int
    rejected: int
    max_error_ratio: float


@dataclass
class Trajectory:
    times: np.ndarray          # strictly increasing, starts at 0
    states: np.ndarray         # (N, n); first row is the initial condition
    derivs: np.ndarray         # f(x) at each node
    stats: IntegrationStats
    settled: bool = False      # hit the early-stop norm threshold

    def __post_init__(self):
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("trajectory times must be strictly increasing")

    @property
    def t_end(self) -> float:
        return float(self.times[-1])

    def eval(self, t) -> np.ndarray:
        """Dense output by cubic Hermite interpolation on the nodes."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        if np.any(t < self.times[0] - 1e-12) or np.any(t > self.times[-1] + 1e-12):
            raise ValueError("interpolation time outside trajectory range")
        idx = np.clip(np.searchsorted(self.times, t, side="right") - 1, 0,
                      len(self.times) - 2)
        t0 = self.times[idx]
        t1 = self.times[idx + 1]
        h = t1 - t0
        s = np.clip((t - t0) / h, 0.0, 1.0)[:, None]
        x0, x1 = self.states[idx], self.states[idx + 1]
        f0, f1 = self.derivs[idx], self.derivs[idx + 1]
        h = h[:, None]
        h00 = (1 + 2 * s) * (1 - s) ** 2
        h10 = s * (1 - s) ** 2
        h01 = s * s * (3 - 2 * s)
        h11 = s * s * (s - 1)
        out = h00 * x0 + h10 * h * f0 + h01 * x1 + h11 * h * f1
        return out if out.shape[0] > 1 else out[0]

    def alpha_series(self, alpha: AlphaMeasure) -> np.ndarray:
        return alpha.many(self.states)


def integrate(
    field_in,
    x0,
    t_end: float,
    rel_tol: float = 1e-6,
    abs_tol: float = 1e-9,
    max_steps: int = 5_000_000,
    stop_norm: float = 0.0,
) -> Trajectory:
    """Integrate dx/dt = f(x) from x0 over [0, t_end].

    Raises StepSizeUnderflow when the controller collapses (finite-time
    blow-up) and IntegrationError when max_steps is exhausted. stop_norm > 0
    halts the run once ||x|| drops below it (used for settled systems).
    """
    cf = compile_field(field_in)
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (cf.nvars,):
        raise ValueError(f"initial condition must have shape ({cf.nvars},)")
    status, ts, xs, fs, n_acc, n_rej, max_ratio = kernels.rk23_integrate(
        cf.kind,
        cf.coeffs,
        cf.offsets,
        cf.iexp,
        cf.sexp,
        cf.aexp,
        x0,
        float(t_end),
        float(rel_tol),
        float(abs_tol),
        int(max_steps),
        float(stop_norm),
    )
    stats = IntegrationStats(int(n_acc), int(n_rej), float(max_ratio))
    if status == kernels.UNDERFLOW:
        raise StepSizeUnderflow(float(ts[-1]))
    if status == kernels.MAX_STEPS:
        raise IntegrationError(
            f"max_steps={max_steps} exhausted at t={ts[-1]:.6g}"
        )
    return Trajectory(ts, xs, fs, stats, settled=(status == kernels.STOPPED))


def average_log_slope(traj: Trajectory, t0: float, t1: float) -> float:
    """Mean decay rate of ||x|| between t0 and t1: (ln||x(t0)||-ln||x(t1)||)/(t1-t0)."""
    a = np.linalg.norm(traj.eval(t0))
    b = np.linalg.norm(traj.eval(t1))
    return (math.log(a) - math.log(b)) / (t1 - t0)


# -- initial-condition generators ---------------------------------------


def sphere_points(nvars: int, count: int, radius: float, seed: int = 0) -> np.ndarray:
    """Deterministic well-spread points on a sphere.

    2-D: uniform angles; 3-D: Fibonacci lattice; higher dimensions fall back
    to seeded normalized Gaussians.
    """
    if nvars == 1:
        pts = np.array([[radius], [-radius]] * ((count + 1) // 2))[:count]
        return pts
    if nvars == 2:
        ang = 2 * np.pi * np.arange(count) / count
        return radius * np.stack([np.cos(ang), np.sin(ang)], axis=1)
    if nvars == 3:
        i = np.arange(count) + 0.5
        phi = np.arccos(1 - 2 * i / count)
        golden = np.pi * (1 + 5 ** 0.5)
        theta = golden * i
        return radius * np.stack(
            [np.sin(phi) * np.cos(theta), np.sin(phi) * np.sin(theta), np.cos(phi)],
            axis=1,
        )
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((count, nvars))
    return radius * g / np.linalg.norm(g, axis=1, keepdims=True)


def disk_points(count: int, radius: float, seed: int = 0,
                boundary_fraction: float = 0.5) -> np.ndarray:
    """Points in the closed 2-D disk: a boundary ring plus area-uniform fill."""
    n_b = int(count * boundary_fraction)
    rng = np.random.default_rng(seed)
    pts = []
    if n_b:
        pts.append(sphere_points(2, n_b, radius))
    n_i = count - n_b
    if n_i:
        r = radius * np.sqrt(rng.uniform(size=n_i))
        a = rng.uniform(0, 2 * np.pi, size=n_i)
        pts.append(np.stack([r * np.cos(a), r * np.sin(a)], axis=1))
    return np.concatenate(pts, axis=0)


# -- settling time -------------------------------------------------------


def settling_time(
    traj: Trajectory, alpha: AlphaMeasure, threshold: float | None = None
) -> float | None:
    """First time alpha(x(t)) <= threshold, linearly interpolated.

    Default threshold is 1e-9 * alpha(x0). Returns None when the trajectory
    never settles within its horizon.
    """
    a = traj.alpha_series(alpha)
    if threshold is None:
        threshold = 1e-9 * a[0]
    if a[0] <= threshold:
        return 0.0
    below = np.nonzero(a <= threshold)[0]
    if below.size == 0:
        return None
    j = int(below[0])
    t0, t1 = traj.times[j - 1], traj.times[j]
    a0, a1 = a[j - 1], a[j]
    if a0 == a1:
        return float(t1)
    return float(t0 + (a0 - threshold) / (a0 - a1) * (t1 - t0))


# -- rate estimation -------------------------------------------------------


@dataclass
class RateEstimate:
    k_sim: float
    M: float
    family: BetaFamily
    horizon: float
    ic_count: int
    ic_rule: str
    worst_ic: np.ndarray | None
    worst_time: float
    rel_tol: float
    method: str = "pointwise"
    trajectories: list = field(default_factory=list, repr=False)


def _stop_norm_for(alpha: AlphaMeasure, nvars: int, threshold: float) -> float:
    # ||x||_2 <= s implies alpha(x) <= n^(eta/p) * s^eta for the quasi-norm
    # measures, so this stop value is safely below the alpha threshold.
    if alpha.kind == "two_norm_pow":
        return (0.5 * threshold) ** (1.0 / alpha.exponent)
    scale = nvars ** (alpha.exponent / alpha.p)
    return (0.5 * threshold / scale) ** (1.0 / alpha.exponent)


def estimate_rate(
    field_in,
    family: BetaFamily,
    alpha: AlphaMeasure,
    M: float,
    ics: np.ndarray,
    horizon: float,
    k_bracket: tuple[float, float] = (0.0, 8.0),
    rel_tol: float = 1e-3,
    method: str = "pointwise",
    rel_tol_integrate: float = 1e-6,
    abs_tol_integrate: float = 1e-9,
    ic_rule: str = "explicit",
    settle_threshold_rel: float = 1e-9,
    keep_trajectories: bool = False,
) -> RateEstimate:
    """Largest rate k such that every simulated trajectory obeys the bound.

    method="pointwise": bisection over k of "alpha(x(t)) <= M*beta(alpha(x0), kt)
    holds at every stored sample of every trajectory".
    method="settling": finite-time protocol, min over initial conditions of
    alpha(x0) / settling time.
    """
    cf = compile_field(field_in)
    ics = np.atleast_2d(np.asarray(ics, dtype=float))

    if method == "settling":
        k_best = math.inf
        worst = None
        trajs = []
        for x0 in ics:
            a0 = alpha(x0)
            thr = settle_threshold_rel * a0
            traj = integrate(
                cf, x0, horizon,
                rel_tol=rel_tol_integrate, abs_tol=abs_tol_integrate,
                stop_norm=_stop_norm_for(alpha, cf.nvars, thr),
            )
            if keep_trajectories:
                trajs.append(traj)
            T = settling_time(traj, alpha, thr)
            if T is None:
                raise NotSettled(f"trajectory from {x0} did not settle by t={horizon}")
            if T > 0 and a0 / T < k_best:
                k_best = a0 / T
                worst = x0
        return RateEstimate(
            k_sim=k_best, M=M, family=family, horizon=horizon,
            ic_count=len(ics), ic_rule=ic_rule, worst_ic=worst, worst_time=0.0,
            rel_tol=rel_tol, method="settling", trajectories=trajs,
        )

    # pointwise protocol: integrate once, then bisect on the stored samples
    samples = []
    trajs = []
    for x0 in ics:
        traj = integrate(
            cf, x0, horizon,
            rel_tol=rel_tol_integrate, abs_tol=abs_tol_integrate,
        )
        if keep_trajectories:
            trajs.append(traj)
        a0 = alpha(x0)
        samples.append((x0, a0, traj.times, traj.alpha_series(alpha)))

    def violation(k: float):
        for x0, a0, ts, avals in samples:
            slack = 1e-7 * (1.0 + a0)
            bounds = np.array([M * family.beta(a0, k * t) for t in ts])
            bad = np.nonzero(avals > bounds + slack)[0]
            if bad.size:
                return x0, float(ts[bad[0]])
        return None

    if violation(0.0) is not None:
        ic, t = violation(0.0)
        raise GainViolation(
            f"gain bound alpha(x(t)) <= {M}*alpha(x0) fails at t={t:.4g}", ic, t
        )

    lo, hi = k_bracket
    if violation(hi) is None:
        lo = hi
    else:
        while hi - lo > rel_tol * max(hi, 1e-12):
            mid = 0.5 * (lo + hi)
            if violation(mid) is None:
                lo = mid
            else:
                hi = mid
    probe = violation(lo * (1.0 + 2.0 * rel_tol))
    worst_ic, worst_t = (probe if probe is not None else (None, 0.0))
    return RateEstimate(
        k_sim=lo, M=M, family=family, horizon=horizon,
        ic_count=len(ics), ic_rule=ic_rule,
        worst_ic=worst_ic, worst_time=worst_t,
        rel_tol=rel_tol, method="pointwise", trajectories=trajs,
    )


# -- sampled converse Lyapunov construction --------------------------------


def converse_lf_sample(
    field_in,
    family: BetaFamily,
    k: float,
    alpha1: AlphaMeasure | Callable,
    epsilon: float,
    x,
    horizon: float,
    grid_size: int = 400,
    rel_tol: float = 1e-8,
    abs_tol: float = 1e-11,
) -> float:
    """Sampled value of sup_t beta_neg(alpha1(x(t)), (1-eps)*k*t).

    400 log-spaced grid points (plus t=0) with one golden-section refinement
    around the coarse argmax; for finite-time families the grid is truncated
    at the settling time. Returns +inf when the supremum escapes.
    """
    x = np.asarray(x, dtype=float)
    a_of = alpha1 if callable(alpha1) else alpha1
    cf = compile_field(field_in)
    stop = 0.0
    traj = integrate(cf, x, horizon, rel_tol=rel_tol, abs_tol=abs_tol, stop_norm=stop)

    t_max = traj.t_end
    from .beta import BetaKind

    if family.kind is BetaKind.FINITE_TIME and isinstance(a_of, AlphaMeasure):
        T = settling_time(traj, a_of, 1e-12 * max(a_of(x), 1e-30))
        if T is not None:
            t_max = min(t_max, T * (1.0 - 1e-9))

    t_lo = max(t_max * 1e-8, 1e-12)
    grid = np.concatenate([[0.0], np.geomspace(t_lo, t_max, grid_size - 1)])

    def g(t: float) -> float:
        xt = traj.eval(t)
        return family.beta_neg(float(a_of(xt)), (1.0 - epsilon) * k * t)

    vals = np.array([g(t) for t in grid])
    j = int(np.argmax(vals))
    best = float(vals[j])
    if not math.isfinite(best):
        return math.inf

    # one golden-section refinement around the coarse argmax
    lo = grid[max(j - 1, 0)]
    hi = grid[min(j + 1, len(grid) - 1)]
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = g(c), g(d)
    for _ in range(40):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = g(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = g(d)
        if b - a <= 1e-12 * (1.0 + b):
            break
    return max(best, fc, fd)
