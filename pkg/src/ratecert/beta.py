"""Comparison functions for pointwise-in-time decay bounds.

Three closed-form families are supported: exponential y*exp(-t), rational
y/(1+y*t), and finite-time max(y-t, 0). Each is normalized (value y at
t=0), satisfies the semigroup law in t, and has a generator rho giving the
initial slope; the negative-time extension continues the semigroup
backwards, with +inf representing finite escape.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np


class BetaKind(Enum):
    EXPONENTIAL = "exponential"
    RATIONAL = "rational"
    FINITE_TIME = "finite_time"


@dataclass(frozen=True)
class BetaFamily:
    kind: BetaKind
    p: float = 2.0          # norm power (rational: alpha = ||x||_2^p)
    eta: float = 1.0        # finite-time: alpha = ||x||_p^eta
    p_norm: float = 2.0     # finite-time quasi-norm index

    @staticmethod
    def exponential() -> "BetaFamily":
        return BetaFamily(BetaKind.EXPONENTIAL)

    @staticmethod
    def rational(p: float = 2.0) -> "BetaFamily":
        if p <= 0:
            raise ValueError("p must be positive")
        return BetaFamily(BetaKind.RATIONAL, p=p)

    @staticmethod
    def finite_time(p_norm: float, eta: float) -> "BetaFamily":
        if not (0 < eta < 1):
            raise ValueError("eta must lie in (0, 1)")
        if p_norm <= 0:
            raise ValueError("p_norm must be positive")
        return BetaFamily(BetaKind.FINITE_TIME, eta=eta, p_norm=p_norm)

    # -- the comparison function and its relatives ----------------------

    def beta(self, y: float, t: float) -> float:
        if y < 0 or t < 0:
            raise ValueError("beta requires y, t >= 0")
        if self.kind is BetaKind.EXPONENTIAL:
            return y * math.exp(-t)
        if self.kind is BetaKind.RATIONAL:
            return y / (1.0 + y * t)
        return max(y - t, 0.0)

    def rho(self, y: float) -> float:
        """Initial slope d/dt beta(y, t) at t=0."""
        if y < 0:
            raise ValueError("rho requires y >= 0")
        if self.kind is BetaKind.EXPONENTIAL:
            return -y
        if self.kind is BetaKind.RATIONAL:
            return -y * y
        return -1.0 if y > 0 else 0.0

    def beta_neg(self, y: float, t: float) -> float:
        """Backwards continuation: the value z with beta(z, t) == y.

        Returns +inf past the rational family's finite escape time.
        """
        if y < 0 or t < 0:
            raise ValueError("beta_neg requires y, t >= 0")
        if self.kind is BetaKind.EXPONENTIAL:
            return y * math.exp(t)
        if self.kind is BetaKind.RATIONAL:
            denom = 1.0 - y * t
            return y / denom if denom > 0 else math.inf
        return y + t

    def alpha(self) -> "AlphaMeasure":
        """State measure this family is paired with by convention."""
        if self.kind is BetaKind.EXPONENTIAL:
            return AlphaMeasure.two_norm_power(1.0)
        if self.kind is BetaKind.RATIONAL:
            return AlphaMeasure.two_norm_power(self.p)
        return AlphaMeasure.quasi_norm_power(self.p_norm, self.eta)


@dataclass(frozen=True)
class AlphaMeasure:
    """alpha(x): positive definite measure of state size."""

    kind: str               # "two_norm_pow" | "quasi_norm_pow"
    exponent: float
    p: float = 2.0

    @staticmethod
    def two_norm_power(exponent: float) -> "AlphaMeasure":
        return AlphaMeasure("two_norm_pow", exponent)

    @staticmethod
    def quasi_norm_power(p: float, eta: float) -> "AlphaMeasure":
        return AlphaMeasure("quasi_norm_pow", eta, p=p)

    def __call__(self, x) -> float:
        x = np.asarray(x, dtype=float)
        if self.kind == "two_norm_pow":
            n = float(np.linalg.norm(np.atleast_1d(x)))
            return n ** self.exponent
        s = float(np.sum(np.abs(np.atleast_1d(x)) ** self.p))
        return s ** (self.exponent / self.p)

    def many(self, pts: np.ndarray) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        if self.kind == "two_norm_pow":
            return np.linalg.norm(pts, axis=-1) ** self.exponent
        s = np.sum(np.abs(pts) ** self.p, axis=-1)
        return s ** (self.exponent / self.p)


@dataclass
class TimeInvarianceReport:
    passed: bool
    max_semigroup_error: float
    max_rho_error: float
    first_violation: tuple[float, float, float] | None = None


def check_time_invariance(
    beta_fn: BetaFamily | Callable[[float, float], float],
    ys,
    t0s,
    ts,
    tol: float = 1e-10,
    rho_rel_tol: float = 1e-4,
) -> TimeInvarianceReport:
    """Grid check of the semigroup law beta(beta(y,t0),t) == beta(y,t0+t).

    For a BetaFamily the generator consistency (beta(y,h) - y)/h -> rho(y)
    is verified as well.
    """
    if isinstance(beta_fn, BetaFamily):
        fam = beta_fn
        b = fam.beta
    else:
        fam = None
        b = beta_fn

    worst = 0.0
    first = None
    for y in ys:
        for t0 in t0s:
            mid = b(y, t0)
            for t in ts:
                err = abs(b(mid, t) - b(y, t0 + t))
                if err > worst:
                    worst = err
                if err > tol * (1.0 + y) and first is None:
                    first = (y, t0, t)

    rho_worst = 0.0
    if fam is not None:
        for y in ys:
            if y == 0:
                continue
            target = fam.rho(y)
            # richardson-free: small forward difference
            h = 1e-7 * (1.0 + y)
            approx = (fam.beta(y, h) - y) / h
            denom = max(abs(target), 1e-12)
            rho_worst = max(rho_worst, abs(approx - target) / denom)

    passed = first is None and (fam is None or rho_worst <= rho_rel_tol)
    return TimeInvarianceReport(passed, worst, rho_worst, first)


@dataclass
class BoundCheck:
    holds: bool
    worst_margin: float
    worst_time: float


def pointwise_bound(
    family: BetaFamily,
    alpha: AlphaMeasure,
    M: float,
    k: float,
    traj,
    x0=None,
    tol_slack: float | None = None,
) -> BoundCheck:
    """Check alpha(x(t)) <= M * beta(alpha(x0), k t) along a trajectory.

    `traj` needs .times and .states arrays; samples are the stored nodes.
    The default slack absorbs integrator error.
    """
    if M < 1.0:
        raise ValueError("gain must satisfy M >= 1")
    if k < 0.0:
        raise ValueError("rate must satisfy k >= 0")
    times = np.asarray(traj.times)
    states = np.asarray(traj.states)
    if x0 is None:
        x0 = states[0]
    a0 = alpha(x0)
    if tol_slack is None:
        tol_slack = 1e-7 * (1.0 + a0)
    values = alpha.many(states)
    bounds = np.array([M * family.beta(a0, k * t) for t in times])
    margins = values - bounds
    worst = int(np.argmax(margins))
    return BoundCheck(
        holds=bool(margins[worst] <= tol_slack),
        worst_margin=float(margins[worst]),
        worst_time=float(times[worst]),
    )
