"""Sparse multivariate polynomial arithmetic.

Monomials are exponent tuples, polynomials are monomial->coefficient maps.
Everything is an immutable value after construction; ordering of monomials
is graded lexicographic throughout so downstream Gram indexing is
reproducible.
"""

from __future__ import annotations

from itertools import combinations_with_replacement
from math import comb
from typing import Iterable, Mapping, Sequence

import numpy as np

Monomial = tuple[int, ...]

# Relative threshold below which coefficients are treated as cancellation
# noise and pruned.
PRUNE_REL = 1e-14


class DimensionMismatch(ValueError):
    pass


def monomial_degree(m: Monomial) -> int:
    return sum(m)


def monomial_mul(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x + y for x, y in zip(a, b))


def grlex_key(m: Monomial):
    """Sort key: ascending total degree, then x1-major lexicographic."""
    return (sum(m), tuple(-e for e in m))


def monomial_basis(nvars: int, min_deg: int, max_deg: int) -> list[Monomial]:
    """All monomials with min_deg <= degree <= max_deg in graded-lex order."""
    if nvars < 1:
        raise ValueError("nvars must be positive")
    if not (0 <= min_deg <= max_deg):
        raise ValueError("need 0 <= min_deg <= max_deg")
    out: list[Monomial] = []
    for deg in range(min_deg, max_deg + 1):
        # stars and bars: choose positions of bars among deg stars
        row = []
        for bars in combinations_with_replacement(range(nvars), deg):
            e = [0] * nvars
            for v in bars:
                e[v] += 1
            row.append(tuple(e))
        row.sort(key=grlex_key)
        out.extend(row)
    return out


def basis_count(nvars: int, min_deg: int, max_deg: int) -> int:
    """Closed-form size of monomial_basis()."""
    total = comb(nvars + max_deg, nvars)
    below = comb(nvars + min_deg - 1, nvars) if min_deg > 0 else 0
    return total - below


class Polynomial:
    """Sparse polynomial with float64 coefficients.

    Terms with |c| < PRUNE_REL * max|c| are dropped at construction, so
    cancellation noise does not inflate the support.
    """

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: Mapping[Monomial, float] | None = None):
        if nvars < 1:
            raise ValueError("nvars must be positive")
        self.nvars = nvars
        clean: dict[Monomial, float] = {}
        if terms:
            cmax = max(abs(c) for c in terms.values()) if terms else 0.0
            cut = PRUNE_REL * cmax
            for m, c in terms.items():
                if len(m) != nvars:
                    raise DimensionMismatch(f"monomial {m} has wrong arity")
                if any(e < 0 for e in m):
                    raise ValueError(f"negative exponent in {m}")
                if c != 0.0 and abs(c) >= cut:
                    clean[m] = float(c)
        self.terms = clean

    # -- constructors -------------------------------------------------

    @staticmethod
    def zero(nvars: int) -> "Polynomial":
        return Polynomial(nvars, {})

    @staticmethod
    def constant(nvars: int, c: float) -> "Polynomial":
        return Polynomial(nvars, {(0,) * nvars: c})

    @staticmethod
    def variable(nvars: int, i: int) -> "Polynomial":
        e = [0] * nvars
        e[i] = 1
        return Polynomial(nvars, {tuple(e): 1.0})

    @staticmethod
    def monomial(nvars: int, m: Monomial, c: float = 1.0) -> "Polynomial":
        return Polynomial(nvars, {tuple(m): c})

    @staticmethod
    def norm2_power(nvars: int, half_exponent: int) -> "Polynomial":
        """(x^T x)^half_exponent."""
        base = Polynomial(
            nvars,
            {tuple(2 if j == i else 0 for j in range(nvars)): 1.0 for i in range(nvars)},
        )
        return base ** half_exponent

    # -- ring operations ----------------------------------------------

    def _check(self, other: "Polynomial") -> None:
        if self.nvars != other.nvars:
            raise DimensionMismatch(
                f"nvars mismatch: {self.nvars} vs {other.nvars}"
            )

    def __add__(self, other):
        if isinstance(other, (int, float)):
            other = Polynomial.constant(self.nvars, float(other))
        self._check(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0.0) + c
        return Polynomial(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.nvars, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, float)):
            other = Polynomial.constant(self.nvars, float(other))
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return self.scale(float(other))
        self._check(other)
        out: dict[Monomial, float] = {}
        for ma, ca in self.terms.items():
            for mb, cb in other.terms.items():
                m = monomial_mul(ma, mb)
                out[m] = out.get(m, 0.0) + ca * cb
        return Polynomial(self.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("polynomial powers must be nonnegative integers")
        result = Polynomial.constant(self.nvars, 1.0)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def scale(self, c: float) -> "Polynomial":
        return Polynomial(self.nvars, {m: c * v for m, v in self.terms.items()})

    # -- calculus ------------------------------------------------------

    def partial(self, i: int) -> "Polynomial":
        out: dict[Monomial, float] = {}
        for m, c in self.terms.items():
            e = m[i]
            if e == 0:
                continue
            d = list(m)
            d[i] = e - 1
            dm = tuple(d)
            out[dm] = out.get(dm, 0.0) + c * e
        return Polynomial(self.nvars, out)

    def gradient(self) -> list["Polynomial"]:
        return [self.partial(i) for i in range(self.nvars)]

    # -- queries -------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        """Total degree; zero polynomial reports 0."""
        return max((monomial_degree(m) for m in self.terms), default=0)

    def min_degree(self) -> int:
        return min((monomial_degree(m) for m in self.terms), default=0)

    def coefficient(self, m: Monomial) -> float:
        return self.terms.get(tuple(m), 0.0)

    def max_abs_coeff(self) -> float:
        return max((abs(c) for c in self.terms.values()), default=0.0)

    def support(self) -> set[Monomial]:
        return set(self.terms)

    def __call__(self, x) -> float:
        x = np.asarray(x, dtype=float)
        total = 0.0
        for m, c in self.terms.items():
            v = c
            for i, e in enumerate(m):
                if e:
                    v *= x[i] ** e
            total += v
        return total

    def eval_many(self, pts: np.ndarray) -> np.ndarray:
        """Evaluate at an (N, nvars) array of points."""
        pts = np.asarray(pts, dtype=float)
        if pts.ndim == 1:
            pts = pts[None, :]
        if not self.terms:
            return np.zeros(pts.shape[0])
        mons = list(self.terms)
        exps = np.array(mons, dtype=float)          # (T, n)
        coeffs = np.array([self.terms[m] for m in mons])
        with np.errstate(divide="ignore", invalid="ignore"):
            powers = np.power(pts[:, None, :], exps[None, :, :])
        powers = np.where(exps[None, :, :] == 0, 1.0, powers)
        return np.prod(powers, axis=2) @ coeffs

    # -- comparison & display -------------------------------------------

    def almost_equal(self, other: "Polynomial", rel: float = PRUNE_REL) -> bool:
        """Equality after dropping coefficients below rel * max|c|."""
        self._check(other)
        cmax = max(self.max_abs_coeff(), other.max_abs_coeff())
        if cmax == 0.0:
            return True
        cut = rel * cmax
        for m in self.support() | other.support():
            a = self.terms.get(m, 0.0)
            b = other.terms.get(m, 0.0)
            if abs(a - b) > cut:
                return False
        return True

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.nvars == other.nvars and self.almost_equal(other)

    def __hash__(self):
        raise TypeError("Polynomial is not hashable")

    def to_text(self, var_names: Sequence[str] | None = None) -> str:
        """Round-trippable text form (coefficients printed via repr)."""
        if var_names is None:
            var_names = [f"x{i + 1}" for i in range(self.nvars)]
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms, key=grlex_key):
            c = self.terms[m]
            factors = []
            for i, e in enumerate(m):
                if e == 1:
                    factors.append(var_names[i])
                elif e > 1:
                    factors.append(f"{var_names[i]}^{e}")
            body = "*".join(factors)
            coeff = repr(abs(c))
            if body and abs(c) == 1.0:
                text = body
            elif body:
                text = f"{coeff}*{body}"
            else:
                text = coeff
            sign = "-" if c < 0 else "+"
            parts.append((sign, text))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, text in parts[1:]:
            out += f" {sign} {text}"
        return out

    def __repr__(self):
        return f"Polynomial({self.to_text()})"


class PolyVectorField:
    """Vector field with one polynomial per state component."""

    __slots__ = ("nvars", "components")

    def __init__(self, components: Iterable[Polynomial]):
        comps = list(components)
        if not comps:
            raise ValueError("vector field needs at least one component")
        nvars = comps[0].nvars
        for p in comps:
            if p.nvars != nvars:
                raise DimensionMismatch("components disagree on nvars")
        self.nvars = nvars
        self.components = comps

    def degree(self) -> int:
        return max(p.degree() for p in self.components)

    def __call__(self, x) -> np.ndarray:
        return np.array([p(x) for p in self.components])

    def __repr__(self):
        return f"PolyVectorField({[p.to_text() for p in self.components]})"


def lie_derivative(V: Polynomial, field: PolyVectorField) -> Polynomial:
    """d/dt V along trajectories: sum_i dV/dx_i * f_i."""
    if V.nvars != field.nvars:
        raise DimensionMismatch("V and field disagree on nvars")
    out = Polynomial.zero(V.nvars)
    for i, f_i in enumerate(field.components):
        out = out + V.partial(i) * f_i
    return out


class SemialgebraicSet:
    """Omega = {x : g_i(x) >= 0}; an empty constraint list means all of R^n."""

    __slots__ = ("nvars", "constraints")

    def __init__(self, nvars: int, constraints: Iterable[Polynomial] = ()):
        self.nvars = nvars
        self.constraints = list(constraints)
        for g in self.constraints:
            if g.nvars != nvars:
                raise DimensionMismatch("constraint has wrong nvars")

    @staticmethod
    def everywhere(nvars: int) -> "SemialgebraicSet":
        return SemialgebraicSet(nvars, ())

    @staticmethod
    def ball(nvars: int, radius: float) -> "SemialgebraicSet":
        g = Polynomial.constant(nvars, radius ** 2) - Polynomial.norm2_power(nvars, 1)
        return SemialgebraicSet(nvars, [g])

    @property
    def is_global(self) -> bool:
        return not self.constraints

    def contains(self, x, tol: float = 0.0) -> bool:
        return all(g(x) >= -tol for g in self.constraints)

    def contains_many(self, pts: np.ndarray, tol: float = 0.0) -> np.ndarray:
        if self.is_global:
            return np.ones(np.asarray(pts).shape[0], dtype=bool)
        mask = np.ones(np.asarray(pts).shape[0], dtype=bool)
        for g in self.constraints:
            mask &= g.eval_many(pts) >= -tol
        return mask

    def __repr__(self):
        if self.is_global:
            return f"SemialgebraicSet(R^{self.nvars})"
        return f"SemialgebraicSet({[g.to_text() for g in self.constraints]})"
