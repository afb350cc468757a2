"""Signed-power expressions: sums of c * prod_i sign(x_i)^s * |x_i|^a.

These represent the non-polynomial vector fields that arise in finite-time
stability analysis. Absolute-value exponents are exact rationals so the
variable substitution x -> sign(z)|z|^r stays exact; coefficients are
float64 like everywhere else.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .polynomials import DimensionMismatch, Monomial, Polynomial

# One term: (sign exponents mod 2, abs exponents) per variable.
TermKey = tuple[tuple[int, ...], tuple[Fraction, ...]]


class NotPolynomial(ValueError):
    """Raised when an expression cannot be converted to a Polynomial."""

    def __init__(self, message: str, term: TermKey | None = None):
        super().__init__(message)
        self.term = term


class SignedPowerExpr:
    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms=None):
        self.nvars = nvars
        clean: dict[TermKey, float] = {}
        if terms:
            for key, c in terms.items():
                sexp, aexp = key
                if len(sexp) != nvars or len(aexp) != nvars:
                    raise DimensionMismatch("term has wrong arity")
                sexp = tuple(int(s) % 2 for s in sexp)
                # Negative exponents are legal (they arise mid-substitution
                # and are cleared by a monomial multiplier before any
                # polynomial conversion).
                aexp = tuple(Fraction(a) for a in aexp)
                k = (sexp, aexp)
                c = clean.get(k, 0.0) + float(c)
                if c == 0.0:
                    clean.pop(k, None)
                else:
                    clean[k] = c
        self.terms = clean

    # -- constructors ---------------------------------------------------

    @staticmethod
    def zero(nvars: int) -> "SignedPowerExpr":
        return SignedPowerExpr(nvars, {})

    @staticmethod
    def constant(nvars: int, c: float) -> "SignedPowerExpr":
        z = (0,) * nvars
        f = (Fraction(0),) * nvars
        return SignedPowerExpr(nvars, {(z, f): c})

    @staticmethod
    def term(nvars: int, coeff: float, factors) -> "SignedPowerExpr":
        """factors: iterable of (var index, sign exponent, abs exponent)."""
        sexp = [0] * nvars
        aexp = [Fraction(0)] * nvars
        for i, s, a in factors:
            sexp[i] += int(s)
            aexp[i] += Fraction(a)
        return SignedPowerExpr(nvars, {(tuple(sexp), tuple(aexp)): coeff})

    @staticmethod
    def from_polynomial(p: Polynomial) -> "SignedPowerExpr":
        out: dict[TermKey, float] = {}
        for m, c in p.terms.items():
            sexp = tuple(e % 2 for e in m)
            aexp = tuple(Fraction(e) for e in m)
            out[(sexp, aexp)] = out.get((sexp, aexp), 0.0) + c
        return SignedPowerExpr(p.nvars, out)

    # -- algebra ----------------------------------------------------------

    def _check(self, other: "SignedPowerExpr") -> None:
        if self.nvars != other.nvars:
            raise DimensionMismatch("nvars mismatch")

    def __add__(self, other):
        if isinstance(other, (int, float)):
            other = SignedPowerExpr.constant(self.nvars, float(other))
        self._check(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0.0) + c
        return SignedPowerExpr(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return SignedPowerExpr(self.nvars, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, float)):
            other = SignedPowerExpr.constant(self.nvars, float(other))
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return SignedPowerExpr(
                self.nvars, {k: float(other) * c for k, c in self.terms.items()}
            )
        self._check(other)
        out: dict[TermKey, float] = {}
        for (sa, aa), ca in self.terms.items():
            for (sb, ab), cb in other.terms.items():
                key = (
                    tuple((x + y) % 2 for x, y in zip(sa, sb)),
                    tuple(x + y for x, y in zip(aa, ab)),
                )
                out[key] = out.get(key, 0.0) + ca * cb
        return SignedPowerExpr(self.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("powers must be nonnegative integers")
        result = SignedPowerExpr.constant(self.nvars, 1.0)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- evaluation -------------------------------------------------------

    def __call__(self, x) -> float:
        x = np.asarray(x, dtype=float)
        total = 0.0
        for (sexp, aexp), c in self.terms.items():
            v = c
            for i in range(self.nvars):
                s, a = sexp[i], aexp[i]
                xi = x[i]
                if a != 0:
                    if xi == 0.0:
                        if a < 0:
                            raise ZeroDivisionError(
                                "negative power evaluated at a zero coordinate"
                            )
                        v = 0.0
                        break
                    v *= abs(xi) ** float(a)
                if s:
                    sg = float(np.sign(xi))
                    v *= sg
                    if sg == 0.0:
                        break
            total += v
        return total

    def is_polynomial_term(self, key: TermKey) -> bool:
        sexp, aexp = key
        for s, a in zip(sexp, aexp):
            if a.denominator != 1 or a < 0:
                return False
            if (a.numerator + s) % 2 != 0:
                return False
        return True

    def to_polynomial(self, multiplier: "SignedPowerExpr | None" = None) -> Polynomial:
        """Convert multiplier*self to a Polynomial.

        Each factor sign(x)^s |x|^a is the monomial x^a exactly when a is a
        nonnegative integer of the same parity as s; any other term raises
        NotPolynomial naming the offender.
        """
        expr = self if multiplier is None else multiplier * self
        out: dict[Monomial, float] = {}
        for key, c in expr.terms.items():
            if not expr.is_polynomial_term(key):
                raise NotPolynomial(f"non-polynomial term {key}", term=key)
            m = tuple(int(a) for a in key[1])
            out[m] = out.get(m, 0.0) + c
        return Polynomial(expr.nvars, out)

    def max_abs_coeff(self) -> float:
        return max((abs(c) for c in self.terms.values()), default=0.0)

    def substitute_signed(self, r: Fraction) -> "SignedPowerExpr":
        """Replace every x_i by sign(z_i)|z_i|^r (exact in the exponents)."""
        r = Fraction(r)
        if r <= 0:
            raise ValueError("substitution exponent must be positive")
        out: dict[TermKey, float] = {}
        for (sexp, aexp), c in self.terms.items():
            # sign(x)^s |x|^a -> sign(z)^(s+a_parity?) : sign(sign(z)|z|^r) = sign(z)
            # and |sign(z)|z|^r| = |z|^r, so the factor becomes
            # sign(z)^s * |z|^(r*a).
            key = (tuple(sexp), tuple(r * a for a in aexp))
            out[key] = out.get(key, 0.0) + c
        return SignedPowerExpr(self.nvars, out)

    def __eq__(self, other):
        if not isinstance(other, SignedPowerExpr):
            return NotImplemented
        if self.nvars != other.nvars:
            return False
        keys = set(self.terms) | set(other.terms)
        scale = max(self.max_abs_coeff(), other.max_abs_coeff(), 1e-300)
        return all(
            abs(self.terms.get(k, 0.0) - other.terms.get(k, 0.0)) <= 1e-12 * scale
            for k in keys
        )

    def __hash__(self):
        raise TypeError("SignedPowerExpr is not hashable")

    def __repr__(self):
        parts = []
        for (sexp, aexp), c in self.terms.items():
            factors = []
            for i, (s, a) in enumerate(zip(sexp, aexp)):
                if s:
                    factors.append(f"sign(x{i + 1})")
                if a != 0:
                    factors.append(f"abs(x{i + 1})^{a}")
            parts.append(f"{c}*" + "*".join(factors) if factors else f"{c}")
        return "SignedPowerExpr(" + " + ".join(parts or ["0"]) + ")"


def substitute_signed_power(
    field: Sequence[SignedPowerExpr], r: Fraction
) -> list[SignedPowerExpr]:
    """Time-rescaled change of variables z = sign(x)|x|^(1/r).

    Component i of the result is (1/r) * f_i(sign(z)|z|^r) * |z_i|^(1-r),
    with sign exponents reduced mod 2 and absolute exponents combined in
    exact rational arithmetic.
    """
    r = Fraction(r)
    if r <= 0:
        raise ValueError("r must be positive")
    out = []
    for i, f_i in enumerate(field):
        sub = f_i.substitute_signed(r)
        weight = SignedPowerExpr.term(f_i.nvars, 1.0 / float(r), [(i, 0, 1 - r)])
        out.append(weight * sub)
    return out


def poly_field_to_signed(field: Iterable[Polynomial]) -> list[SignedPowerExpr]:
    return [SignedPowerExpr.from_polynomial(p) for p in field]
