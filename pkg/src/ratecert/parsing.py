"""Parser for the system-definition text format.

Grammar (whitespace insensitive):

    system   := stmt+              stmt := ident "=" expr ";"
    expr     := ["+"|"-"] term (("+"|"-") term)*
    term     := factor ("*" factor)*
    factor   := primary ["^" exponent]
    primary  := number | var | "(" expr ")" | "sign(" var ")" | "abs(" var ")"
    exponent := nonnegative integer, or int "/" int after abs(...)

Variables are x1..xn; statements f1..fn define vector-field components and
g1..gm define domain constraints. Expressions parse into SignedPowerExpr
and collapse to Polynomial when no sign/abs factor survives.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .polynomials import Polynomial, PolyVectorField, SemialgebraicSet
from .signed_power import NotPolynomial, SignedPowerExpr


class ParseError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte {offset})")
        self.offset = offset


_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+\.\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?"
    r"|\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*^()/=;]))"
)


@dataclass
class _Token:
    kind: str  # num | ident | op | end
    text: str
    offset: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            rest = text[pos:].lstrip()
            if not rest:
                break
            raise ParseError(f"unexpected character {rest[0]!r}", pos)
        for kind in ("num", "ident", "op"):
            if m.group(kind) is not None:
                tokens.append(_Token(kind, m.group(kind), m.start(kind)))
                break
        pos = m.end()
    tokens.append(_Token("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, var_names: list[str]):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0
        self.var_names = list(var_names)
        self.nvars = len(var_names)

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def next(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, text: str) -> _Token:
        tok = self.next()
        if tok.text != text:
            raise ParseError(f"expected {text!r}, found {tok.text!r}", tok.offset)
        return tok

    def fail(self, message: str) -> ParseError:
        return ParseError(message, self.peek().offset)

    # -- grammar rules --------------------------------------------------

    def parse_expr(self) -> SignedPowerExpr:
        sign = 1.0
        if self.peek().text in ("+", "-"):
            if self.next().text == "-":
                sign = -1.0
        expr = self.parse_term() * sign
        while self.peek().text in ("+", "-"):
            op = self.next().text
            rhs = self.parse_term()
            expr = expr + rhs if op == "+" else expr - rhs
        return expr

    def parse_term(self) -> SignedPowerExpr:
        expr = self.parse_factor()
        while self.peek().text == "*":
            self.next()
            expr = expr * self.parse_factor()
        return expr

    def parse_factor(self) -> SignedPowerExpr:
        base, kind = self.parse_primary()
        if self.peek().text == "^":
            self.next()
            if kind == "abs":
                num, den = self.parse_rational()
                # base is |x_i|; raise the abs exponent directly
                ((sexp, aexp),) = base.terms
                i = next(j for j, a in enumerate(aexp) if a != 0)
                return SignedPowerExpr.term(
                    self.nvars, 1.0, [(i, 0, Fraction(num, den))]
                )
            n = self.parse_int_exponent(kind)
            return base ** n
        return base

    def parse_primary(self) -> tuple[SignedPowerExpr, str]:
        tok = self.peek()
        if tok.kind == "num":
            self.next()
            return SignedPowerExpr.constant(self.nvars, float(tok.text)), "num"
        if tok.text == "(":
            self.next()
            inner = self.parse_expr()
            self.expect(")")
            return inner, "paren"
        if tok.kind == "ident":
            self.next()
            if tok.text in ("sign", "abs"):
                self.expect("(")
                var_tok = self.next()
                idx = self.var_index(var_tok)
                self.expect(")")
                if tok.text == "sign":
                    return SignedPowerExpr.term(self.nvars, 1.0, [(idx, 1, 0)]), "sign"
                return SignedPowerExpr.term(self.nvars, 1.0, [(idx, 0, 1)]), "abs"
            idx = self.var_index(tok)
            return SignedPowerExpr.term(self.nvars, 1.0, [(idx, 1, 1)]), "var"

        raise self.fail(f"expected a factor, found {tok.text!r}")

    def var_index(self, tok: _Token) -> int:
        if tok.kind != "ident":
            raise ParseError(f"expected a variable, found {tok.text!r}", tok.offset)
        try:
            return self.var_names.index(tok.text)
        except ValueError:
            raise ParseError(f"unknown identifier {tok.text!r}", tok.offset) from None

    def parse_int_exponent(self, base_kind: str) -> int:
        tok = self.next()
        if tok.kind != "num" or not tok.text.isdigit():
            raise ParseError(
                f"exponent must be a nonnegative integer, found {tok.text!r}",
                tok.offset,
            )
        if self.peek().text == "/":
            raise ParseError(
                "fractional exponents are only allowed on abs(...)",
                self.peek().offset,
            )
        return int(tok.text)

    def parse_rational(self) -> tuple[int, int]:
        tok = self.next()
        if tok.kind != "num" or not tok.text.isdigit():
            raise ParseError(f"expected an integer, found {tok.text!r}", tok.offset)
        num = int(tok.text)
        den = 1
        if self.peek().text == "/":
            self.next()
            dtok = self.next()
            if dtok.kind != "num" or not dtok.text.isdigit():
                raise ParseError(
                    f"expected an integer denominator, found {dtok.text!r}",
                    dtok.offset,
                )
            den = int(dtok.text)
            if den == 0:
                raise ParseError("zero denominator", dtok.offset)
        return num, den


def parse_signed_power(text: str, var_names: list[str]) -> SignedPowerExpr:
    parser = _Parser(text, var_names)
    expr = parser.parse_expr()
    tok = parser.peek()
    if tok.kind != "end":
        raise ParseError(f"trailing input {tok.text!r}", tok.offset)
    return expr


def parse_poly(text: str, var_names: list[str]) -> Polynomial:
    """Parse text into a Polynomial; sign/abs content raises NotPolynomial."""
    return parse_signed_power(text, var_names).to_polynomial()


@dataclass
class SystemDefinition:
    """Parsed system file: vector field plus optional domain constraints."""

    nvars: int
    var_names: list[str]
    field_exprs: list[SignedPowerExpr]
    constraint_polys: list[Polynomial]

    @property
    def is_polynomial(self) -> bool:
        try:
            self.poly_field()
            return True
        except NotPolynomial:
            return False

    def poly_field(self) -> PolyVectorField:
        return PolyVectorField([f.to_polynomial() for f in self.field_exprs])

    def signed_field(self) -> list[SignedPowerExpr]:
        return list(self.field_exprs)

    def domain(self) -> SemialgebraicSet:
        return SemialgebraicSet(self.nvars, self.constraint_polys)


_STMT_NAME_RE = re.compile(r"^([fg])(\d+)$")


def parse_system(text: str) -> SystemDefinition:
    """Parse a full system file (f1..fn components, optional g1..gm)."""
    # strip comment lines starting with '#'
    body = "\n".join(
        line for line in text.splitlines() if not line.lstrip().startswith("#")
    )
    statements: list[tuple[str, str, int]] = []
    for chunk in _split_statements(body):
        stmt_text, offset = chunk
        eq = stmt_text.find("=")
        if eq < 0:
            raise ParseError("statement missing '='", offset)
        name = stmt_text[:eq].strip()
        statements.append((name, stmt_text[eq + 1 :], offset))

    f_exprs: dict[int, str] = {}
    g_exprs: dict[int, str] = {}
    for name, rhs, offset in statements:
        m = _STMT_NAME_RE.match(name)
        if not m:
            raise ParseError(f"statement must define f<i> or g<i>, got {name!r}", offset)
        idx = int(m.group(2))
        target = f_exprs if m.group(1) == "f" else g_exprs
        if idx in target:
            raise ParseError(f"duplicate definition of {name}", offset)
        target[idx] = rhs

    if not f_exprs:
        raise ParseError("no vector-field components defined", 0)
    n = max(f_exprs)
    if sorted(f_exprs) != list(range(1, n + 1)):
        raise ParseError("vector-field components must be f1..fn with no gaps", 0)
    if g_exprs and sorted(g_exprs) != list(range(1, max(g_exprs) + 1)):
        raise ParseError("constraints must be g1..gm with no gaps", 0)

    var_names = [f"x{i + 1}" for i in range(n)]
    field = [parse_signed_power(f_exprs[i + 1], var_names) for i in range(n)]
    constraints = [
        parse_signed_power(g_exprs[i + 1], var_names).to_polynomial()
        for i in range(len(g_exprs))
    ]
    return SystemDefinition(n, var_names, field, constraints)


def _split_statements(text: str):
    start = 0
    for i, ch in enumerate(text):
        if ch == ";":
            chunk = text[start:i]
            if chunk.strip():
                yield chunk, start
            start = i + 1
    tail = text[start:].strip()
    if tail:
        raise ParseError("statement missing terminating ';'", start)
