"""Exact sparse multivariate polynomials over the rationals.

Variables are named ``z1 .. zN`` and indexed from 1 in the public API.  A
polynomial stores a dict from exponent tuples (length ``nvars``) to nonzero
coefficients; integral coefficients are kept as ``int`` and everything else
as ``fractions.Fraction``, so arithmetic never rounds.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Mapping, Sequence

from vdpkit.kernels import mul_terms


class VariableCountError(ValueError):
    """Operands live in polynomial rings with different variable counts."""


def _norm(c):
    if isinstance(c, Fraction):
        return c.numerator if c.denominator == 1 else c
    if isinstance(c, int):
        return c
    if isinstance(c, Rational):
        c = Fraction(c)
        return c.numerator if c.denominator == 1 else c
    raise TypeError(f"coefficient must be rational, got {type(c).__name__}")


# ---------------------------------------------------------------------------
# monomial orders


@dataclass(frozen=True)
class MonomialOrder:
    """A monomial order.

    ``perm`` lists 0-based variable indices from the largest variable to the
    smallest.  ``None`` means the natural order z1 < z2 < ... < zn.
    """

    name: str = "degrevlex"
    perm: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.name not in ("degrevlex", "lex", "deglex"):
            raise ValueError(f"unknown monomial order {self.name!r}")

    def _big_first(self, e):
        if self.perm is None:
            return e[::-1]
        return tuple(e[i] for i in self.perm)

    def key(self, e: tuple[int, ...]) -> tuple:
        """Sort key: larger key means larger monomial."""
        b = self._big_first(e)
        if self.name == "lex":
            return b
        if self.name == "deglex":
            return (sum(e),) + b
        return (sum(e),) + tuple(-x for x in reversed(b))

    def negkey(self, e: tuple[int, ...]) -> tuple:
        return tuple(-x for x in self.key(e))

    def __str__(self):
        return self.name if self.perm is None else f"{self.name}{list(self.perm)}"


DEGREVLEX = MonomialOrder("degrevlex")
LEX = MonomialOrder("lex")
DEGLEX = MonomialOrder("deglex")


def order_from_name(name: str) -> MonomialOrder:
    return MonomialOrder(name)


# ---------------------------------------------------------------------------
# polynomials


class Polynomial:
    """Immutable exact polynomial in ``nvars`` variables."""

    __slots__ = ("nvars", "_terms", "_hash")

    def __init__(self, nvars: int, terms: Mapping[tuple, object] | None = None):
        if nvars < 0:
            raise ValueError("nvars must be nonnegative")
        self.nvars = nvars
        clean = {}
        if terms:
            for e, c in terms.items():
                e = tuple(int(x) for x in e)
                if len(e) != nvars or any(x < 0 for x in e):
                    raise ValueError(f"bad exponent {e} for {nvars} variables")
                c = _norm(c)
                if c:
                    clean[e] = clean.get(e, 0) + c
                    if not clean[e]:
                        del clean[e]
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, nvars, terms):
        # trusted constructor: exponents valid, coefficients nonzero and normalized
        p = object.__new__(cls)
        p.nvars = nvars
        p._terms = terms
        p._hash = None
        return p

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, nvars: int) -> "Polynomial":
        return cls._raw(nvars, {})

    @classmethod
    def const(cls, nvars: int, c) -> "Polynomial":
        c = _norm(c)
        return cls._raw(nvars, {(0,) * nvars: c} if c else {})

    @classmethod
    def var(cls, nvars: int, i: int) -> "Polynomial":
        """The variable ``z_i`` (1-based)."""
        if not 1 <= i <= nvars:
            raise IndexError(f"variable z{i} out of range for {nvars} variables")
        e = [0] * nvars
        e[i - 1] = 1
        return cls._raw(nvars, {tuple(e): 1})

    @classmethod
    def monomial(cls, exp: Sequence[int], coef=1) -> "Polynomial":
        return cls(len(exp), {tuple(exp): coef})

    # -- inspection ---------------------------------------------------------

    def items(self):
        return self._terms.items()

    def terms(self, order: MonomialOrder = DEGREVLEX) -> list[tuple[tuple, object]]:
        """Terms sorted descending under ``order``."""
        return sorted(self._terms.items(), key=lambda t: order.key(t[0]), reverse=True)

    def coeff(self, exp: Sequence[int]):
        return self._terms.get(tuple(exp), 0)

    def __len__(self):
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and (0,) * self.nvars in self._terms)

    def constant_term(self):
        return self._terms.get((0,) * self.nvars, 0)

    def total_degree(self) -> int:
        if not self._terms:
            return -1
        return max(sum(e) for e in self._terms)

    def degree_in(self, i: int) -> int:
        if not self._terms:
            return -1
        return max(e[i - 1] for e in self._terms)

    def variables(self) -> set[int]:
        return {k + 1 for e in self._terms for k, x in enumerate(e) if x}

    def leading_term(self, order: MonomialOrder = DEGREVLEX):
        if not self._terms:
            raise ValueError("zero polynomial has no leading term")
        e = max(self._terms, key=order.key)
        return e, self._terms[e]

    def is_integral(self) -> bool:
        return all(isinstance(c, int) for c in self._terms.values())

    # -- ring structure -----------------------------------------------------

    def _check(self, other):
        if isinstance(other, Polynomial):
            if other.nvars != self.nvars:
                raise VariableCountError(f"{self.nvars} vs {other.nvars} variables")
            return other
        if isinstance(other, (int, Fraction)) or isinstance(other, Rational):
            return Polynomial.const(self.nvars, other)
        return NotImplemented

    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for e, c in other._terms.items():
            v = out.get(e, 0) + c
            if v:
                out[e] = _norm(v)
            else:
                out.pop(e, None)
        return Polynomial._raw(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw(self.nvars, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, Polynomial):
            self._check(other)
            if not self._terms or not other._terms:
                return Polynomial.zero(self.nvars)
            out = mul_terms(self._terms, other._terms)
            return Polynomial._raw(self.nvars, {e: _norm(c) for e, c in out.items()})
        if isinstance(other, Rational):
            c = _norm(other)
            if not c:
                return Polynomial.zero(self.nvars)
            return Polynomial._raw(self.nvars, {e: _norm(v * c) for e, v in self._terms.items()})
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Rational):
            if not other:
                raise ZeroDivisionError("division by zero")
            return self * (1 / Fraction(other))
        return NotImplemented

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a nonnegative integer")
        result = Polynomial.const(self.nvars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.nvars == other.nvars and self._terms == other._terms
        if isinstance(other, Rational):
            return self._terms == Polynomial.const(self.nvars, other)._terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self._terms.items())))
        return self._hash

    def __bool__(self):
        return bool(self._terms)

    # -- calculus and composition ------------------------------------------

    def diff(self, i: int) -> "Polynomial":
        """Formal partial derivative with respect to ``z_i``."""
        if not 1 <= i <= self.nvars:
            raise IndexError(f"variable z{i} out of range for {self.nvars} variables")
        k = i - 1
        out = {}
        for e, c in self._terms.items():
            a = e[k]
            if a:
                out[e[:k] + (a - 1,) + e[k + 1:]] = c * a
        return Polynomial._raw(self.nvars, out)

    def coefficients_in(self, i: int) -> dict[int, "Polynomial"]:
        """Split as ``sum_k A_k * z_i^k``; returns ``{k: A_k}`` with A_k free of z_i."""
        if not 1 <= i <= self.nvars:
            raise IndexError(f"variable z{i} out of range for {self.nvars} variables")
        k = i - 1
        parts: dict[int, dict] = {}
        for e, c in self._terms.items():
            parts.setdefault(e[k], {})[e[:k] + (0,) + e[k + 1:]] = c
        return {a: Polynomial._raw(self.nvars, t) for a, t in parts.items()}

    def substitute(self, i: int, q: "Polynomial") -> "Polynomial":
        """Replace ``z_i`` by ``q``."""
        if isinstance(q, Rational):
            q = Polynomial.const(self.nvars, q)
        self._check(q)
        parts = self.coefficients_in(i)
        if not parts:
            return Polynomial.zero(self.nvars)
        top = max(parts)
        result = parts.get(top)
        for a in range(top - 1, -1, -1):
            result = result * q
            if a in parts:
                result = result + parts[a]
        return result

    def __call__(self, *point):
        return self.eval(point[0] if len(point) == 1 and isinstance(point[0], (list, tuple)) else point)

    def eval(self, point: Sequence):
        """Evaluate at a point; exact for rational input."""
        if len(point) != self.nvars:
            raise ValueError(f"point has length {len(point)}, expected {self.nvars}")
        exact = all(isinstance(x, Rational) for x in point)
        pts = [Fraction(x) if exact else x for x in point]
        total = Fraction(0) if exact else 0
        for e, c in self._terms.items():
            v = c
            for x, a in zip(pts, e):
                if a:
                    v = v * x ** a
            total += v
        return _norm(total) if exact else total

    def embed(self, nvars: int) -> "Polynomial":
        """Same polynomial in a ring with more variables (zero-padded exponents)."""
        if nvars < self.nvars:
            if any(any(e[nvars:]) for e in self._terms):
                raise VariableCountError("cannot drop variables that occur")
            return Polynomial._raw(nvars, {e[:nvars]: c for e, c in self._terms.items()})
        pad = (0,) * (nvars - self.nvars)
        return Polynomial._raw(nvars, {e + pad: c for e, c in self._terms.items()})

    def primitive(self) -> tuple[Fraction, "Polynomial"]:
        """``(content, prim)`` with ``self == content * prim``, prim integral with
        coprime coefficients and positive leading coefficient (degrevlex)."""
        if not self._terms:
            return Fraction(0), self
        from math import gcd, lcm

        den = 1
        for c in self._terms.values():
            if isinstance(c, Fraction):
                den = lcm(den, c.denominator)
        ints = {e: int(c * den) for e, c in self._terms.items()}
        g = 0
        for c in ints.values():
            g = gcd(g, c)
        if ints[max(ints, key=DEGREVLEX.key)] < 0:
            g = -g
        return Fraction(g, den), Polynomial._raw(self.nvars, {e: c // g for e, c in ints.items()})

    # -- text ---------------------------------------------------------------

    def to_str(self, order: MonomialOrder = DEGREVLEX) -> str:
        return format_poly(self, order)

    def __str__(self):
        return format_poly(self)

    def __repr__(self):
        return f"Polynomial({self.nvars}, {format_poly(self)!r})"


def variables(nvars: int) -> list[Polynomial]:
    return [Polynomial.var(nvars, i) for i in range(1, nvars + 1)]


def divide_exact(f: Polynomial, d: Polynomial, order: MonomialOrder = DEGREVLEX) -> Polynomial | None:
    """Quotient ``q`` with ``f == q*d``, or ``None`` if the division leaves a remainder.

    A single polynomial is a Gröbner basis of the ideal it generates, so a
    zero remainder of multivariate division is equivalent to membership.
    """
    if d.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    if f.nvars != d.nvars:
        raise VariableCountError(f"{f.nvars} vs {d.nvars} variables")
    le, lc = d.leading_term(order)
    lc = Fraction(lc)
    tail = [(e, c) for e, c in d.items() if e != le]
    work = dict(f._terms)
    quot = {}
    key = order.key
    while work:
        e = max(work, key=key)
        c = work[e]
        if any(x < y for x, y in zip(e, le)):
            return None
        shift = tuple(x - y for x, y in zip(e, le))
        m = _norm(c / lc)
        quot[shift] = m
        del work[e]
        for eg, cg in tail:
            t = tuple(x + y for x, y in zip(eg, shift))
            v = work.get(t, 0) - m * cg
            if v:
                work[t] = _norm(v)
            else:
                work.pop(t, None)
    return Polynomial._raw(f.nvars, quot)


def is_multiple(f: Polynomial, d: Polynomial) -> bool:
    return divide_exact(f, d) is not None


# ---------------------------------------------------------------------------
# text grammar:  integers, rationals a/b, z1..zN, + - * ^ and parentheses


def _format_coef(c) -> str:
    c = Fraction(c)
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_monomial(e: Sequence[int]) -> str:
    parts = []
    for k, a in enumerate(e):
        if a == 1:
            parts.append(f"z{k + 1}")
        elif a:
            parts.append(f"z{k + 1}^{a}")
    return "*".join(parts)


def format_poly(p: Polynomial, order: MonomialOrder = DEGREVLEX) -> str:
    """Canonical text: nonconstant terms ascending under ``order``, constant last."""
    if p.is_zero():
        return "0"
    zero = (0,) * p.nvars
    items = sorted((t for t in p.items() if t[0] != zero), key=lambda t: order.key(t[0]))
    if zero in p._terms:
        items.append((zero, p._terms[zero]))
    out = []
    for idx, (e, c) in enumerate(items):
        neg = c < 0
        a = -c if neg else c
        mono = format_monomial(e)
        if not mono:
            body = _format_coef(a)
        elif a == 1:
            body = mono
        else:
            body = f"{_format_coef(a)}*{mono}"
        if idx == 0:
            out.append(f"-{body}" if neg else body)
        else:
            out.append(f" - {body}" if neg else f" + {body}")
    return "".join(out)


class ParseError(ValueError):
    pass


_TOKEN = re.compile(r"\s*(?:(\d+)|(dz\d+)|(z\d+)|(\*\*|[-+*/^()]))")


def tokenize(text: str) -> list[tuple[str, str]]:
    pos = 0
    out = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character at {pos}: {text[pos:pos + 10]!r}")
        num, dz, var, op = m.groups()
        if num is not None:
            out.append(("num", num))
        elif dz is not None:
            out.append(("dz", dz[2:]))
        elif var is not None:
            out.append(("var", var[1:]))
        else:
            out.append(("op", "^" if op == "**" else op))
        pos = m.end()
    return out


class _PolyParser:
    """Recursive descent over the token stream.

    expr   := ['-'|'+'] term (('+'|'-') term)*
    term   := factor (['*'] factor)*        -- juxtaposition multiplies
    factor := atom ['^' int]
    atom   := int ['/' int] | zK | '(' expr ')'
    """

    def __init__(self, tokens, nvars):
        self.toks = tokens
        self.i = 0
        self.nvars = nvars

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self, kind=None, value=None):
        tok = self.peek()
        if tok[0] is None or (kind and tok[0] != kind) or (value and tok[1] != value):
            raise ParseError(f"expected {value or kind}, got {tok[1]!r}")
        self.i += 1
        return tok

    def at_atom(self):
        kind, val = self.peek()
        return kind in ("num", "var") or (kind == "op" and val == "(")

    def expr(self):
        kind, val = self.peek()
        sign = 1
        if kind == "op" and val in "+-":
            self.take()
            sign = -1 if val == "-" else 1
        acc = self.term() * sign
        while True:
            kind, val = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                t = self.term()
                acc = acc + t if val == "+" else acc - t
            else:
                return acc

    def term(self):
        acc = self.factor()
        while True:
            kind, val = self.peek()
            if kind == "op" and val == "*":
                self.take()
                acc = acc * self.factor()
            elif self.at_atom():
                acc = acc * self.factor()
            else:
                return acc

    def factor(self):
        base = self.atom()
        kind, val = self.peek()
        if kind == "op" and val == "^":
            self.take()
            exp = int(self.take("num")[1])
            base = base ** exp
        return base

    def atom(self):
        kind, val = self.peek()
        if kind == "num":
            self.take()
            c = Fraction(int(val))
            k2, v2 = self.peek()
            if k2 == "op" and v2 == "/":
                self.take()
                den = int(self.take("num")[1])
                if den == 0:
                    raise ParseError("zero denominator")
                c = c / den
            return Polynomial.const(self.nvars, c)
        if kind == "var":
            self.take()
            i = int(val)
            if not 1 <= i <= self.nvars:
                raise ParseError(f"variable z{i} out of range for {self.nvars} variables")
            return Polynomial.var(self.nvars, i)
        if kind == "op" and val == "(":
            self.take()
            e = self.expr()
            self.take("op", ")")
            return e
        raise ParseError(f"unexpected token {val!r}")


def _infer_nvars(tokens) -> int:
    n = 0
    for kind, val in tokens:
        if kind in ("var", "dz"):
            n = max(n, int(val))
    return n


def parse(text: str, nvars: int | None = None) -> Polynomial:
    """Parse a polynomial; ``nvars`` defaults to the largest variable index used."""
    toks = tokenize(text)
    if not toks:
        raise ParseError("empty expression")
    if any(k == "dz" for k, _ in toks):
        raise ParseError("differentials are not allowed in a polynomial")
    if nvars is None:
        nvars = _infer_nvars(toks)
    p = _PolyParser(toks, nvars)
    out = p.expr()
    if p.i != len(toks):
        raise ParseError(f"trailing input at token {toks[p.i][1]!r}")
    return out


def from_terms(nvars: int, terms: Iterable[tuple[Sequence[int], object]]) -> Polynomial:
    acc: dict = {}
    for e, c in terms:
        e = tuple(e)
        acc[e] = acc.get(e, 0) + c
    return Polynomial(nvars, acc)
