"""Vector fields and differential forms on a smooth hypersurface X = {p = 0} in C^n.

A form in chart ``i`` is written in the basis dz_I with ``i`` not in I; the
coordinate z_i is then a function of the others and dz_i = -(1/q_i) sum_k q_k dz_k
where q_k = dp/dz_k.  Each coefficient is a pair (numerator, denominator)
where the denominator is a product of powers of the partials q_k, stored as an
exponent vector.  Coefficients keep ambient polynomial numerators; equalities
are decided by clearing denominators and testing divisibility by p.

On chart ``i`` the coordinate derivative along z_k (k != i) acts on ambient
representatives as delta_{ik} / q_i, where delta_{ik} = q_i d/dz_k - q_k d/dz_i;
this is independent of the representative since delta_{ik}(p*h) = p*delta_{ik}(h).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from vdpkit.poly import DEGREVLEX, Polynomial, divide_exact, format_poly, parse, tokenize


class TangencyError(ValueError):
    """A vector field fails to be tangent to the hypersurface."""


class ChartError(ValueError):
    """A chart is degenerate for the requested operation."""


# ---------------------------------------------------------------------------
# the hypersurface


class Hypersurface:
    """X = {p = 0} with cached partial derivatives and their products."""

    def __init__(self, p: Polynomial, name: str | None = None):
        if p.is_constant():
            raise ValueError("a hypersurface needs a nonconstant equation")
        self.p = p
        self.n = p.nvars
        self.name = name or f"X({p})"
        self.q = tuple(p.diff(k) for k in range(1, self.n + 1))
        self._powers: dict = {}

    def partial(self, k: int) -> Polynomial:
        return self.q[k - 1]

    def qpow(self, k: int, e: int) -> Polynomial:
        key = (k, e)
        if key not in self._powers:
            self._powers[key] = self.q[k - 1] ** e
        return self._powers[key]

    def den_poly(self, den: Sequence[int]) -> Polynomial:
        out = Polynomial.const(self.n, 1)
        for k, e in enumerate(den, start=1):
            if e:
                out = out * self.qpow(k, e)
        return out

    def is_multiple(self, f: Polynomial) -> bool:
        return f.is_zero() or divide_exact(f, self.p) is not None

    def reduce(self, f: Polynomial) -> Polynomial:
        """Normal form modulo p (degrevlex)."""
        from vdpkit.groebner import reduce_by

        return reduce_by(f, [self.p], DEGREVLEX)

    def __eq__(self, other):
        return isinstance(other, Hypersurface) and self.p == other.p

    def __hash__(self):
        return hash(self.p)

    def __repr__(self):
        return f"Hypersurface({self.name})"


@lru_cache(maxsize=None)
def level(n: int) -> Hypersurface:
    """X_n from the inductive family."""
    from vdpkit.family import build_pn

    return Hypersurface(build_pn(n), f"X_{n}")


def _surface(x) -> Hypersurface:
    return x if isinstance(x, Hypersurface) else level(x)


# ---------------------------------------------------------------------------
# vector fields


class VectorField:
    """sum_k c_k d/dz_k with polynomial coefficients, attached to a hypersurface."""

    __slots__ = ("X", "coeffs")

    def __init__(self, X: Hypersurface, coeffs: Sequence[Polynomial]):
        if len(coeffs) != X.n:
            raise ValueError(f"need {X.n} coefficients, got {len(coeffs)}")
        self.X = X
        self.coeffs = tuple(
            c if isinstance(c, Polynomial) else Polynomial.const(X.n, c) for c in coeffs
        )

    @classmethod
    def zero(cls, X) -> "VectorField":
        X = _surface(X)
        return cls(X, [Polynomial.zero(X.n)] * X.n)

    @property
    def n(self) -> int:
        return self.X.n

    def _same(self, other: "VectorField"):
        if self.X != other.X:
            raise ValueError("vector fields live on different hypersurfaces")

    def __add__(self, other: "VectorField") -> "VectorField":
        self._same(other)
        return VectorField(self.X, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other: "VectorField") -> "VectorField":
        self._same(other)
        return VectorField(self.X, [a - b for a, b in zip(self.coeffs, other.coeffs)])

    def __neg__(self):
        return VectorField(self.X, [-c for c in self.coeffs])

    def __mul__(self, h) -> "VectorField":
        """Multiply by a scalar or a polynomial function."""
        return VectorField(self.X, [c * h for c in self.coeffs])

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, VectorField) and self.X == other.X and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)

    def __call__(self, h: Polynomial) -> Polynomial:
        return apply(self, h)

    def __str__(self):
        parts = [f"({c})*d/dz{k}" for k, c in enumerate(self.coeffs, start=1) if not c.is_zero()]
        return " + ".join(parts) if parts else "0"

    def __repr__(self):
        return f"VectorField({self})"

    def evaluate(self, point):
        return [c.eval(point) for c in self.coeffs]


def apply(field: VectorField, h: Polynomial) -> Polynomial:
    """The derivation sum_k c_k dh/dz_k."""
    if h.nvars != field.n:
        raise ValueError(f"function in {h.nvars} variables, field on level {field.n}")
    out = Polynomial.zero(field.n)
    for k, c in enumerate(field.coeffs, start=1):
        if not c.is_zero():
            d = h.diff(k)
            if not d.is_zero():
                out = out + c * d
    return out


def lie_bracket(xi: VectorField, eta: VectorField) -> VectorField:
    """[xi, eta] = xi o eta - eta o xi as a derivation."""
    xi._same(eta)
    return VectorField(xi.X, [apply(xi, b) - apply(eta, a) for a, b in zip(xi.coeffs, eta.coeffs)])


def delta(X, i: int, j: int) -> VectorField:
    """delta_ij = q_i d/dz_j - q_j d/dz_i."""
    X = _surface(X)
    if i == j:
        raise ValueError("delta_ij needs i != j")
    if not (1 <= i <= X.n and 1 <= j <= X.n):
        raise IndexError(f"indices ({i}, {j}) out of range for n = {X.n}")
    coeffs = [Polynomial.zero(X.n)] * X.n
    coeffs[j - 1] = X.partial(i)
    coeffs[i - 1] = -X.partial(j)
    return VectorField(X, coeffs)


def is_tangent(field: VectorField) -> bool:
    return field.X.is_multiple(apply(field, field.X.p))


def kernel_variables(n: int, i: int, j: int) -> list[int]:
    """Variables annihilated by delta_ij: every z_k with k not in {i, j}."""
    return [k for k in range(1, n + 1) if k not in (i, j)]


# ---------------------------------------------------------------------------
# forms


def _sort_sign(idx: Sequence[int]) -> tuple[int, tuple[int, ...]]:
    """Sign of the permutation sorting ``idx`` (0 on a repeat) and the sorted tuple."""
    if len(set(idx)) != len(idx):
        return 0, ()
    lst = list(idx)
    sign = 1
    for a in range(len(lst)):
        for b in range(len(lst) - 1 - a):
            if lst[b] > lst[b + 1]:
                lst[b], lst[b + 1] = lst[b + 1], lst[b]
                sign = -sign
    return sign, tuple(lst)


def _den_lcm(a, b):
    return tuple(max(x, y) for x, y in zip(a, b))


class ChartForm:
    """A k-form on X in chart ``chart`` (``None`` for the ambient basis of C^n).

    ``coeffs`` maps ascending index tuples I to ``(numerator, den)`` with
    ``den`` an exponent vector over the partials q_1..q_n.
    """

    __slots__ = ("X", "chart", "degree", "coeffs")

    def __init__(self, X: Hypersurface, chart: int | None, degree: int,
                 coeffs: Mapping[tuple[int, ...], tuple[Polynomial, tuple[int, ...]]] | None = None):
        self.X = X
        self.chart = chart
        self.degree = degree
        zero_den = (0,) * X.n
        clean = {}
        for I, val in (coeffs or {}).items():
            if isinstance(val, Polynomial):
                num, den = val, zero_den
            else:
                num, den = val
            I = tuple(I)
            if len(I) != degree or list(I) != sorted(set(I)):
                raise ValueError(f"basis index {I} is not an ascending {degree}-subset")
            if chart is not None and chart in I:
                raise ChartError(f"dz{chart} is not a basis element on chart {chart}")
            if not num.is_zero():
                clean[I] = (num, tuple(den))
        self.coeffs = clean

    # -- construction -------------------------------------------------------

    @classmethod
    def zero(cls, X, chart, degree) -> "ChartForm":
        return cls(_surface(X), chart, degree)

    @classmethod
    def function(cls, X, h: Polynomial, chart: int | None = None) -> "ChartForm":
        X = _surface(X)
        return cls(X, chart, 0, {(): h})

    @classmethod
    def ambient(cls, X, terms: Mapping[tuple[int, ...], Polynomial]) -> "ChartForm":
        """Ambient form sum h_I dz_I; unsorted index tuples are sorted with sign."""
        X = _surface(X)
        acc: dict = {}
        degree = None
        for I, h in terms.items():
            s, J = _sort_sign(I)
            degree = len(I) if degree is None else degree
            if len(I) != degree:
                raise ValueError("mixed degrees")
            if s:
                acc[J] = acc.get(J, Polynomial.zero(X.n)) + h * s
        return cls(X, None, degree or 0, acc)

    def _like(self, coeffs, degree=None, chart="same"):
        return ChartForm(self.X, self.chart if chart == "same" else chart,
                         self.degree if degree is None else degree, coeffs)

    # -- linear structure ---------------------------------------------------

    def _compatible(self, other: "ChartForm"):
        if self.X != other.X or self.chart != other.chart or self.degree != other.degree:
            raise ValueError("forms differ in surface, chart or degree")

    def __add__(self, other: "ChartForm") -> "ChartForm":
        self._compatible(other)
        out = dict(self.coeffs)
        for I, (n2, d2) in other.coeffs.items():
            if I in out:
                n1, d1 = out[I]
                out[I] = _add_frac(self.X, n1, d1, n2, d2)
            else:
                out[I] = (n2, d2)
        return self._like(out)

    def __neg__(self):
        return self._like({I: (-n, d) for I, (n, d) in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, h) -> "ChartForm":
        """Multiply by a rational scalar or polynomial function."""
        return self._like({I: (n * h, d) for I, (n, d) in self.coeffs.items()})

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_zero_mod(self) -> bool:
        """All cleared numerators are multiples of p."""
        return all(self.X.is_multiple(n) for n, _ in self.coeffs.values())

    def common_denominator(self) -> "ChartForm":
        """Same form with every coefficient over one denominator."""
        if not self.coeffs:
            return self
        L = (0,) * self.X.n
        for _, d in self.coeffs.values():
            L = _den_lcm(L, d)
        out = {}
        for I, (n, d) in self.coeffs.items():
            extra = tuple(a - b for a, b in zip(L, d))
            out[I] = (n * self.X.den_poly(extra) if any(extra) else n, L)
        return self._like(out)

    def cleared(self) -> dict:
        """Numerators over the common denominator, keyed by basis index."""
        f = self.common_denominator()
        return {I: n for I, (n, _) in f.coeffs.items()}

    def equal_mod(self, other: "ChartForm") -> bool:
        return (self - other).is_zero_mod()

    def polynomial_coefficients(self) -> dict:
        """Coefficients as polynomials; raises if any denominator is nontrivial."""
        out = {}
        for I, (n, d) in self.coeffs.items():
            if any(d):
                raise ValueError("form has nontrivial denominators")
            out[I] = n
        return out

    # -- text ---------------------------------------------------------------

    def __str__(self):
        return format_form(self)

    def __repr__(self):
        return f"ChartForm(chart={self.chart}, degree={self.degree}, {format_form(self)!r})"


def _add_frac(X, n1, d1, n2, d2):
    if d1 == d2:
        return (n1 + n2, d1)
    L = _den_lcm(d1, d2)
    e1 = tuple(a - b for a, b in zip(L, d1))
    e2 = tuple(a - b for a, b in zip(L, d2))
    return (n1 * X.den_poly(e1) + n2 * X.den_poly(e2), L)


def wedge(a: ChartForm, b: ChartForm) -> ChartForm:
    if a.X != b.X or a.chart != b.chart:
        raise ValueError("forms differ in surface or chart")
    X = a.X
    out: dict = {}
    for I, (n1, d1) in a.coeffs.items():
        for J, (n2, d2) in b.coeffs.items():
            s, K = _sort_sign(I + J)
            if not s:
                continue
            term = (n1 * n2 * s, tuple(x + y for x, y in zip(d1, d2)))
            if K in out:
                out[K] = _add_frac(X, *out[K], *term)
            else:
                out[K] = term
    return ChartForm(X, a.chart, a.degree + b.degree, out)


def dz(X, k: int, chart: int | None = None) -> ChartForm:
    """The differential dz_k, expressed in ``chart`` when given."""
    X = _surface(X)
    form = ChartForm(X, None, 1, {(k,): Polynomial.const(X.n, 1)})
    return form if chart is None else restrict_to_chart(form, chart)


def volume_chart(X, i: int) -> ChartForm:
    """omega_i = (1/q_i) dz_1 ^ ... ^ (no dz_i) ^ ... ^ dz_n on chart i."""
    X = _surface(X)
    if not 1 <= i <= X.n:
        raise IndexError(f"chart {i} out of range for n = {X.n}")
    I = tuple(k for k in range(1, X.n + 1) if k != i)
    den = [0] * X.n
    den[i - 1] = 1
    return ChartForm(X, i, X.n - 1, {I: (Polynomial.const(X.n, 1), tuple(den))})


def restrict_to_chart(phi: ChartForm, j: int) -> ChartForm:
    """Rewrite ``phi`` in the basis of chart j using dp = 0."""
    X = phi.X
    if phi.chart == j:
        return phi
    if X.partial(j).is_zero():
        raise ChartError(f"dp/dz{j} vanishes identically")
    out: dict = {}
    for I, (num, den) in phi.coeffs.items():
        if j not in I:
            out[I] = _add_frac(X, *out[I], num, den) if I in out else (num, den)
            continue
        pos = I.index(j)
        rest = I[:pos] + I[pos + 1:]
        for k in range(1, X.n + 1):
            if k == j or k in rest:
                continue
            qk = X.partial(k)
            if qk.is_zero():
                continue
            s, K = _sort_sign(I[:pos] + (k,) + I[pos + 1:])
            new_den = list(den)
            new_den[j - 1] += 1
            term = (-(num * qk) * s, tuple(new_den))
            out[K] = _add_frac(X, *out[K], *term) if K in out else term
    return ChartForm(X, j, phi.degree, out)


def interior_product(xi: VectorField, phi: ChartForm) -> ChartForm:
    """Contraction iota_xi phi; dz_k(xi) = c_k for a tangent field xi."""
    if xi.X != phi.X:
        raise ValueError("field and form live on different hypersurfaces")
    if phi.degree == 0:
        raise ValueError("cannot contract a 0-form")
    X = phi.X
    out: dict = {}
    for I, (num, den) in phi.coeffs.items():
        for r, k in enumerate(I):
            c = xi.coeffs[k - 1]
            if c.is_zero():
                continue
            J = I[:r] + I[r + 1:]
            term = (num * c * (-1 if r % 2 else 1), den)
            out[J] = _add_frac(X, *out[J], *term) if J in out else term
    return ChartForm(X, phi.chart, phi.degree - 1, out)


def _derivative_numerators(X: Hypersurface, chart: int | None, k: int):
    """(op, extra) where d/dz_k on the chart acts as op(.)/extra on representatives."""
    if chart is None:
        return (lambda h: h.diff(k)), None
    qi = X.partial(chart)
    qk = X.partial(k)

    def op(h):
        a = h.diff(k)
        b = h.diff(chart)
        out = Polynomial.zero(X.n)
        if not a.is_zero():
            out = out + qi * a
        if not b.is_zero():
            out = out - qk * b
        return out

    return op, chart


def exterior_derivative(phi: ChartForm) -> ChartForm:
    """d phi on the chart (or ambiently), with the quotient rule on denominators."""
    X = phi.X
    n = X.n
    out: dict = {}
    directions = [k for k in range(1, n + 1) if k != phi.chart]
    for I, (num, den) in phi.coeffs.items():
        support = [l for l in range(1, n + 1) if den[l - 1]]
        Q = Polynomial.const(n, 1)
        for l in support:
            Q = Q * X.partial(l)
        for k in directions:
            if k in I:
                continue
            op, extra = _derivative_numerators(X, phi.chart, k)
            # d(N/D) = (op(N) Q - N sum_l e_l op(q_l) Q/q_l) / (extra * D * Q)
            top = op(num) * Q if support else op(num)
            for l in support:
                oq = op(X.partial(l))
                if oq.is_zero():
                    continue
                rest = Polynomial.const(n, 1)
                for m in support:
                    if m != l:
                        rest = rest * X.partial(m)
                top = top - num * oq * rest * den[l - 1]
            if top.is_zero():
                continue
            new_den = list(den)
            for l in support:
                new_den[l - 1] += 1
            if extra is not None:
                new_den[extra - 1] += 1
            s, K = _sort_sign((k,) + I)
            term = (top * s, tuple(new_den))
            out[K] = _add_frac(X, *out[K], *term) if K in out else term
    return ChartForm(X, phi.chart, phi.degree + 1, out)


def default_chart(X) -> int:
    """Largest index whose partial is not identically zero."""
    X = _surface(X)
    for i in range(X.n, 0, -1):
        if not X.partial(i).is_zero():
            return i
    raise ChartError("all partial derivatives vanish")


def theta(X, xi: VectorField, chart: int | None = None) -> ChartForm:
    """iota_xi omega on the chart (default: the largest usable index)."""
    X = _surface(X)
    if not is_tangent(xi):
        raise TangencyError("vector field is not tangent to the hypersurface")
    chart = default_chart(X) if chart is None else chart
    return interior_product(xi, volume_chart(X, chart))


def divergence_free(X, xi: VectorField, charts: Iterable[int] | None = None) -> bool:
    """d(iota_xi omega) vanishes on X in every tested chart."""
    X = _surface(X)
    if not is_tangent(xi):
        raise TangencyError("vector field is not tangent to the hypersurface")
    charts = [default_chart(X)] if charts is None else list(charts)
    return all(exterior_derivative(theta(X, xi, c)).is_zero_mod() for c in charts)


# ---------------------------------------------------------------------------
# the atlas of chart volume forms


def chart_compatibility(X, i: int, j: int) -> int:
    """Sign eps with omega_i = eps * omega_j on the overlap of charts i and j."""
    X = _surface(X)
    if i == j:
        raise ValueError("charts must differ")
    moved = restrict_to_chart(volume_chart(X, i), j)
    target = volume_chart(X, j)
    for eps in (1, -1):
        if moved.equal_mod(target * eps):
            return eps
    raise ChartError(f"omega_{i} and omega_{j} are not compatible up to sign")


@dataclass
class VolumeAtlas:
    n: int
    forms: dict
    signs: dict

    @classmethod
    def build(cls, X) -> "VolumeAtlas":
        X = _surface(X)
        forms = {i: volume_chart(X, i) for i in range(1, X.n + 1)}
        signs = {}
        for i in range(1, X.n + 1):
            for j in range(1, X.n + 1):
                if i != j:
                    signs[(i, j)] = chart_compatibility(X, i, j)
        return cls(X.n, forms, signs)

    def consistent(self) -> bool:
        return all(self.signs[(i, j)] * self.signs[(j, i)] == 1 for (i, j) in self.signs)

    def to_dict(self):
        return {"n": self.n, "forms": {str(i): str(f) for i, f in self.forms.items()},
                "signs": {f"{i},{j}": s for (i, j), s in sorted(self.signs.items())}}


# ---------------------------------------------------------------------------
# text: polynomial grammar extended with dzK tokens joined by ^


def _format_den(X: Hypersurface, den) -> str:
    parts = []
    for k, e in enumerate(den, start=1):
        if not e:
            continue
        q = X.partial(k)
        base = f"({q})" if len(q) > 1 or e > 1 else str(q)
        parts.append(base if e == 1 else f"{base}^{e}")
    text = "*".join(parts)
    if len(parts) == 1 and (text.startswith("(") or "*" not in text):
        return text
    return f"({text})"


def format_form(phi: ChartForm) -> str:
    """Display text; coefficients without denominators round-trip through parse_form."""
    if phi.is_zero():
        return "0"
    chunks = []
    for I in sorted(phi.coeffs):
        num, den = phi.coeffs[I]
        basis = "^".join(f"dz{k}" for k in I)
        coef = format_poly(num)
        if any(den):
            coef = f"({coef})" if len(num) > 1 else coef
            coef = f"{coef}/{_format_den(phi.X, den)}"
        elif len(num) > 1:
            coef = f"({coef})"
        if not basis:
            chunks.append(coef)
        elif coef == "1":
            chunks.append(basis)
        elif coef == "-1":
            chunks.append(f"-{basis}")
        else:
            chunks.append(f"{coef} {basis}")
    text = chunks[0]
    for c in chunks[1:]:
        text += f" - {c[1:]}" if c.startswith("-") else f" + {c}"
    return text


def parse_form(text: str, X) -> ChartForm:
    """Parse an ambient polynomial form such as ``z2 dz3 - (z1 + 1) dz1^dz4``.

    Each term is a product of polynomial factors followed by an optional
    wedge chain of differentials; ``^`` after a ``dzK`` token is a wedge.
    """
    from vdpkit.poly import ParseError, _PolyParser

    X = _surface(X)
    toks = tokenize(text)
    if not toks:
        raise ParseError("empty form")
    for kind, val in toks:
        if kind in ("var", "dz") and not 1 <= int(val) <= X.n:
            raise ParseError(f"index {val} out of range for n = {X.n}")
    terms: dict = {}
    parser = _PolyParser(toks, X.n)
    degree = None
    sign = 1
    kind, val = parser.peek()
    if kind == "op" and val in "+-":
        parser.take()
        sign = -1 if val == "-" else 1
    while True:
        coef = Polynomial.const(X.n, sign)
        idx: list[int] = []
        seen = False  # a term needs at least one factor; '*' only joins factors
        while True:
            kind, val = parser.peek()
            if kind == "dz":
                parser.take()
                idx.append(int(val))
                seen = True
                k2, v2 = parser.peek()
                if k2 == "op" and v2 == "^":
                    parser.take()
                    if parser.peek()[0] != "dz":
                        raise ParseError("expected a differential after ^")
                continue
            if kind == "op" and val == "*":
                if not seen:
                    raise ParseError("'*' without a left factor")
                parser.take()
                if not (parser.at_atom() or parser.peek()[0] == "dz"):
                    raise ParseError("'*' without a right factor")
                continue
            if parser.at_atom():
                if idx:
                    raise ParseError("polynomial factor after differentials")
                coef = coef * parser.factor()
                seen = True
                continue
            break
        if not seen:
            raise ParseError(f"missing term before {val!r}" if kind else "form ends after an operator")
        if degree is None:
            degree = len(idx)
        elif degree != len(idx):
            raise ParseError("terms of different degrees")
        s, J = _sort_sign(idx)
        if s:
            terms[J] = terms.get(J, Polynomial.zero(X.n)) + coef * s
        kind, val = parser.peek()
        if kind is None:
            break
        if kind == "op" and val in "+-":
            parser.take()
            sign = -1 if val == "-" else 1
            continue
        raise ParseError(f"unexpected token {val!r}")
    return ChartForm(X, None, degree or 0, terms)
