"""Realising exact forms d(alpha) as Theta-images of Lie expressions in the delta_ij.

An expression tree is built from leaves h*delta_ij (h in the kernel of
delta_ij), Lie brackets, rational scalings and sums.  For a target
alpha we expand Theta of every candidate expression in one chart, bring all
numerators over the chart denominator q_c, reduce modulo p and solve the
resulting linear system over Q for the weights.  The answer is then checked
again from scratch through forms.theta, so the solver never has the last word.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from vdpkit.forms import (ChartForm, Hypersurface, VectorField, _surface, apply, default_chart,
                          delta, divergence_free, exterior_derivative, format_form,
                          kernel_variables, lie_bracket, restrict_to_chart, theta)
from vdpkit.poly import ParseError, Polynomial, format_poly, parse
from vdpkit.report import Certificate, Config, Report


class KernelConditionError(ValueError):
    """A leaf h*delta_ij with delta_ij(h) != 0."""


class RealizationError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# expression trees


class BracketExpr:
    """Base class; subclasses are Leaf, Bracket, Scale and Sum."""

    def text(self) -> str:
        raise NotImplementedError

    def __str__(self):
        return self.text()

    def __repr__(self):
        return f"BracketExpr({self.text()})"

    def __eq__(self, other):
        return isinstance(other, BracketExpr) and self.text() == other.text()

    def __hash__(self):
        return hash(self.text())

    def depth(self) -> int:
        return 0


@dataclass(frozen=True, eq=False)
class Leaf(BracketExpr):
    i: int
    j: int
    h: Polynomial | None = None

    def text(self):
        d = f"d=δ[{self.i},{self.j}]"
        if self.h is None or (self.h.is_constant() and self.h.constant_term() == 1):
            return f"leaf({d})"
        return f"leaf(h={format_poly(self.h)}, {d})"


@dataclass(frozen=True, eq=False)
class Bracket(BracketExpr):
    left: BracketExpr
    right: BracketExpr

    def text(self):
        return f"bracket({self.left.text()}, {self.right.text()})"

    def depth(self):
        return 1 + max(self.left.depth(), self.right.depth())


@dataclass(frozen=True, eq=False)
class Scale(BracketExpr):
    c: Fraction
    expr: BracketExpr

    def text(self):
        return f"scale({self.c}, {self.expr.text()})"

    def depth(self):
        return self.expr.depth()


@dataclass(frozen=True, eq=False)
class Sum(BracketExpr):
    terms: tuple = ()

    def text(self):
        return "sum(" + ", ".join(t.text() for t in self.terms) + ")"

    def depth(self):
        return max((t.depth() for t in self.terms), default=0)


ZERO = Sum(())


def evaluate(expr: BracketExpr, X) -> VectorField:
    """The vector field an expression denotes on X (a Hypersurface or a level n)."""
    X = _surface(X)
    if isinstance(expr, Leaf):
        d = delta(X, expr.i, expr.j)
        if expr.h is None:
            return d
        h = expr.h if expr.h.nvars == X.n else expr.h.embed(X.n)
        if not apply(d, h).is_zero():
            raise KernelConditionError(f"δ[{expr.i},{expr.j}]({h}) is not zero")
        return d * h
    if isinstance(expr, Bracket):
        return lie_bracket(evaluate(expr.left, X), evaluate(expr.right, X))
    if isinstance(expr, Scale):
        return evaluate(expr.expr, X) * expr.c
    if isinstance(expr, Sum):
        out = VectorField.zero(X)
        for t in expr.terms:
            out = out + evaluate(t, X)
        return out
    raise TypeError(f"not an expression: {expr!r}")


# -- parsing the prefix notation ---------------------------------------------


def _split_args(body: str) -> list[str]:
    parts, depth, cur = [], 0, []
    for ch in body:
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur).strip())
            cur = []
        else:
            cur.append(ch)
    tail = "".join(cur).strip()
    if tail:
        parts.append(tail)
    return parts


def parse_expr(text: str, n: int) -> BracketExpr:
    """Inverse of BracketExpr.text()."""
    text = text.strip()
    head, sep, rest = text.partition("(")
    if not sep or not rest.endswith(")"):
        raise ParseError(f"malformed expression: {text!r}")
    head = head.strip()
    args = _split_args(rest[:-1])
    if head == "leaf":
        h = None
        pair = None
        for a in args:
            key, _, val = a.partition("=")
            key, val = key.strip(), val.strip()
            if key == "h":
                h = parse(val, n)
            elif key == "d":
                val = val.replace("delta", "δ")
                if not (val.startswith("δ[") and val.endswith("]")):
                    raise ParseError(f"bad generator {val!r}")
                i, j = (int(x) for x in val[2:-1].split(","))
                if i == j or not (1 <= i <= n and 1 <= j <= n):
                    raise ParseError(f"generator indices out of range: {val!r}")
                pair = (i, j)
            else:
                raise ParseError(f"unknown leaf field {key!r}")
        if pair is None:
            raise ParseError("leaf without generator")
        return Leaf(pair[0], pair[1], h)
    if head == "bracket":
        if len(args) != 2:
            raise ParseError("bracket takes two arguments")
        return Bracket(parse_expr(args[0], n), parse_expr(args[1], n))
    if head == "scale":
        if len(args) != 2:
            raise ParseError("scale takes two arguments")
        return Scale(Fraction(args[0]), parse_expr(args[1], n))
    if head == "sum":
        return Sum(tuple(parse_expr(a, n) for a in args))
    raise ParseError(f"unknown node {head!r}")


# ---------------------------------------------------------------------------
# exact sparse linear algebra over Q


def solve_rational(columns: list[dict], rhs: dict) -> list[Fraction] | None:
    """Some w with sum_c w[c] * columns[c] == rhs, or None if inconsistent.

    Columns are sparse dicts row_key -> Fraction.  Free variables are set to
    zero and pivots prefer low column indices, so earlier (simpler) columns
    are used first.
    """
    rows: dict = {}
    for c, col in enumerate(columns):
        for key, v in col.items():
            if v:
                rows.setdefault(key, {})[c] = Fraction(v)
    for key in rhs:
        rows.setdefault(key, {})
    pivots: list[tuple[int, dict, Fraction]] = []
    where: dict[int, int] = {}
    for key in sorted(rows, key=repr):
        row = dict(rows[key])
        b = Fraction(rhs.get(key, 0))
        # eliminate existing pivot columns, smallest first
        while True:
            hit = [c for c in row if c in where]
            if not hit:
                break
            c = min(hit)
            _, prow, pb = pivots[where[c]]
            f = row[c]
            for cc, v in prow.items():
                nv = row.get(cc, 0) - f * v
                if nv:
                    row[cc] = nv
                else:
                    row.pop(cc, None)
            b -= f * pb
        if not row:
            if b != 0:
                return None
            continue
        c = min(row)
        inv = 1 / row[c]
        row = {cc: v * inv for cc, v in row.items()}
        where[c] = len(pivots)
        pivots.append((c, row, b * inv))
    w = [Fraction(0)] * len(columns)
    for c, row, b in reversed(pivots):
        w[c] = b - sum(v * w[cc] for cc, v in row.items() if cc != c)
    return w


# ---------------------------------------------------------------------------
# coordinates of chart forms


def _monomials(variables: list[int], n: int, max_deg: int, min_deg: int = 0):
    for d in range(min_deg, max_deg + 1):
        for combo in itertools.combinations_with_replacement(variables, d):
            e = [0] * n
            for v in combo:
                e[v - 1] += 1
            yield Polynomial.monomial(tuple(e))


def coordinates(phi: ChartForm) -> dict:
    """Sparse vector of phi over the chart denominator q_c, reduced mod p.

    Keys are (basis index, exponent).  Only denominators dividing q_c are
    accepted, which covers Theta-images and restricted ambient forms.
    """
    X, c = phi.X, phi.chart
    if c is None:
        raise ValueError("coordinates need a chart form")
    out: dict = {}
    for I, (num, den) in phi.coeffs.items():
        if any(e for k, e in enumerate(den, start=1) if k != c) or den[c - 1] > 1:
            raise ValueError("denominator is not a divisor of the chart partial")
        N = num if den[c - 1] else num * X.partial(c)
        for e, v in X.reduce(N).items():
            out[(I, e)] = out.get((I, e), 0) + Fraction(v)
    return {k: v for k, v in out.items() if v}


class _Pool:
    """Candidate expressions with cached Theta-coordinates, per surface and chart."""

    _cache: dict = {}

    def __init__(self, X: Hypersurface, chart: int):
        self.X, self.chart = X, chart
        key = (X.p, chart)
        self.vectors = self._cache.setdefault(key, {})

    def vector(self, expr: BracketExpr) -> dict:
        k = expr.text()
        if k not in self.vectors:
            field_ = evaluate(expr, self.X)
            self.vectors[k] = coordinates(theta(self.X, field_, self.chart))
        return self.vectors[k]


TIER_NAMES = ("leaf", "bracket", "kernel-bracket", "widened")


def candidate_pool(n: int, m_degree: int, tier: int, degree_bound: int = 2) -> list[BracketExpr]:
    """Candidates of all tiers <= ``tier``, simplest first.

    0: leaves h*delta_ij with deg h <= deg(m) - 1
    1: plus [delta_ij, delta_kl]
    2: plus [h*delta_ij, delta_kl] with 1 <= deg h <= max(deg(m) - 1, 1)
    3: plus leaves up to ``degree_bound`` and [h1*delta_ij, h2*delta_kl] with
       deg h1 + deg h2 <= ``degree_bound``
    """
    pairs = list(itertools.combinations(range(1, n + 1), 2))
    out: list[BracketExpr] = []
    seen: set = set()

    def add(e):
        t = e.text()
        if t not in seen:
            seen.add(t)
            out.append(e)

    def leaf(i, j, h):
        return Leaf(i, j, None if h.is_constant() else h)

    top = max(m_degree - 1, 0)
    for i, j in pairs:
        for h in _monomials(kernel_variables(n, i, j), n, top):
            add(leaf(i, j, h))
    if tier >= 1:
        for a, b in itertools.combinations(pairs, 2):
            add(Bracket(Leaf(*a), Leaf(*b)))
    if tier >= 2:
        hi = max(m_degree - 1, 1)
        for a in pairs:
            for b in pairs:
                if a == b:
                    continue
                for h in _monomials(kernel_variables(n, *a), n, hi, 1):
                    add(Bracket(Leaf(a[0], a[1], h), Leaf(*b)))
    if tier >= 3:
        for i, j in pairs:
            for h in _monomials(kernel_variables(n, i, j), n, degree_bound):
                add(leaf(i, j, h))
        for a, b in itertools.combinations(pairs, 2):
            for h1 in _monomials(kernel_variables(n, *a), n, degree_bound):
                d1 = h1.total_degree()
                for h2 in _monomials(kernel_variables(n, *b), n, degree_bound - d1):
                    if h1.is_constant() and h2.is_constant():
                        continue
                    add(Bracket(leaf(a[0], a[1], h1), leaf(b[0], b[1], h2)))
    return out


# ---------------------------------------------------------------------------
# realisation


def target_form(X: Hypersurface, alpha: ChartForm, chart: int) -> ChartForm:
    """d(alpha) restricted to the chart."""
    return restrict_to_chart(exterior_derivative(alpha), chart)


def _solve(X, chart, target_vec, pool: list[BracketExpr]):
    P = _Pool(X, chart)
    cols = [P.vector(e) for e in pool]
    return solve_rational(cols, target_vec)


def _flatten(expr: BracketExpr, scale=Fraction(1)):
    """Linear combination {text: (coef, atom)} of an expression."""
    out: dict = {}
    if isinstance(expr, Sum):
        for t in expr.terms:
            for k, (c, a) in _flatten(t, scale).items():
                out[k] = (out[k][0] + c, a) if k in out else (c, a)
    elif isinstance(expr, Scale):
        out = _flatten(expr.expr, scale * expr.c)
    else:
        out[expr.text()] = (scale, expr)
    return out


def combine(terms) -> BracketExpr:
    """sum(scale(c, atom), ...) with equal atoms merged and zero weights dropped."""
    acc: dict = {}
    order: list = []
    for t in terms:
        for k, (c, a) in _flatten(t).items():
            if k in acc:
                acc[k] = (acc[k][0] + c, a)
            else:
                acc[k] = (c, a)
                order.append(k)
    return Sum(tuple(Scale(acc[k][0], acc[k][1]) for k in order if acc[k][0] != 0))


@dataclass
class MonomialRealization:
    expr: BracketExpr
    tier: int
    widened: bool


def realize_monomial(n: int, m: Polynomial, idx: tuple[int, ...] = (), degree_bound: int = 2,
                     chart: int | None = None) -> MonomialRealization:
    """Expression xi with Theta(xi) = d(m dz_idx), searching the tiers in turn.

    ``idx`` selects the basis (n-3)-form of alpha (empty for n = 3).
    Raises RealizationError when even the widened pool does not span.
    """
    X = _surface(n)
    if len(m) != 1 and not m.is_zero():
        raise ValueError("m must be a single monomial")
    if len(idx) != n - 3:
        raise ValueError(f"basis selector must have {n - 3} indices")
    if m.is_zero():
        return MonomialRealization(ZERO, 0, False)
    used = [v for v in range(1, n + 1) if m.degree_in(v) > 0]
    if len(used) > n - 1:
        raise ValueError("monomial involves all n variables")
    chart = default_chart(X) if chart is None else chart
    (e, c), = m.items()
    alpha = ChartForm.ambient(X, {tuple(idx): Polynomial.monomial(e)})
    tvec = coordinates(target_form(X, alpha, chart))
    if not tvec:
        return MonomialRealization(ZERO, 0, False)
    deg = m.total_degree()
    # the widened pool must reach one degree past m (brackets lose a degree)
    wide = max(degree_bound, deg + 1)
    for tier in range(len(TIER_NAMES)):
        pool = candidate_pool(n, deg, tier, wide)
        w = _solve(X, chart, tvec, pool)
        if w is not None:
            expr = combine(Scale(wi * Fraction(c), e_) for wi, e_ in zip(w, pool) if wi)
            return MonomialRealization(expr, tier, tier == len(TIER_NAMES) - 1)
    raise RealizationError(f"no combination of candidates realises d({m} dz{idx}) on X_{n}")


@dataclass
class RealizationCertificate:
    n: int
    alpha: ChartForm
    expr: BracketExpr
    residual: ChartForm
    chart: int
    divergence_free: bool
    tiers: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return self.residual.is_zero() and self.divergence_free and not self.failures

    def residual_text(self) -> str:
        return format_form(self.residual)

    def to_certificate(self) -> Certificate:
        return Certificate("generation", "realize_exact",
                           {"n": self.n, "alpha": format_form(self.alpha)}, self.valid,
                           self.to_dict())

    def to_dict(self):
        return {
            "n": self.n,
            "alpha": format_form(self.alpha),
            "expression": self.expr.text(),
            "residual": self.residual_text(),
            "chart": self.chart,
            "divergence_free": self.divergence_free,
            "tiers": self.tiers,
            "widened": sorted(k for k, t in self.tiers.items() if t == TIER_NAMES[-1]),
            "failures": self.failures,
        }


def residual(X, expr: BracketExpr, alpha: ChartForm, chart: int) -> tuple[ChartForm, bool]:
    """Theta(eval(expr)) - d(alpha) with numerators reduced mod p, plus the divergence test."""
    X = _surface(X)
    field_ = evaluate(expr, X)
    diff = theta(X, field_, chart) - target_form(X, alpha, chart)
    diff = diff.common_denominator()
    red = ChartForm(X, chart, diff.degree,
                    {I: (X.reduce(num), den) for I, (num, den) in diff.coeffs.items()})
    return red, divergence_free(X, field_, [chart])


def realize_exact(n: int, alpha: ChartForm, degree_bound: int = 2,
                  chart: int | None = None) -> RealizationCertificate:
    """Find xi with Theta(xi) = d(alpha) and certify it independently."""
    X = _surface(n)
    if alpha.degree != n - 3:
        raise ValueError(f"alpha must be an {n - 3}-form on X_{n}")
    coeffs = alpha.polynomial_coefficients()
    chart = default_chart(X) if chart is None else chart
    parts, tiers, failures = [], {}, []
    for I in sorted(coeffs):
        for e, c in sorted(coeffs[I].items()):
            mono = Polynomial.monomial(e)
            label = format_form(ChartForm.ambient(X, {I: mono}))
            try:
                r = realize_monomial(n, mono * c, I, degree_bound, chart)
            except RealizationError as exc:
                failures.append(f"{label}: {exc}")
                continue
            tiers[label] = TIER_NAMES[r.tier]
            parts.append(r.expr)
    expr = combine(parts)
    res, div = residual(X, expr, alpha, chart)
    return RealizationCertificate(n, alpha, expr, res, chart, div, tiers, failures)


def generators(n: int, degree_bound: int) -> list[ChartForm]:
    """Monomial (n-3)-forms m dz_I with deg m <= bound and m in at most n-1 variables."""
    X = _surface(n)
    out = []
    for I in itertools.combinations(range(1, n + 1), n - 3):
        for m in _monomials(list(range(1, n + 1)), n, degree_bound):
            if sum(1 for v in range(1, n + 1) if m.degree_in(v) > 0) > n - 1:
                continue
            out.append(ChartForm.ambient(X, {I: m}))
    return out


HEADER_NOTES = (
    "H_{n-2}(X_n) = 0 (homology module), so closed and exact (n-2)-forms agree "
    "and realising every d(alpha) covers the Theta targets",
    "Lambda is read as the inverse direction of Theta composed with d: alpha -> xi "
    "with Theta(xi) = d(alpha)",
)


def verify_generation(n: int, degree_bound: int = 2, config: Config | None = None) -> Report:
    """Batch of realize_exact over all monomial generators up to the degree bound."""
    from vdpkit import __version__
    from vdpkit.homology import closed_form

    if n not in (3, 4, 5):
        raise ValueError("generation batches are supported for n in {3, 4, 5}")
    config = config or Config(degree_bound=max(degree_bound, 1))
    rep = Report(__version__, config)
    ranks = closed_form(n).ranks
    rep.notes.append(f"{HEADER_NOTES[0]} (here r_{n - 2} = {ranks[n - 2]})")
    rep.notes.append(HEADER_NOTES[1])
    for alpha in generators(n, degree_bound):
        cert = realize_exact(n, alpha, max(degree_bound, 1))
        rep.add(cert.to_certificate())
    return rep
