"""Buchberger's algorithm and the ideal certificates built on it.

Internally every polynomial is kept primitive with integer coefficients
(fraction-free reduction); the reduced basis handed back to callers is monic
over the rationals.  Pair selection uses the sugar strategy, and the
Gebauer-Möller update applies both Buchberger criteria.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import gcd
from typing import Iterable, Sequence

from vdpkit.kernels import reduce_int
from vdpkit.poly import DEGREVLEX, MonomialOrder, Polynomial, VariableCountError
from vdpkit.report import DEFAULT_BUDGET, BudgetExceeded, Certificate


@dataclass(frozen=True)
class Ideal:
    generators: tuple[Polynomial, ...]
    nvars: int

    def __init__(self, generators: Iterable[Polynomial], nvars: int | None = None):
        gens = [g for g in generators if not g.is_zero()]
        if nvars is None:
            if not gens:
                raise ValueError("cannot infer the variable count of the zero ideal")
            nvars = gens[0].nvars
        for g in gens:
            if g.nvars != nvars:
                raise VariableCountError(f"generator in {g.nvars} variables, ideal has {nvars}")
        object.__setattr__(self, "generators", tuple(gens))
        object.__setattr__(self, "nvars", nvars)

    def __len__(self):
        return len(self.generators)

    def __str__(self):
        return "(" + ", ".join(str(g) for g in self.generators) + ")"


@dataclass
class GroebnerBasis:
    basis: list[Polynomial]
    order: MonomialOrder
    nvars: int
    steps: int = 0
    pairs_reduced: int = 0

    def is_unit(self) -> bool:
        return len(self.basis) == 1 and self.basis[0].is_constant() and not self.basis[0].is_zero()

    def leading_exponents(self) -> list[tuple[int, ...]]:
        return [g.leading_term(self.order)[0] for g in self.basis]

    def __iter__(self):
        return iter(self.basis)

    def __len__(self):
        return len(self.basis)


# ---------------------------------------------------------------------------
# internal integer representation


def _to_int_terms(p: Polynomial) -> dict:
    return dict(p.primitive()[1].items())


class _Entry:
    __slots__ = ("lead", "lc", "tail", "sugar", "terms")

    def __init__(self, terms: dict, order: MonomialOrder, sugar: int):
        self.terms = terms
        key = order.key
        self.lead = max(terms, key=key)
        self.lc = terms[self.lead]
        self.tail = [(e, c) for e, c in terms.items() if e != self.lead]
        self.sugar = sugar

    def as_basis_item(self):
        return (self.lead, self.lc, self.tail)


def _make_primitive(terms: dict, order: MonomialOrder) -> dict:
    g = 0
    for c in terms.values():
        g = gcd(g, c)
        if g == 1:
            break
    lead = max(terms, key=order.key)
    if terms[lead] < 0:
        g = -g
    if g == 1:
        return terms
    return {e: c // g for e, c in terms.items()}


def _lcm(a, b):
    return tuple(x if x > y else y for x, y in zip(a, b))


def _divides(a, b):
    return all(x <= y for x, y in zip(a, b))


def _coprime(a, b):
    return all(not (x and y) for x, y in zip(a, b))


def _spoly(f: _Entry, g: _Entry) -> dict:
    L = _lcm(f.lead, g.lead)
    sf = tuple(x - y for x, y in zip(L, f.lead))
    sg = tuple(x - y for x, y in zip(L, g.lead))
    d = gcd(f.lc, g.lc)
    cf, cg = g.lc // d, f.lc // d
    out: dict = {}
    for e, c in f.tail:
        t = tuple(x + y for x, y in zip(e, sf))
        out[t] = out.get(t, 0) + cf * c
    for e, c in g.tail:
        t = tuple(x + y for x, y in zip(e, sg))
        v = out.get(t, 0) - cg * c
        if v:
            out[t] = v
        else:
            out.pop(t, None)
    return {e: c for e, c in out.items() if c}


def _resolve_budget(budget: int | None) -> int:
    return DEFAULT_BUDGET if budget is None else budget


def buchberger(ideal: Ideal | Sequence[Polynomial], order: MonomialOrder = DEGREVLEX,
               budget: int | None = None) -> GroebnerBasis:
    """Reduced Gröbner basis of ``ideal`` under ``order``.

    Raises ``BudgetExceeded`` once more than ``budget`` reduction steps have
    been spent (default 10**6).
    """
    if not isinstance(ideal, Ideal):
        ideal = Ideal(ideal)
    if not ideal.generators:
        raise ValueError("buchberger needs a nonempty ideal")
    budget = _resolve_budget(budget)
    n = ideal.nvars
    negkey = order.negkey
    key = order.key

    polys: list[_Entry] = []
    active: list[int] = []
    pairs: list = []  # heap of (sugar, negated-lcm-key inverse, i, j)
    steps = 0
    reduced_pairs = 0
    unit = False

    def pair_item(i, j):
        L = _lcm(polys[i].lead, polys[j].lead)
        dl = sum(L)
        s = max(polys[i].sugar + dl - sum(polys[i].lead), polys[j].sugar + dl - sum(polys[j].lead))
        return (s, key(L), i, j)

    def update(h: int):
        nonlocal pairs, active
        H = polys[h]
        C = [(g, _lcm(H.lead, polys[g].lead)) for g in active]
        D = []
        while C:
            g1, L1 = C.pop()
            if _coprime(H.lead, polys[g1].lead) or not any(
                _divides(L2, L1) for _, L2 in C
            ) and not any(_divides(L2, L1) for _, L2 in D):
                D.append((g1, L1))
        E = [pair_item(h, g) for g, _ in D if not _coprime(H.lead, polys[g].lead)]
        kept = []
        for item in pairs:
            _, _, i, j = item
            Lij = _lcm(polys[i].lead, polys[j].lead)
            if (_divides(H.lead, Lij)
                    and _lcm(polys[i].lead, H.lead) != Lij
                    and _lcm(H.lead, polys[j].lead) != Lij):
                continue
            kept.append(item)
        kept.extend(E)
        heapq.heapify(kept)
        pairs = kept
        active = [g for g in active if not _divides(H.lead, polys[g].lead)] + [h]

    def insert(terms, sugar):
        nonlocal unit
        terms = _make_primitive(terms, order)
        polys.append(_Entry(terms, order, sugar))
        idx = len(polys) - 1
        if not any(polys[idx].lead):
            unit = True
        update(idx)

    # interreduce the generators against one another as they are inserted
    gens = sorted((_to_int_terms(g) for g in ideal.generators), key=lambda t: key(max(t, key=key)))
    for t in gens:
        basis_items = [polys[g].as_basis_item() for g in active]
        rem, _, s = reduce_int(t, basis_items, negkey, True, budget - steps)
        steps += s
        if rem:
            insert(rem, max(sum(e) for e in t))
        if unit:
            break

    while pairs and not unit:
        sugar, _, i, j = heapq.heappop(pairs)
        sp = _spoly(polys[i], polys[j])
        reduced_pairs += 1
        if not sp:
            continue
        basis_items = [polys[g].as_basis_item() for g in active]
        try:
            rem, _, s = reduce_int(sp, basis_items, negkey, True, budget - steps)
        except OverflowError:
            raise BudgetExceeded(f"Gröbner budget of {budget} reduction steps exceeded") from None
        steps += s
        if steps > budget:
            raise BudgetExceeded(f"Gröbner budget of {budget} reduction steps exceeded")
        if rem:
            insert(rem, sugar)

    if unit:
        return GroebnerBasis([Polynomial.const(n, 1)], order, n, steps, reduced_pairs)
    basis = _interreduce([polys[g] for g in active], order, n)
    return GroebnerBasis(basis, order, n, steps, reduced_pairs)


def _interreduce(entries: list[_Entry], order: MonomialOrder, n: int) -> list[Polynomial]:
    # drop elements whose lead is divisible by another lead (ties keep the first)
    minimal = []
    for k, e in enumerate(entries):
        if any(_divides(o.lead, e.lead) and (o.lead != e.lead or m < k)
               for m, o in enumerate(entries) if m != k):
            continue
        minimal.append(e)
    negkey = order.negkey
    out = []
    for k, e in enumerate(minimal):
        others = [o.as_basis_item() for m, o in enumerate(minimal) if m != k]
        tail_rem, mult, _ = reduce_int(dict(e.tail), others, negkey, True, None)
        # lead survives untouched (minimal basis), tail scaled by mult
        terms = {e.lead: e.lc * mult}
        terms.update(tail_rem)
        lc = Fraction(terms[e.lead])
        out.append(Polynomial(n, {x: Fraction(c) / lc for x, c in terms.items()}))
    out.sort(key=lambda p: order.key(p.leading_term(order)[0]))
    return out


def normal_form(f: Polynomial, G: GroebnerBasis) -> Polynomial:
    """Remainder of ``f`` on division by ``G`` (unique when ``G`` is a Gröbner basis)."""
    if f.nvars != G.nvars:
        raise VariableCountError(f"{f.nvars} vs {G.nvars} variables")
    return reduce_by(f, G.basis, G.order)


def reduce_by(f: Polynomial, divisors: Sequence[Polynomial], order: MonomialOrder = DEGREVLEX) -> Polynomial:
    """Full multivariate-division remainder of ``f`` by ``divisors``, exact over Q."""
    if f.is_zero():
        return f
    content, prim = f.primitive()
    items = []
    for d in divisors:
        t = _to_int_terms(d)
        lead = max(t, key=order.key)
        items.append((lead, t[lead], [(e, c) for e, c in t.items() if e != lead]))
    rem, mult, _ = reduce_int(dict(prim.items()), items, order.negkey, True, None)
    scale = content / mult
    return Polynomial(f.nvars, {e: c * scale for e, c in rem.items()})


def s_polynomials_reduce_to_zero(G: GroebnerBasis) -> bool:
    """Post-hoc Buchberger criterion check of a computed basis."""
    for a, b in combinations(G.basis, 2):
        la, ca = a.leading_term(G.order)
        lb, cb = b.leading_term(G.order)
        L = _lcm(la, lb)
        ma = Polynomial.monomial(tuple(x - y for x, y in zip(L, la)), Fraction(1) / Fraction(ca))
        mb = Polynomial.monomial(tuple(x - y for x, y in zip(L, lb)), Fraction(1) / Fraction(cb))
        if not normal_form(ma * a - mb * b, G).is_zero():
            return False
    return True


def is_reduced(G: GroebnerBasis) -> bool:
    leads = G.leading_exponents()
    for k, g in enumerate(G.basis):
        if g.leading_term(G.order)[1] != 1:
            return False
        for e, _ in g.items():
            for m, le in enumerate(leads):
                if m != k and _divides(le, e):
                    return False
    return True


# ---------------------------------------------------------------------------
# certificates


def contains_one(ideal: Ideal | Sequence[Polynomial], order: MonomialOrder = DEGREVLEX,
                 budget: int | None = None) -> Certificate:
    """Certify whether 1 lies in the ideal (its complex variety is empty)."""
    if not isinstance(ideal, Ideal):
        ideal = Ideal(ideal)
    G = buchberger(ideal, order, budget)
    one = Polynomial.const(ideal.nvars, 1)
    verdict = normal_form(one, G).is_zero()
    return Certificate(
        "groebner", "contains_one",
        {"generators": [str(g) for g in ideal.generators]},
        verdict,
        {"order": str(order), "basis": [str(g) for g in G.basis], "steps": G.steps},
    )


def ideal_equal(I: Ideal | Sequence[Polynomial], J: Ideal | Sequence[Polynomial],
                order: MonomialOrder = DEGREVLEX, budget: int | None = None) -> bool:
    if not isinstance(I, Ideal):
        I = Ideal(I)
    if not isinstance(J, Ideal):
        J = Ideal(J)
    if I.nvars != J.nvars:
        raise VariableCountError(f"{I.nvars} vs {J.nvars} variables")
    return buchberger(I, order, budget).basis == buchberger(J, order, budget).basis


def dimension(ideal: Ideal | Sequence[Polynomial], order: MonomialOrder = DEGREVLEX,
              budget: int | None = None) -> int:
    """Krull dimension of the quotient ring, from the leading-monomial ideal.

    The dimension is the size of the largest set of variables containing the
    support of no leading monomial of the Gröbner basis.
    """
    if not isinstance(ideal, Ideal):
        ideal = Ideal(ideal)
    G = buchberger(ideal, order, budget)
    if G.is_unit():
        raise ValueError("the unit ideal has no dimension")
    supports = [frozenset(k for k, x in enumerate(e) if x) for e in G.leading_exponents()]
    n = ideal.nvars
    for size in range(n, -1, -1):
        for S in combinations(range(n), size):
            s = frozenset(S)
            if not any(sup <= s for sup in supports):
                return size
    return 0
