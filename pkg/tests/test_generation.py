from fractions import Fraction
import itertools

import pytest
import sympy as sp

from vdpkit.family import build_pn
from vdpkit.forms import delta, divergence_free, format_form, is_tangent, parse_form
from vdpkit.generation import (ZERO, Bracket, KernelConditionError, Leaf, Scale, Sum, combine,
                               evaluate, generators, parse_expr, realize_exact, realize_monomial,
                               solve_rational, verify_generation)
from vdpkit.poly import parse


# -- sympy residue oracle -----------------------------------------------------------
# dp ^ omega = vol and xi(p) = 0 give iota_xi vol = -dp ^ iota_xi omega, so
# Theta(xi) = d(alpha) on X iff iota_xi vol + s dp ^ d(alpha) = 0 mod p for the
# orientation sign s of the chart convention.

def _sym(poly, zs):
    return sum((sp.Integer(c.numerator) / c.denominator if isinstance(c, Fraction) else sp.Integer(c))
               * sp.prod([z ** k for z, k in zip(zs, e)]) for e, c in poly.items())


def _sort(idx):
    idx = list(idx)
    if len(set(idx)) < len(idx):
        return None, 0
    sign = 1
    for i in range(len(idx)):
        for j in range(len(idx) - 1 - i):
            if idx[j] > idx[j + 1]:
                idx[j], idx[j + 1] = idx[j + 1], idx[j]
                sign = -sign
    return tuple(idx), sign


def _wedge(a, b):
    out = {}
    for I, f in a.items():
        for J, g in b.items():
            K, s = _sort(I + J)
            if K is not None:
                out[K] = out.get(K, 0) + s * f * g
    return out


def _d(form, zs):
    out = {}
    for I, f in form.items():
        for k, z in enumerate(zs, 1):
            K, s = _sort((k,) + I)
            if K is not None:
                out[K] = out.get(K, 0) + s * sp.diff(f, z)
    return out


def residue_sign(n, field, alpha):
    """The s in {1, -1} for which the residue identity holds, or None."""
    zs = sp.symbols(f"z1:{n + 1}")
    p = _sym(build_pn(n), zs)
    xi = [_sym(c, zs) for c in field.coeffs]
    lhs = {tuple(k for k in range(1, n + 1) if k != m): (-1) ** (m - 1) * xi[m - 1]
           for m in range(1, n + 1)}
    a = {I: _sym(num, zs) for I, num in alpha.polynomial_coefficients().items()}
    dp = {(k,): sp.diff(p, z) for k, z in enumerate(zs, 1)}
    rhs = _wedge(dp, _d(a, zs))
    for s in (1, -1):
        ok = True
        for K in set(lhs) | set(rhs):
            e = sp.expand(lhs.get(K, 0) + s * rhs.get(K, 0))
            if sp.reduced(e, [p], *zs)[1] != 0:
                ok = False
                break
        if ok:
            return s
    return None


# -- evaluation and text ---------------------------------------------------------------

def test_evaluate_leaf_and_bracket():
    assert evaluate(Leaf(1, 2), 3) == delta(3, 1, 2)
    b = Bracket(Leaf(1, 2, parse("z4", 5)), Leaf(3, 4))
    f = evaluate(b, 5)
    assert is_tangent(f) and divergence_free(5, f)


def test_kernel_condition():
    with pytest.raises(KernelConditionError):
        evaluate(Leaf(1, 2, parse("z1", 3)), 3)


@pytest.mark.parametrize("expr", [
    Leaf(2, 3),
    Scale(Fraction(-3, 2), Leaf(1, 4, parse("z2*z3", 4))),
    Sum((Leaf(1, 2), Bracket(Leaf(1, 3), Leaf(2, 3)))),
    ZERO,
])
def test_parse_roundtrip(expr):
    assert parse_expr(expr.text(), 4) == expr


def test_parse_accepts_ascii():
    assert parse_expr("leaf(d=delta[1,2])", 3) == Leaf(1, 2)
    with pytest.raises(ValueError):
        parse_expr("leaf(d=δ[1,1])", 3)


def test_combine_merges():
    e = combine([Scale(Fraction(1), Leaf(1, 2)), Scale(Fraction(2), Leaf(1, 2))])
    assert e == Sum((Scale(Fraction(3), Leaf(1, 2)),))
    assert combine([Scale(Fraction(1), Leaf(1, 2)), Scale(Fraction(-1), Leaf(1, 2))]) == ZERO


# -- sparse rational solve ---------------------------------------------------------------

@pytest.mark.parametrize("seed", range(6))
def test_solve_rational_against_sympy(seed):
    import random
    rnd = random.Random(seed)
    rows, cols = rnd.randint(2, 6), rnd.randint(1, 5)
    A = [[rnd.choice([0, 0, 1, -2, 3]) for _ in range(cols)] for _ in range(rows)]
    x0 = [Fraction(rnd.randint(-4, 4), rnd.randint(1, 3)) for _ in range(cols)]
    b = [sum(A[r][c] * x0[c] for c in range(cols)) for r in range(rows)]
    columns = [{r: Fraction(A[r][c]) for r in range(rows) if A[r][c]} for c in range(cols)]
    rhs = {r: v for r, v in enumerate(b) if v}
    x = solve_rational(columns, rhs)
    assert x is not None
    M = sp.Matrix(A)
    assert M * sp.Matrix([sp.Rational(v.numerator, v.denominator) for v in x]) == \
        sp.Matrix([sp.Rational(v.numerator, v.denominator) for v in b])


def test_solve_rational_inconsistent():
    assert solve_rational([{0: Fraction(1)}, {0: Fraction(2)}], {1: Fraction(1)}) is None


# -- realisation ---------------------------------------------------------------------------

def test_realize_zero():
    c = realize_exact(3, parse_form("0", 3))
    assert c.expr == ZERO and c.valid


def test_realize_z1_on_x3():
    c = realize_exact(3, parse_form("z1", 3))
    assert c.valid and c.residual_text() == "0"
    assert residue_sign(3, evaluate(c.expr, 3), c.alpha) is not None


def test_realize_z2_dz3_on_x4():
    c = realize_exact(4, parse_form("z2 dz3", 4))
    assert c.valid
    assert residue_sign(4, evaluate(c.expr, 4), c.alpha) is not None


def test_realize_widens_when_needed():
    c = realize_exact(4, parse_form("z1*z2 dz3", 4), degree_bound=2)
    assert c.valid


def test_linearity():
    a = realize_exact(3, parse_form("z1", 3))
    b = realize_exact(3, parse_form("z2^2", 3))
    ab = realize_exact(3, parse_form("2*z1 - 3*z2^2", 3))
    assert ab.valid
    lhs = evaluate(ab.expr, 3)
    rhs = evaluate(a.expr, 3) * 2 - evaluate(b.expr, 3) * 3
    # fields may differ by a divergence-free field with Theta = 0; compare Theta residues
    assert residue_sign(3, lhs, ab.alpha) == residue_sign(3, rhs, ab.alpha) is not None


def test_monomial_argument_checks():
    with pytest.raises(ValueError):
        realize_monomial(3, parse("z1 + z2", 3))
    with pytest.raises(ValueError):
        realize_monomial(3, parse("z1*z2*z3", 3))
    with pytest.raises(ValueError):
        realize_monomial(4, parse("z1", 4), ())


def test_sign_is_uniform_on_x3():
    signs = set()
    for alpha in generators(3, 2):
        c = realize_exact(3, alpha, 2)
        assert c.valid, format_form(alpha)
        if c.expr != ZERO:
            signs.add(residue_sign(3, evaluate(c.expr, 3), alpha))
    assert len(signs) == 1 and None not in signs


def test_verify_generation_n3():
    rep = verify_generation(3, 2)
    assert rep.records and rep.verdict
    assert any("H_{n-2}" in note for note in rep.notes)


def test_verify_generation_n4_bound1():
    rep = verify_generation(4, 1)
    assert rep.verdict
    assert len(rep.records) == len(generators(4, 1))


def test_verify_generation_rejects_n():
    with pytest.raises(ValueError):
        verify_generation(7, 1)
