"""Randomised algebraic identities: 100 instances each, derandomised."""

from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from vdpkit.forms import (ChartForm, VectorField, delta, divergence_free, exterior_derivative,
                          level, lie_bracket)
from vdpkit.groebner import buchberger, normal_form
from vdpkit.poly import Polynomial, parse

N = 3
X3 = level(3)
PROP = settings(max_examples=100, derandomize=True, deadline=None)

exps = st.tuples(*[st.integers(0, 2)] * N)
coefs = st.integers(-4, 4).filter(bool)
polys = st.dictionaries(exps, coefs, max_size=4).map(lambda d: Polynomial(N, d))
points = st.tuples(*[st.fractions(min_value=-3, max_value=3, max_denominator=5)] * N)


def _kernel_fields():
    # h * delta_ij with h in the kernel variables, plus brackets of two such fields
    def leaf(i, j, e, c):
        k = ({1, 2, 3} - {i, j}).pop()
        exp = [0, 0, 0]
        exp[k - 1] = e
        return delta(X3, i, j) * Polynomial(N, {tuple(exp): c})
    pair = st.sampled_from([(1, 2), (1, 3), (2, 3)])
    one = st.builds(lambda ij, e, c: leaf(ij[0], ij[1], e, c), pair, st.integers(0, 2), coefs)
    return st.one_of(one, st.builds(lie_bracket, one, one))


fields = _kernel_fields()
plain_fields = st.builds(lambda a, b, c: VectorField(X3, [a, b, c]), polys, polys, polys)


@PROP
@given(polys, polys, polys)
def test_ring_axioms(a, b, c):
    assert a + b == b + a and a * b == b * a
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == Polynomial.zero(N)


@PROP
@given(polys, polys, st.integers(1, 3), st.integers(1, 3))
def test_diff_rules(a, b, i, j):
    assert a.diff(i).diff(j) == a.diff(j).diff(i)
    assert (a * b).diff(i) == a.diff(i) * b + a * b.diff(i)


@PROP
@given(polys, polys, points)
def test_eval_homomorphism(a, b, pt):
    assert (a * b).eval(pt) == a.eval(pt) * b.eval(pt)
    assert (a + b).eval(pt) == a.eval(pt) + b.eval(pt)


@PROP
@given(polys, st.sampled_from([1, 2, 3]))
def test_dd_zero(f, chart):
    phi = ChartForm.function(X3, f, chart)
    assert exterior_derivative(exterior_derivative(phi)).is_zero_mod()


@PROP
@given(plain_fields, plain_fields)
def test_bracket_antisymmetric(xi, eta):
    assert lie_bracket(xi, eta) == -lie_bracket(eta, xi)


@settings(max_examples=100, derandomize=True, deadline=None)
@given(plain_fields, plain_fields, plain_fields)
def test_jacobi(a, b, c):
    s = lie_bracket(a, lie_bracket(b, c)) + lie_bracket(b, lie_bracket(c, a)) \
        + lie_bracket(c, lie_bracket(a, b))
    assert s.is_zero()


@PROP
@given(fields, fields)
def test_brackets_of_generators_divergence_free(xi, eta):
    assert divergence_free(X3, lie_bracket(xi, eta))


G = buchberger([parse("z1 + z3 + z1*z2*z3 - 1", 3), parse("z1*z2 - 1", 3)])


@PROP
@given(polys, polys, st.fractions(min_value=-5, max_value=5, max_denominator=4))
def test_normal_form_linear(f, g, c):
    lhs = normal_form(f + g * c, G)
    assert lhs == normal_form(f, G) + normal_form(g, G) * Fraction(c)
    assert normal_form(lhs, G) == lhs
