import itertools

import pytest

from vdpkit.family import build_pn
from vdpkit.forms import (ChartError, ChartForm, TangencyError, VectorField, VolumeAtlas, apply,
                          chart_compatibility, default_chart, delta, divergence_free, dz,
                          exterior_derivative, format_form, interior_product, is_tangent,
                          kernel_variables, level, lie_bracket, parse_form, restrict_to_chart,
                          theta, volume_chart, wedge)
from vdpkit.poly import Polynomial, parse


def P(text, n):
    return parse(text, n)


X3 = level(3)
X4 = level(4)


# -- fields ---------------------------------------------------------------------

def test_delta_12_on_x3():
    d = delta(3, 1, 2)
    assert d.coeffs == (P("-z1*z3", 3), P("1 + z2*z3", 3), Polynomial.zero(3))
    assert apply(d, build_pn(3)).is_zero()
    assert (d + delta(3, 2, 1)).is_zero()
    with pytest.raises(ValueError):
        delta(3, 2, 2)


def test_apply_examples():
    d = delta(4, 2, 3)
    assert apply(d, P("z1", 4)).is_zero() and apply(d, P("z4", 4)).is_zero()
    assert apply(delta(3, 1, 2), P("z2", 3)) == P("1 + z2*z3", 3)
    assert kernel_variables(4, 2, 3) == [1, 4]
    with pytest.raises(ValueError):
        apply(d, P("z1", 3))


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_deltas_annihilate_p(n):
    p = build_pn(n)
    for i, j in itertools.permutations(range(1, n + 1), 2):
        assert apply(delta(n, i, j), p).is_zero()


def test_bracket_basics():
    d = delta(3, 1, 2)
    assert lie_bracket(d, d).is_zero()
    b = lie_bracket(delta(5, 1, 2), delta(5, 3, 4))
    assert is_tangent(b)


# -- volume forms ---------------------------------------------------------------

def test_volume_chart_text():
    assert format_form(volume_chart(3, 2)) == "1/(z1*z3) dz1^dz3"
    assert format_form(volume_chart(3, 1)) == "1/(z2*z3 + 1) dz2^dz3"
    w = volume_chart(4, 4)
    (num, den), = w.coeffs.values()
    assert num == 1 and den == (0, 0, 0, 1)


def test_restrict_dz1_dz2_to_chart1():
    phi = ChartForm.ambient(X3, {(1, 2): Polynomial.const(3, 1)})
    r = restrict_to_chart(phi, 1)
    # -(1/q1)(q2 dz2 + q3 dz3) ^ dz2 = (q3/q1) dz2^dz3
    (num, den), = r.coeffs.values()
    assert list(r.coeffs) == [(2, 3)]
    assert num == X3.partial(3) and den == (1, 0, 0)
    free = ChartForm.ambient(X3, {(2, 3): P("z1", 3)})
    assert restrict_to_chart(free, 1).coeffs == free.coeffs


@pytest.mark.parametrize("n", [3, 4])
def test_atlas(n):
    atlas = VolumeAtlas.build(n)
    assert atlas.consistent()
    for (i, j), s in atlas.signs.items():
        assert s in (1, -1)
        assert s * atlas.signs[(j, i)] == 1


def test_compat_specific():
    assert chart_compatibility(3, 1, 3) in (1, -1)
    assert chart_compatibility(4, 2, 4) in (1, -1)
    with pytest.raises(ValueError):
        chart_compatibility(3, 2, 2)


# -- contraction and d ------------------------------------------------------------

def test_interior_basics():
    e1 = VectorField(X3, [Polynomial.const(3, 1), Polynomial.zero(3), Polynomial.zero(3)])
    phi = ChartForm.ambient(X3, {(1, 2): Polynomial.const(3, 1)})
    assert interior_product(e1, phi).coeffs == {(2,): (Polynomial.const(3, 1), (0, 0, 0))}
    xi = delta(3, 1, 2)
    w = volume_chart(3, 3)
    assert interior_product(xi, interior_product(xi, w)).is_zero_mod()
    with pytest.raises(ValueError):
        interior_product(xi, ChartForm.function(X3, P("z1", 3)))


def test_theta_delta12_by_hand():
    t = theta(3, delta(3, 1, 2))
    assert default_chart(3) == 3 and t.chart == 3
    # iota of (1/q3) dz1^dz2 by (c1, c2) = (-q2, q1): (c1 dz2 - c2 dz1)/q3
    assert t.coeffs[(1,)] == (-X3.partial(1), (0, 0, 1))
    assert t.coeffs[(2,)] == (-X3.partial(2), (0, 0, 1))


def test_d_basics():
    assert exterior_derivative(ChartForm.function(X3, Polynomial.const(3, 5))).is_zero()
    phi = ChartForm.ambient(X3, {(2,): P("z1", 3)})
    assert exterior_derivative(phi).coeffs == {(1, 2): (Polynomial.const(3, 1), (0, 0, 0))}


@pytest.mark.parametrize("chart", [1, 2, 3])
def test_dd_zero_in_charts(chart):
    f = ChartForm.function(X3, P("z1^2*z2 + z3^3 - z2", 3), chart)
    assert exterior_derivative(exterior_derivative(f)).is_zero_mod()


@pytest.mark.parametrize("n", [3, 4])
def test_deltas_divergence_free(n):
    for i, j in itertools.combinations(range(1, n + 1), 2):
        assert divergence_free(n, delta(n, i, j), range(1, n + 1))


def test_n5_spot_pairs():
    for i, j in [(1, 2), (3, 4), (4, 5)]:
        assert divergence_free(5, delta(5, i, j))


def test_kernel_multiple_closed():
    d = delta(4, 1, 2)
    assert divergence_free(4, d * P("z3*z4^2", 4))


def test_bracket_theta_identity():
    # for divergence-free fields iota_[xi,eta] omega = d(iota_xi iota_eta omega)
    for (a, b), (c, e) in [((1, 2), (2, 3)), ((1, 3), (2, 4)), ((1, 2), (3, 4))]:
        n = 4
        xi, eta = delta(n, a, b), delta(n, c, e)
        w = volume_chart(n, 4)
        lhs = theta(n, lie_bracket(xi, eta), 4)
        rhs = exterior_derivative(interior_product(xi, interior_product(eta, w)))
        assert lhs.equal_mod(rhs)


def test_brackets_divergence_free():
    b = lie_bracket(delta(4, 1, 2), delta(4, 2, 4))
    assert divergence_free(4, b, [1, 2, 3, 4])


def test_nontangent_rejected():
    f = VectorField(X3, [P("z1", 3), Polynomial.zero(3), Polynomial.zero(3)])
    assert not is_tangent(f)
    with pytest.raises(TangencyError):
        theta(3, f)
    with pytest.raises(TangencyError):
        divergence_free(3, f)


def test_theta_zero_field():
    assert theta(3, VectorField.zero(3)).is_zero()


# -- algebra of forms ----------------------------------------------------------------

def test_wedge_anticommutes():
    a, b = dz(X4, 1), dz(X4, 3)
    assert (wedge(a, b) + wedge(b, a)).is_zero()
    assert wedge(a, a).is_zero()


def test_chart_basis_rejects_chart_index():
    with pytest.raises(ChartError):
        ChartForm(X3, 2, 1, {(2,): Polynomial.const(3, 1)})


# -- text ------------------------------------------------------------------------------

@pytest.mark.parametrize("text", ["z2 dz3", "z1*z2 dz1^dz3 - 3 dz2^dz4", "(z1 + 1) dz4", "0"])
def test_form_roundtrip(text):
    phi = parse_form(text, 4)
    assert parse_form(format_form(phi), 4).coeffs == phi.coeffs
