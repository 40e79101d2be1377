import numpy as np
import pytest

from vdpkit.family import sample_points
from vdpkit.flow import convergence_order, endpoint_order, flow_rk4
from vdpkit.forms import VectorField, delta, level
from vdpkit.poly import parse

X3 = level(3)


def test_zero_field():
    pt = sample_points(3, 1, 0)[0]
    r = flow_rk4(X3, VectorField.zero(X3), pt, 1.0, 50)
    assert np.allclose(r.endpoint, [complex(c) for c in pt])
    assert r.drift == 0 and r.volume_distortion == 0


@pytest.mark.parametrize("pt", sample_points(3, 3, 0))
def test_delta12_reference_run(pt):
    r = flow_rk4(X3, delta(3, 1, 2), pt, 1.0, 1000)
    assert not r.blew_up
    assert r.drift < 1e-9 and r.volume_distortion < 1e-6
    assert r.trace[0]["t"] == 0.0 and len(r.trace) == 11


def test_exact_solution():
    # along delta_12 on X_3, z3 is constant a and z1' = -a z1 exactly
    pt = sample_points(3, 1, 0)[0]
    a = float(pt[2])
    r = flow_rk4(X3, delta(3, 1, 2), pt, 1.0, 400)
    assert abs(r.endpoint[0] - float(pt[0]) * np.exp(-a)) < 1e-10
    assert abs(r.endpoint[2] - a) < 1e-14


def test_endpoint_order_is_four():
    pt = sample_points(3, 1, 0)[0]
    slope, errs = endpoint_order(X3, delta(3, 1, 2), pt, 1.0)
    assert 3.5 <= slope <= 4.5
    assert all(e1 > e2 for e1, e2 in zip(errs, errs[1:]))


def test_drift_at_least_fourth_order():
    # the invariant converges one order faster than the state here
    pt = sample_points(3, 1, 0)[0]
    slope, _ = convergence_order(X3, delta(3, 1, 2), pt, 1.0)
    assert slope >= 3.5


def test_off_surface_and_nontangent():
    with pytest.raises(ValueError):
        flow_rk4(X3, delta(3, 1, 2), (1, 1, 1), 1.0, 10)
    f = VectorField(X3, [parse("z1", 3), parse("0", 3), parse("0", 3)])
    with pytest.raises(ValueError):
        flow_rk4(X3, f, sample_points(3, 1, 0)[0], 1.0, 10)
    with pytest.raises(ValueError):
        flow_rk4(X3, delta(3, 1, 2), sample_points(3, 1, 0)[0], 1.0, 0)


def test_blow_up_is_reported():
    pt = sample_points(3, 1, 0)[0]
    r = flow_rk4(X3, delta(3, 1, 2), pt, 1.0, 100, bound=0.5)
    assert r.blew_up and r.volume_distortion == float("inf")


def test_deterministic():
    pt = sample_points(3, 1, 4)[0]
    a = flow_rk4(X3, delta(3, 1, 3), pt, 0.5, 200).to_dict()
    b = flow_rk4(X3, delta(3, 1, 3), pt, 0.5, 200).to_dict()
    assert a == b
