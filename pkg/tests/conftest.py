import pytest

from vdpkit.family import build_pn, lower_p


@pytest.fixture
def p3():
    return build_pn(3)


@pytest.fixture
def p5():
    return build_pn(5)


def P(k, n):
    """p_k embedded in n variables."""
    return lower_p(k, n)
