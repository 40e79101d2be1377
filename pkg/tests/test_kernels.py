import os
import subprocess
import sys

import pytest
from hypothesis import given, settings, strategies as st

from vdpkit import _pykernels as py
from vdpkit import kernels
from vdpkit.poly import DEGREVLEX

cy = pytest.importorskip("vdpkit._ckernels")

exps = st.tuples(*[st.integers(0, 3)] * 3)
polys = st.dictionaries(exps, st.integers(-9, 9).filter(bool), max_size=8)


@settings(max_examples=100, derandomize=True, deadline=None)
@given(polys, polys)
def test_mul_backends_agree(a, b):
    assert py.mul_terms(a, b) == cy.mul_terms(a, b)


@settings(max_examples=100, derandomize=True, deadline=None)
@given(polys, st.lists(polys.filter(bool), min_size=1, max_size=3))
def test_reduce_backends_agree(f, divisors):
    basis = []
    for t in divisors:
        lead = max(t, key=DEGREVLEX.key)
        basis.append((lead, t[lead], [(e, c) for e, c in t.items() if e != lead]))
    a = py.reduce_int(f, basis, DEGREVLEX.negkey, budget=10**4)
    b = cy.reduce_int(f, basis, DEGREVLEX.negkey, budget=10**4)
    assert a == b


def test_budget_overflow():
    basis = [((1, 0, 0), 1, [((0, 1, 0), 1)]), ((0, 1, 0), 1, [((0, 0, 1), 1)])]
    for mod in (py, cy):
        with pytest.raises(OverflowError):
            mod.reduce_int({(5, 0, 0): 1}, basis, DEGREVLEX.negkey, budget=2)


def test_fallback_selected_by_env():
    code = "import vdpkit.kernels as k; print(k.BACKEND)"
    out = subprocess.check_output([sys.executable, "-c", code], text=True,
                                  env={**os.environ, "VDPKIT_PURE_PYTHON": "1"})
    assert out.strip() == "python"
    assert kernels.BACKEND in ("python", "cython")
