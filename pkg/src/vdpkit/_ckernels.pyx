# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled versions of the loops in _pykernels (same signatures, same results).

Coefficients stay Python integers (or Fractions in mul_terms), so the gain comes
from typed exponent arithmetic and fewer interpreter round trips.
"""

from heapq import heappop, heappush
from math import gcd

from cpython.tuple cimport PyTuple_New, PyTuple_SET_ITEM
from cpython.ref cimport Py_INCREF


cdef inline tuple _add(tuple a, tuple b):
    cdef Py_ssize_t i, n = len(a)
    cdef tuple out = PyTuple_New(n)
    cdef object v
    for i in range(n):
        v = <long>a[i] + <long>b[i]
        Py_INCREF(v)
        PyTuple_SET_ITEM(out, i, v)
    return out


cdef inline tuple _sub(tuple a, tuple b):
    cdef Py_ssize_t i, n = len(a)
    cdef tuple out = PyTuple_New(n)
    cdef object v
    for i in range(n):
        v = <long>a[i] - <long>b[i]
        Py_INCREF(v)
        PyTuple_SET_ITEM(out, i, v)
    return out


cdef inline bint _divides(tuple le, tuple e):
    cdef Py_ssize_t i, n = len(e)
    for i in range(n):
        if <long>e[i] < <long>le[i]:
            return False
    return True


def mul_terms(dict a, dict b):
    if len(a) < len(b):
        a, b = b, a
    cdef dict out = {}
    cdef tuple ea, eb, e
    cdef object ca, cb, c
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = _add(ea, eb)
            c = out.get(e, 0) + ca * cb
            if c:
                out[e] = c
            else:
                out.pop(e, None)
    return out


cdef _scale_shift_sub(dict f, list heap, object negkey, object fc, list g_terms, object gc, tuple shift):
    cdef tuple eg, e
    cdef object cg, c
    if fc != 1:
        for e in f:
            f[e] = f[e] * fc
    for eg, cg in g_terms:
        e = _add(eg, shift)
        c = f.get(e)
        if c is None:
            f[e] = -gc * cg
            heappush(heap, (negkey(e), e))
        else:
            c = c - gc * cg
            if c:
                f[e] = c
            else:
                del f[e]


def scale_shift_sub(f, heap, negkey, fc, g_terms, gc, shift):
    _scale_shift_sub(f, heap, negkey, fc, list(g_terms), gc, tuple(shift))


def reduce_int(f, list basis, negkey, bint full=True, budget=None):
    cdef dict fd = dict(f)
    cdef list heap = [(negkey(e), e) for e in fd]
    heap.sort()
    cdef dict rem = {}
    cdef object mult = 1
    cdef long steps = 0
    cdef long cap = -1 if budget is None else budget
    cdef tuple e, le, shift
    cdef object c, lc, g, fc, gc, k
    cdef list tail
    cdef bint hit
    basis = [(tuple(b[0]), b[1], list(b[2])) for b in basis]
    while heap:
        e = heappop(heap)[1]
        c = fd.get(e)
        if c is None:
            continue
        while heap and heap[0][1] == e:
            heappop(heap)
        hit = False
        for le, lc, tail in basis:
            if _divides(le, e):
                hit = True
                shift = _sub(e, le)
                g = gcd(c, lc)
                fc = lc // g
                gc = c // g
                if lc < 0:
                    fc, gc = -fc, -gc
                del fd[e]
                if fc != 1:
                    mult *= fc
                    for k in rem:
                        rem[k] = rem[k] * fc
                _scale_shift_sub(fd, heap, negkey, fc, tail, gc, shift)
                steps += 1
                if cap >= 0 and steps > cap:
                    raise OverflowError("reduction budget exceeded")
                break
        if not hit:
            del fd[e]
            rem[e] = c
            if not full:
                rem.update(fd)
                return rem, mult, steps
    return rem, mult, steps
