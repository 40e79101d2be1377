"""Pure-Python hot loops for sparse polynomial arithmetic.

Terms are dicts mapping exponent tuples to nonzero coefficients (``int`` or
``Fraction``).  ``_ckernels.pyx`` compiles the same functions; ``kernels``
picks whichever is importable.
"""

from heapq import heappop, heappush
from math import gcd


def mul_terms(a, b):
    if len(a) < len(b):
        a, b = b, a
    out = {}
    get = out.get
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = tuple([x + y for x, y in zip(ea, eb)])
            c = get(e, 0) + ca * cb
            if c:
                out[e] = c
            else:
                out.pop(e, None)
    return out


def scale_shift_sub(f, heap, negkey, fc, g_terms, gc, shift):
    """In place: ``f <- fc*f - gc*shift*g`` for integer coefficients.

    ``heap`` holds negated order keys of (possibly stale) exponents of f; new
    exponents are pushed as they appear.
    """
    if fc != 1:
        for e in f:
            f[e] *= fc
    for eg, cg in g_terms:
        e = tuple([x + y for x, y in zip(eg, shift)])
        c = f.get(e)
        if c is None:
            f[e] = -gc * cg
            heappush(heap, (negkey(e), e))
        else:
            c -= gc * cg
            if c:
                f[e] = c
            else:
                del f[e]


def reduce_int(f, basis, negkey, full=True, budget=None):
    """Fraction-free normal form of an integer-coefficient polynomial.

    ``basis`` is a list of ``(lead_exp, lead_coef, terms)`` with ``terms`` a
    list of ``(exp, coef)`` pairs *excluding* the lead term.  Returns
    ``(remainder_dict, u, steps)`` where the remainder equals
    ``u*f - sum(h_i*g_i)`` for the positive integer ``u``.  With ``full=False`` only the lead term
    is reduced.  ``budget`` caps the number of reduction steps; exceeding it
    raises ``OverflowError``.
    """
    f = dict(f)
    heap = [(negkey(e), e) for e in f]
    heap.sort()
    rem = {}
    mult = 1
    steps = 0
    while heap:
        _, e = heappop(heap)
        c = f.get(e)
        if c is None:
            continue
        # skip duplicates of the same exponent still queued
        while heap and heap[0][1] == e:
            heappop(heap)
        for le, lc, tail in basis:
            for x, y in zip(e, le):
                if x < y:
                    break
            else:
                shift = tuple([x - y for x, y in zip(e, le)])
                g = gcd(c, lc)
                fc = lc // g
                gc = c // g
                if lc < 0:
                    fc, gc = -fc, -gc
                del f[e]
                if fc != 1:
                    mult *= fc
                    for k in rem:
                        rem[k] *= fc
                scale_shift_sub(f, heap, negkey, fc, tail, gc, shift)
                steps += 1
                if budget is not None and steps > budget:
                    raise OverflowError("reduction budget exceeded")
                break
        else:
            del f[e]
            rem[e] = c
            if not full:
                rem.update(f)
                return rem, mult, steps
    return rem, mult, steps
