"""The matrix words M_n, the polynomials p_n and the hypersurfaces X_n = {p_n = 0}.

M_3 is the product lower(z1) * upper(z2) * lower(z3) of unipotent 2x2
matrices and M_n = M_{n-1} * lower(z_n) for odd n, M_{n-1} * upper(z_n) for
even n.  X_n is cut out by (M_n)_{21} = 1 for odd n and (M_n)_{22} = 2 for
even n.  The same recursion run from M_1 = lower(z1) gives the auxiliary
polynomials p_1 = z1 - 1 and p_2 = z1*z2 - 1, so that

    p_n = p_{n-2} + z_n * (p_{n-1} + c_{n-1})      for all n >= 3,

where c_k = 1 for odd k and 2 for even k.  {p_k + c_k = 0} is the divisor
X_k^0, i.e. the vanishing of the second-row entry of M_k that defines X_k.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from vdpkit import groebner
from vdpkit.poly import DEGREVLEX, MonomialOrder, Polynomial, divide_exact
from vdpkit.report import Certificate


def divisor_constant(k: int) -> int:
    """c_k with X_k^0 = {p_k + c_k = 0}: 1 for odd k, 2 for even k."""
    return 1 if k % 2 else 2


def level_constant(k: int) -> int:
    """Right-hand side of the defining entry: (M_k)_{21} = 1 (odd), (M_k)_{22} = 2 (even)."""
    return 1 if k % 2 else 2


@dataclass(frozen=True)
class MatrixWord:
    n: int
    entries: tuple[tuple[Polynomial, Polynomial], tuple[Polynomial, Polynomial]]

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i - 1][j - 1]

    def det(self) -> Polynomial:
        (a, b), (c, d) = self.entries
        return a * d - b * c

    def second_row(self) -> tuple[Polynomial, Polynomial]:
        return self.entries[1]


def _unipotent(n: int, k: int) -> tuple:
    """lower(z_k) for odd k, upper(z_k) for even k, as polynomials in n variables."""
    one = Polynomial.const(n, 1)
    zero = Polynomial.zero(n)
    z = Polynomial.var(n, k)
    if k % 2:
        return ((one, zero), (z, one))
    return ((one, z), (zero, one))


def _matmul(A, B):
    return tuple(
        tuple(A[i][0] * B[0][j] + A[i][1] * B[1][j] for j in range(2)) for i in range(2)
    )


@lru_cache(maxsize=None)
def _word(n: int) -> MatrixWord:
    if n == 1:
        return MatrixWord(1, _unipotent(1, 1))
    prev = _word(n - 1)
    A = tuple(tuple(x.embed(n) for x in row) for row in prev.entries)
    return MatrixWord(n, _matmul(A, _unipotent(n, n)))


def build_matrix(n: int) -> MatrixWord:
    """M_n as a 2x2 matrix of polynomials in z1..zn."""
    if n < 3:
        raise ValueError(f"M_n is defined for n >= 3, got {n}")
    return _word(n)


@lru_cache(maxsize=None)
def _pn(n: int) -> Polynomial:
    M = _word(n)
    entry = M[2, 1] if n % 2 else M[2, 2]
    return entry - level_constant(n)


def build_pn(n: int) -> Polynomial:
    """p_n read off M_n: (M_n)_{21} - 1 for odd n, (M_n)_{22} - 2 for even n."""
    if n < 3:
        raise ValueError(f"p_n is defined for n >= 3, got {n}")
    return _pn(n)


def lower_p(k: int, n: int) -> Polynomial:
    """p_k embedded in n variables; k = 1, 2 give the auxiliary p_1, p_2."""
    if k < 1:
        raise ValueError("k must be positive")
    return _pn(k).embed(n)


def recursion_rhs(n: int) -> Polynomial:
    """p_{n-2} + z_n (p_{n-1} + c_{n-1}) computed from the lower levels."""
    z = Polynomial.var(n, n)
    return lower_p(n - 2, n) + z * (lower_p(n - 1, n) + divisor_constant(n - 1))


def check_recursion(n: int) -> Certificate:
    if n < 5:
        raise ValueError("the recursion is certified for n >= 5")
    c = divisor_constant(n - 1)
    ok = build_pn(n) == recursion_rhs(n)
    return Certificate("family", "check_recursion", {"n": n}, ok,
                       {"constant": c, "p_n": build_pn(n)})


def check_determinant(n: int) -> Certificate:
    d = build_matrix(n).det()
    return Certificate("family", "check_determinant", {"n": n}, d == 1, {"det": d})


def gradient(p: Polynomial) -> list[Polynomial]:
    return [p.diff(i) for i in range(1, p.nvars + 1)]


def check_smooth(n: int, order: MonomialOrder = DEGREVLEX, budget: int | None = None) -> Certificate:
    """1 in (p_n, d p_n/d z_1, ..., d p_n/d z_n): X_n has no singular point."""
    p = build_pn(n)
    cert = groebner.contains_one([p] + gradient(p), order, budget)
    return Certificate("family", "check_smooth", {"n": n}, cert.verdict, cert.payload)


@dataclass(frozen=True)
class FamilyRecord:
    """X_n written as the affine modification {f * z_n - g = 0} of C^{n-1}."""

    n: int
    parity: str
    p: Polynomial
    f: Polynomial
    g: Polynomial
    center: tuple[Polynomial, ...]
    constants: dict
    modification_var: int

    def to_dict(self):
        return {
            "n": self.n, "parity": self.parity, "p_n": str(self.p), "f": str(self.f),
            "g": str(self.g), "center": [str(c) for c in self.center],
            "constants": self.constants, "modification_var": self.modification_var,
        }


def decomposition(n: int) -> FamilyRecord:
    """f, g with p_n = f * y - g for the modification variable y.

    For n >= 4, y = z_n, f = p_{n-1} + c_{n-1}, g = -p_{n-2}.  The base level
    n = 3 is a modification of C^2_{z1,z3} along z1*z3 = 0 with y = z2.
    """
    p = build_pn(n)
    parity = "odd" if n % 2 else "even"
    if n == 3:
        z1, z3 = Polynomial.var(3, 1), Polynomial.var(3, 3)
        f = z1 * z3
        g = 1 - z1 - z3
        return FamilyRecord(3, parity, p, f, g, (f, g), {"divisor": "z1*z3"}, 2)
    c = divisor_constant(n - 1)
    f = lower_p(n - 1, n) + c
    g = -lower_p(n - 2, n)
    return FamilyRecord(n, parity, p, f, g, (lower_p(n - 2, n), f),
                        {"c": c, "level": level_constant(n)}, n)


def modification_decomposition(n: int, order: MonomialOrder = DEGREVLEX,
                               budget: int | None = None) -> tuple[FamilyRecord, Certificate]:
    """Certify p_n = f*y - g, f and g nonconstant, and codim V(f, g) = 2."""
    if n < 3:
        raise ValueError("n must be >= 3")
    rec = decomposition(n)
    y = Polynomial.var(n, rec.modification_var)
    identity = rec.p == rec.f * y - rec.g
    free_of_y = rec.f.degree_in(rec.modification_var) <= 0 and rec.g.degree_in(rec.modification_var) <= 0
    nonconst = not rec.f.is_constant() and not rec.g.is_constant()
    # f, g do not involve y, so V(f, g) in C^n is the base locus times a line
    dim = groebner.dimension([rec.f, rec.g], order, budget) - 1
    ok = identity and free_of_y and nonconst and dim == n - 3
    payload = rec.to_dict()
    payload.update({"identity": identity, "base_dimension": dim,
                    "codimension_in_base": (n - 1) - dim})
    if n == 3:
        payload["assumption"] = ("lattice hypothesis for the reducible divisor z1*z3=0 "
                                 "taken as satisfied (recorded, not verified)")
    return rec, Certificate("family", "modification_decomposition", {"n": n}, ok, payload)


def divisor_complement_ideal(n: int) -> tuple[Polynomial, Polynomial]:
    """(p_{n-2} + c_{n-2}, p_{n-1} + c_{n-1}): the second row of M_{n-1} vanishes.

    Emptiness of its zero set is what makes X_n^0 = {p_n + c_n = 0} the graph
    of z_n over C^{n-1} minus X_{n-1}^0.
    """
    return (lower_p(n - 2, n - 1) + divisor_constant(n - 2),
            lower_p(n - 1, n - 1) + divisor_constant(n - 1))


def check_divisor_complement(n: int, order: MonomialOrder = DEGREVLEX,
                             budget: int | None = None) -> Certificate:
    if n < 5:
        raise ValueError("n must be >= 5")
    a, b = divisor_complement_ideal(n)
    cert = groebner.contains_one([a, b], order, budget)
    payload = dict(cert.payload)
    payload["ideal"] = [str(a), str(b)]
    payload["conclusion"] = f"X_{n}^0 ~ C^{n - 1} minus X_{n - 1}^0" if cert.verdict else None
    return Certificate("family", "check_divisor_complement", {"n": n}, cert.verdict, payload)


def center_graph(n: int) -> tuple[Polynomial, Polynomial]:
    """(p_{n-2}, c_{n-2} z_{n-1} + p_{n-3} + c_{n-1}) in n-1 variables.

    Modulo p_{n-2}, f = p_{n-1} + c_{n-1} reduces to this linear expression in
    z_{n-1}, so the centre is a graph over X_{n-2}.
    """
    m = n - 1
    return (lower_p(n - 2, m),
            divisor_constant(n - 2) * Polynomial.var(m, m) + lower_p(n - 3, m) + divisor_constant(n - 1))


def check_center_iso(n: int, order: MonomialOrder = DEGREVLEX, budget: int | None = None) -> Certificate:
    if n == 4:
        rec = decomposition(4)
        base = [c.embed(3) for c in rec.center]
        dim = groebner.dimension(base, order, budget)
        return Certificate("family", "check_center_iso", {"n": 4}, dim == 1,
                           {"center": [str(c) for c in base], "dimension": dim})
    if n < 5:
        raise ValueError("n must be >= 4")
    m = n - 1
    center = (lower_p(n - 2, m), lower_p(n - 1, m) + divisor_constant(n - 1))
    graph = center_graph(n)
    ok = groebner.ideal_equal(center, graph, order, budget)
    return Certificate("family", "check_center_iso", {"n": n}, ok,
                       {"center": [str(c) for c in center], "graph": [str(c) for c in graph],
                        "conclusion": f"C_{n} ~ X_{n - 2}" if ok else None})


def check_fiber_equation(n: int) -> Certificate:
    """The fibre condition on the second row of M_n is one equation, equal to p_n = 0.

    For odd n the row is ((M_n)_{21}, (M_n)_{22}) with (M_n)_{21} = 1 imposed
    and (M_n)_{22} free; for even n the roles swap.
    """
    M = build_matrix(n)
    c21, c22 = M.second_row()
    if n % 2:
        equation, free, free_name = c21 - 1, c22, "a_2"
    else:
        equation, free, free_name = c22 - 2, c21, "a_1"
    ok = equation == build_pn(n) and not free.is_constant()
    return Certificate("family", "check_fiber_equation", {"n": n}, ok,
                       {"equation": equation, "free_entry": free_name,
                        "note": "identification with the inverse-product fibration assumed"})


def sample_points(n: int, count: int, seed: int = 0, height: int = 5) -> list[tuple[Fraction, ...]]:
    """Rational points on X_n, solving the linear equation in the last modification variable."""
    if n < 3:
        raise ValueError("n must be >= 3")
    rng = random.Random(seed)
    rec = decomposition(n)
    y = rec.modification_var
    out = []
    while len(out) < count:
        pt = [Fraction(rng.randint(-height, height), rng.randint(1, height)) for _ in range(n)]
        pt[y - 1] = Fraction(0)
        fv = rec.f.eval(pt)
        if fv == 0:
            continue
        pt[y - 1] = Fraction(rec.g.eval(pt)) / fv
        out.append(tuple(pt))
    return out


def is_on(n: int, point) -> bool:
    return build_pn(n).eval(point) == 0


def tangent_to(p: Polynomial, image: Polynomial) -> bool:
    return divide_exact(image, p) is not None
