"""Homology ranks and Euler characteristics of X_n, X_n^0 and X_{p,q}.

Two independent engines: ``table_recursive`` runs the inductive case rules
(long exact sequence of (X_n, X_n minus A_n), with the relative groups read
off X_{n-2} by the Thom isomorphism), and ``closed_form`` writes down the
final alternation pattern.  ``cross_check`` compares them.

All groups are free, so a table is just a tuple of ranks.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

from vdpkit.report import Certificate


class HomologyError(ValueError):
    pass


@dataclass(frozen=True)
class HomologyTable:
    n: int
    variety: str
    ranks: tuple[int, ...]
    torsion: tuple[int, ...] = ()
    pi1: str | None = None
    source: str = ""
    trace: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        tors = self.torsion or (0,) * len(self.ranks)
        if len(tors) != len(self.ranks):
            raise HomologyError("torsion and rank vectors differ in length")
        if any(tors):
            raise HomologyError("nonzero torsion: every group in this family is free")
        object.__setattr__(self, "torsion", tuple(tors))

    def rank(self, j: int) -> int:
        return self.ranks[j] if 0 <= j < len(self.ranks) else 0

    def __getitem__(self, j: int) -> int:
        return self.rank(j)

    @property
    def euler(self) -> int:
        return sum((-1) ** j * r for j, r in enumerate(self.ranks))

    def groups(self) -> list[str]:
        return [group_name(r) for r in self.ranks]

    def __str__(self):
        return "(" + ", ".join(self.groups()) + ")"

    def to_dict(self):
        return {"n": self.n, "variety": self.variety, "ranks": list(self.ranks),
                "groups": self.groups(), "euler": self.euler, "pi1": self.pi1,
                "source": self.source}


def group_name(r: int) -> str:
    return "0" if r == 0 else ("Z" if r == 1 else f"Z^{r}")


# ---------------------------------------------------------------------------
# base propositions, transcribed


def base_tables() -> list[HomologyTable]:
    return [
        HomologyTable(3, "X_3", (1, 0, 1), source="base",
                      trace=("lattice hypothesis for the reducible divisor z1*z3 = 0 assumed",)),
        HomologyTable(3, "X_3^0", (1, 1, 1), source="base"),
        HomologyTable(4, "X_4", (1, 0, 0, 1), source="base"),
        HomologyTable(5, "X_5", (1, 0, 1, 0, 1), source="base"),
        HomologyTable(6, "X_6", (1, 0, 1, 1, 0, 1), source="base"),
    ]


BASE_EULER = {"X_3": 2, "X_3^0": 1, "X_4": 0, "X_5": 3, "X_6": 0}


def _base(tag: str) -> HomologyTable:
    for t in base_tables():
        if t.variety == tag:
            return t
    raise HomologyError(f"no base table for {tag}")


# ---------------------------------------------------------------------------
# the inductive engine


def _assign(H: dict, k: int, value: int, why: str, trace: list):
    if k in H and H[k] != value:
        raise HomologyError(f"rules disagree on H_{k}: {H[k]} vs {value} ({why})")
    H[k] = value
    trace.append(f"H_{k} = {group_name(value)}  [{why}]")


def _block(prev: HomologyTable, k: int) -> int:
    """Solve H_k from the two alternating blocks of the outer sequences.

    With relative groups R_k = H_{k-2}(X_{n-2}):
      0 -> Z -> H_k -> Z   (R_{k+1} = 0, R_k = Z, tau = 0)        gives Z
      Z -> Z -> H_k -> 0   (R_{k+1} = Z iso onto Z, R_k = 0)      gives 0
    """
    hi, lo = prev[k - 1], prev[k - 2]
    if hi == 0 and lo == 1:
        return 1
    if hi == 1 and lo == 0:
        return 0
    raise HomologyError(f"H_{k}: no block rule applies (R_{k + 1} = {hi}, R_{k} = {lo})")


@lru_cache(maxsize=None)
def table_recursive(n: int) -> HomologyTable:
    """H_*(X_n) from H_*(X_{n-2}) by the odd/even case rules."""
    if n < 5:
        raise HomologyError("the induction starts at n = 5")
    prev = _base("X_3") if n == 5 else (_base("X_4") if n == 6 else table_recursive(n - 2))
    H: dict[int, int] = {}
    trace: list[str] = []
    _assign(H, 0, 1, "connected", trace)
    _assign(H, 1, 0, "H_1 preserved by sigma, smooth irreducible divisors", trace)
    if n % 2:
        # Case 1 / Case 2 on H_{j-3}(X_{n-2}); each fixes H_{j-1}, H_j, H_{j+1}
        for j in range(3, n - 1):
            if prev[j - 3] == 0:
                if (prev[j - 2], prev[j - 1], prev[j]) != (1, 0, 1):
                    raise HomologyError(f"case 1 hypothesis fails at j = {j}")
                vals, tag = (0, 1, 0), "case 1"
            else:
                if (prev[j - 2], prev[j - 1], prev[j]) != (0, 1, 0):
                    raise HomologyError(f"case 2 hypothesis fails at j = {j}")
                vals, tag = (1, 0, 1), "case 2"
            for k, v in zip((j - 1, j, j + 1), vals):
                if k <= n - 1:
                    _assign(H, k, v, f"{tag}, j = {j}", trace)
    else:
        half = n // 2
        for k in range(n - 1, half, -1):
            _assign(H, k, _block(prev, k), "block (1)", trace)
        a, b = prev[half - 2], prev[half - 1]
        if a == b == 0:
            tag, v = "case 1", 1
        elif a == b == 1:
            tag, v = "case 2", 0
        else:
            raise HomologyError(f"subsequence (2): H_{half - 2}, H_{half - 1} of X_{n - 2} differ")
        _assign(H, half, v, f"subsequence (2), {tag}", trace)
        _assign(H, half - 1, v, f"subsequence (2), {tag}", trace)
        for k in range(half - 2, 1, -1):
            _assign(H, k, _block(prev, k), "block (3)", trace)
    missing = [k for k in range(n) if k not in H]
    if missing:
        raise HomologyError(f"groups left undetermined: {missing}")
    ranks = tuple(H[k] for k in range(n))
    return HomologyTable(n, f"X_{n}", ranks, pi1="trivial", source="recursive", trace=tuple(trace))


# ---------------------------------------------------------------------------
# closed form and Euler characteristics


def closed_form(n: int) -> HomologyTable:
    if n < 3:
        raise HomologyError("X_n is defined for n >= 3")
    if n % 2:
        ranks = tuple(1 if j % 2 == 0 else 0 for j in range(n))
    else:
        bottom = [1 if j % 2 == 0 else 0 for j in range(n // 2)]
        top = [1 if (n - 1 - j) % 2 == 0 else 0 for j in range(n // 2, n)]
        ranks = tuple(bottom + top)
    return HomologyTable(n, f"X_{n}", ranks, pi1="trivial" if n >= 5 else None, source="closed form")


@dataclass(frozen=True)
class EulerLedger:
    n: int
    e: int
    e0: int
    trace: tuple[str, ...]

    def to_dict(self):
        return {"n": self.n, "e": self.e, "e0": self.e0, "trace": list(self.trace)}


@lru_cache(maxsize=None)
def euler_divisor(n: int) -> int:
    """e(X_n^0), with X_n^0 ~ C^{n-1} minus X_{n-1}^0 for n >= 4."""
    if n < 3:
        raise HomologyError("n must be >= 3")
    if n == 3:
        return BASE_EULER["X_3^0"]
    return 1 - euler_divisor(n - 1)


@lru_cache(maxsize=None)
def euler(n: int) -> EulerLedger:
    if n < 3:
        raise HomologyError("n must be >= 3")
    e0 = euler_divisor(n)
    if n in (3, 4):
        e = BASE_EULER[f"X_{n}"]
        return EulerLedger(n, e, e0, (f"e(X_{n}) = {e} (base)", f"e(X_{n}^0) = {e0}"))
    prev = euler(n - 2)
    d = euler_divisor(n - 1)
    e = 1 + prev.e - d
    trace = prev.trace + (f"e(X_{n}) = 1 + e(X_{n - 2}) - e(X_{n - 1}^0) = 1 + {prev.e} - {d} = {e}",
                          f"e(X_{n}^0) = 1 - e(X_{n - 1}^0) = {e0}")
    return EulerLedger(n, e, e0, trace)


def euler_closed(n: int) -> int:
    return (n + 1) // 2 if n % 2 else 0


def xpq_table(k: int, l: int) -> HomologyTable:
    """(Z, 0, Z^{k+l-1}) for X_{p,q}, k and l the numbers of simple roots of 1-p and 1-q."""
    if k < 1 or l < 1:
        raise HomologyError("k and l must be at least 1")
    return HomologyTable(3, f"X_{{p,q}}(k={k},l={l})", (1, 0, k + l - 1), source="remark")


# ---------------------------------------------------------------------------
# checks


def check_base() -> Certificate:
    tabs = {t.variety: t for t in base_tables()}
    mism = [tag for tag, e in BASE_EULER.items() if tabs[tag].euler != e]
    return Certificate("homology", "base_tables", {}, not mism,
                       {"tables": [t.to_dict() for t in tabs.values()], "euler_mismatch": mism})


def cross_check(n_max: int) -> Certificate:
    if n_max < 6:
        raise HomologyError("n_max must be >= 6")
    rows, bad = [], []
    for n in range(5, n_max + 1):
        rec, cf, eu = table_recursive(n), closed_form(n), euler(n)
        ok = (rec.ranks == cf.ranks and rec.euler == eu.e == euler_closed(n)
              and rec[n - 2] == 0 and rec[0] == 1 and rec[1] == 0)
        rows.append({"n": n, "table": str(rec), "euler": eu.e, "ok": ok})
        if not ok:
            bad.append(n)
    return Certificate("homology", "cross_check", {"n_max": n_max}, not bad,
                       {"rows": rows, "failed": bad})


# ---------------------------------------------------------------------------
# output


def format_tables(tables: list[HomologyTable]) -> str:
    width = max(len(t.ranks) for t in tables)
    name_w = max(len(t.variety) for t in tables)
    cells = [[t.variety.ljust(name_w)] + [group_name(t.rank(j)).rjust(4) for j in range(width)]
             + [str(t.euler).rjust(4)] for t in tables]
    head = ["".ljust(name_w)] + [f"H_{j}".rjust(4) for j in range(width)] + ["e".rjust(4)]
    return "\n".join("  ".join(row) for row in [head] + cells)


def to_tex(tables: list[HomologyTable]) -> str:
    width = max(len(t.ranks) for t in tables)
    cols = "l" + "c" * (width + 1)
    lines = [f"\\begin{{tabular}}{{{cols}}}", "\\hline",
             " & " + " & ".join(f"$H_{{{j}}}$" for j in range(width)) + " & $e$ \\\\", "\\hline"]
    for t in tables:
        cells = []
        for j in range(width):
            r = t.rank(j)
            cells.append("$0$" if r == 0 else ("$\\mathbb{Z}$" if r == 1 else f"$\\mathbb{{Z}}^{{{r}}}$"))
        lines.append(f"${t.variety}$ & " + " & ".join(cells) + f" & ${t.euler}$ \\\\")
    lines += ["\\hline", "\\end{tabular}"]
    return "\n".join(lines)
