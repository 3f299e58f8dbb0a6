"""Exact two-phase simplex over the rationals with Bland's rule.

Solves  min c.x  subject to  A x = b, x >= 0.  Problems here have at most a
few hundred columns, so a dense Fraction tableau is affordable and removes
every tolerance question.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction


class LPError(RuntimeError):
    pass


@dataclass
class LPResult:
    status: str
    value: Fraction | None = None
    x: list[Fraction] = field(default_factory=list)
    pivots: int = 0


def _pivot(tab: list[list[Fraction]], row: int, col: int) -> None:
    prow = tab[row]
    piv = prow[col]
    if piv != 1:
        tab[row] = prow = [v / piv for v in prow]
    nz = [j for j, v in enumerate(prow) if v]
    for i, r in enumerate(tab):
        if i == row:
            continue
        f = r[col]
        if f:
            for j in nz:
                r[j] -= f * prow[j]


def _run(tab, basis, allowed: int, max_pivots: int) -> tuple[str, int]:
    """Iterate on the tableau whose last row holds reduced costs and -objective."""
    m = len(basis)
    pivots = 0
    cost = tab[m]
    while True:
        # Bland: lowest-index improving column, lowest-index leaving variable
        col = next((j for j in range(allowed) if cost[j] < 0), None)
        if col is None:
            return "optimal", pivots
        best = None
        for i in range(m):
            a = tab[i][col]
            if a > 0:
                ratio = tab[i][-1] / a
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:
            return "unbounded", pivots
        _pivot(tab, best[1], col)
        cost = tab[m]
        basis[best[1]] = col
        pivots += 1
        if pivots > max_pivots:
            raise LPError("pivot limit exceeded")


def solve(c, A, b, max_pivots: int = 100_000) -> LPResult:
    c = [Fraction(v) for v in c]
    A = [[Fraction(v) for v in row] for row in A]
    b = [Fraction(v) for v in b]
    m, n = len(A), len(c)
    if any(len(row) != n for row in A) or len(b) != m:
        raise ValueError("inconsistent LP dimensions")
    for i in range(m):
        if b[i] < 0:
            A[i] = [-v for v in A[i]]
            b[i] = -b[i]

    # phase 1: artificial columns n..n+m-1
    tab = []
    for i in range(m):
        art = [Fraction(0)] * m
        art[i] = Fraction(1)
        tab.append(A[i] + art + [b[i]])
    cost = [Fraction(0)] * (n + m + 1)
    for i in range(m):
        for j in range(n):
            cost[j] -= A[i][j]
        cost[-1] -= b[i]
    tab.append(cost)
    basis = list(range(n, n + m))
    status, p1 = _run(tab, basis, n + m, max_pivots)
    if status != "optimal":
        raise LPError("phase 1 cannot be unbounded")
    if tab[m][-1] != 0:
        return LPResult("infeasible", pivots=p1)

    # drive leftover artificials out of the basis; drop redundant rows
    i = 0
    while i < len(basis):
        if basis[i] >= n:
            col = next((j for j in range(n) if tab[i][j] != 0), None)
            if col is None:
                del tab[i]
                del basis[i]
                continue
            _pivot(tab, i, col)
            basis[i] = col
        i += 1
    m = len(basis)

    # phase 2
    tab = [row[:n] + [row[-1]] for row in tab[:m]]
    cost = c[:] + [Fraction(0)]
    for i, bj in enumerate(basis):
        f = cost[bj]
        if f:
            cost = [cv - f * tv for cv, tv in zip(cost, tab[i])]
    tab.append(cost)
    status, p2 = _run(tab, basis, n, max_pivots)
    if status != "optimal":
        return LPResult(status, pivots=p1 + p2)
    x = [Fraction(0)] * n
    for i, bj in enumerate(basis):
        x[bj] = tab[i][-1]
    return LPResult("optimal", -tab[m][-1], x, p1 + p2)
