"""Finite-scale distant multiple transitivity.

For finite I, J in the index set T and group elements g1, g2, a witness is
an element xi fixing every t in I and with xi(g1(t)) = g2(t) for t in J.
``dmt_fraction`` is the share of ordered pairs (g1, g2) of the whole finite
group admitting a witness.

Whether a witness exists depends on (g1, g2) only through the image tuples
g1(J) and g2(J), so the exhaustive count groups pairs by those tuples and
runs one search per class; the result is the exact pair fraction.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from math import sqrt

import numpy as np

from .cube import Isometry, TooLargeError, enumerate_group

MAX_HYPERGRAPH_N = 7
MAX_CUBE_N = 4


@dataclass(frozen=True)
class FiniteContext:
    """Index set T with the group acting on it.

    kind ``hypergraph``: T = k-subsets of {1..n}, group = Sym(n), elements
    stored as one-line permutation tuples.  kind ``cube``: T = F_2^n as point
    indices, group = Isom(F_2^n).
    """

    kind: str
    n: int
    k: int
    points: tuple
    elements: tuple

    @property
    def order(self) -> int:
        return len(self.elements)

    def act(self, g, t: int) -> int:
        """Image of index t under g, evaluated from the definition."""
        if self.kind == "cube":
            return g(t)
        image = tuple(sorted(g[v - 1] for v in self.points[t]))
        return self._index[image]

    @property
    def _index(self) -> dict:
        return {p: i for i, p in enumerate(self.points)}

    def tables(self) -> np.ndarray:
        return _tables(self)


_TABLE_CACHE: dict = {}


def _tables(ctx: FiniteContext) -> np.ndarray:
    key = (ctx.kind, ctx.n, ctx.k)
    if key not in _TABLE_CACHE:
        if ctx.kind == "cube":
            rows = [g.table() for g in ctx.elements]
        else:
            index = ctx._index
            rows = [
                [index[tuple(sorted(g[v - 1] for v in p))] for p in ctx.points]
                for g in ctx.elements
            ]
        _TABLE_CACHE[key] = np.array(rows, dtype=np.int64)
    return _TABLE_CACHE[key]


def hypergraph_context(n: int, k: int) -> FiniteContext:
    if not 1 <= k <= n:
        raise ValueError("need 1 <= k <= n")
    if n > MAX_HYPERGRAPH_N:
        raise TooLargeError(f"hypergraph context limited to n <= {MAX_HYPERGRAPH_N}")
    pts = tuple(itertools.combinations(range(1, n + 1), k))
    perms = tuple(itertools.permutations(range(1, n + 1)))
    return FiniteContext("hypergraph", n, k, pts, perms)


def cube_context(n: int) -> FiniteContext:
    if n > MAX_CUBE_N:
        raise TooLargeError(f"cube context limited to n <= {MAX_CUBE_N}")
    return FiniteContext("cube", n, 0, tuple(range(1 << n)), tuple(enumerate_group(n)))


def _constraints(ctx, I, src, dst):
    pairs = [(t, t) for t in I] + list(zip(src, dst))
    seen = {}
    for a, b in pairs:
        if seen.setdefault(a, b) != b:
            return None
    return sorted(seen.items())


def _search_hypergraph(ctx: FiniteContext, cons) -> tuple | None:
    """Backtrack over vertex images; each constraint maps a k-set onto a k-set."""
    sets = [(set(ctx.points[a]), set(ctx.points[b])) for a, b in cons]
    verts = sorted(set().union(*(a for a, _ in sets))) if sets else []
    allowed = {}
    for v in verts:
        cand = set(range(1, ctx.n + 1))
        for a, b in sets:
            if v in a:
                cand &= b
        allowed[v] = sorted(cand)
    assign: dict[int, int] = {}
    used: set[int] = set()

    def consistent() -> bool:
        for a, b in sets:
            if a.issubset(assign) and {assign[v] for v in a} != b:
                return False
        return True

    def go(i: int) -> bool:
        if i == len(verts):
            return True
        v = verts[i]
        for w in allowed[v]:
            if w in used:
                continue
            assign[v] = w
            used.add(w)
            if consistent() and go(i + 1):
                return True
            del assign[v]
            used.discard(w)
        return False

    if not go(0):
        return None
    # complete to a permutation, filling leftovers in increasing order
    free_imgs = iter(sorted(set(range(1, ctx.n + 1)) - used))
    return tuple(assign[v] if v in assign else next(free_imgs) for v in range(1, ctx.n + 1))


def _search_cube(ctx: FiniteContext, cons) -> Isometry | None:
    tabs = _tables(ctx)
    mask = np.ones(ctx.order, dtype=bool)
    for a, b in cons:
        mask &= tabs[:, a] == b
    hits = np.flatnonzero(mask)
    return ctx.elements[hits[0]] if len(hits) else None


def _search(ctx, I, src, dst):
    cons = _constraints(ctx, I, src, dst)
    if cons is None:
        return None
    if ctx.kind == "cube":
        return _search_cube(ctx, cons)
    return _search_hypergraph(ctx, cons)


def _check_indices(ctx, ts):
    for t in ts:
        if not 0 <= t < len(ctx.points):
            raise ValueError(f"index {t} outside the context's index set")


def verify_witness(ctx: FiniteContext, I, J, g1, g2, xi) -> bool:
    """Both defining conditions, by direct evaluation of the action."""
    return all(ctx.act(xi, t) == t for t in I) and all(
        ctx.act(xi, ctx.act(g1, t)) == ctx.act(g2, t) for t in J
    )


def dmt_witness(ctx: FiniteContext, I, J, g1, g2):
    """A witness xi for (g1, g2), or None when none exists in the group."""
    _check_indices(ctx, list(I) + list(J))
    src = [ctx.act(g1, t) for t in J]
    dst = [ctx.act(g2, t) for t in J]
    return _search(ctx, list(I), src, dst)


@dataclass(frozen=True)
class DmtQuery:
    context: FiniteContext
    I: tuple
    J: tuple
    sampled: bool = False
    trials: int = 0
    seed: int | None = None

    def __post_init__(self):
        if not self.I or not self.J:
            raise ValueError("I and J must be nonempty")
        _check_indices(self.context, list(self.I) + list(self.J))
        if self.sampled and (self.seed is None or self.trials <= 0):
            raise ValueError("sampled mode needs a seed and a positive trial count")


@dataclass
class DmtResult:
    hits: int
    pairs: int
    classes: int = 0
    verified: int = 0
    exhaustive: bool = True

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.hits, self.pairs)

    def wilson_interval(self, z: float = 1.96) -> tuple[float, float]:
        p, n = self.hits / self.pairs, self.pairs
        den = 1 + z * z / n
        mid = (p + z * z / (2 * n)) / den
        half = z * sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / den
        return mid - half, mid + half


def dmt_fraction(query: DmtQuery, brute: bool = False) -> DmtResult:
    ctx, I, J = query.context, list(query.I), list(query.J)
    tabs = _tables(ctx)
    if query.sampled:
        hits = 0
        for i in range(query.trials):
            rng = np.random.Generator(np.random.Philox(key=[query.seed, i]))
            a, b = rng.integers(0, ctx.order, size=2).tolist()
            g1, g2 = ctx.elements[a], ctx.elements[b]
            xi = _search(ctx, I, tabs[a, J].tolist(), tabs[b, J].tolist())
            if xi is not None:
                if not verify_witness(ctx, I, J, g1, g2, xi):
                    raise AssertionError("search returned an invalid witness")
                hits += 1
        return DmtResult(hits, query.trials, exhaustive=False, verified=hits)

    if brute:
        hits = verified = 0
        for a in range(ctx.order):
            for b in range(ctx.order):
                xi = _search(ctx, I, tabs[a, J].tolist(), tabs[b, J].tolist())
                if xi is not None:
                    verified += verify_witness(ctx, I, J, ctx.elements[a], ctx.elements[b], xi)
                    hits += 1
        return DmtResult(hits, ctx.order**2, ctx.order**2, verified)

    images = [tuple(row) for row in tabs[:, J].tolist()]
    counts = Counter(images)
    first = {}
    for idx, img in enumerate(images):
        first.setdefault(img, idx)
    hits = verified = classes = 0
    for a in sorted(counts):
        for b in sorted(counts):
            classes += 1
            xi = _search(ctx, I, list(a), list(b))
            if xi is None:
                continue
            g1, g2 = ctx.elements[first[a]], ctx.elements[first[b]]
            if not verify_witness(ctx, I, J, g1, g2, xi):
                raise AssertionError("search returned an invalid witness")
            verified += 1
            hits += counts[a] * counts[b]
    return DmtResult(hits, ctx.order**2, classes, verified)


def default_sets(ctx: FiniteContext) -> tuple[tuple[int], tuple[int]]:
    """|I| = |J| = 1: I = {first index}, J = {a disjoint or adjacent index}.

    Hypergraph: I = {{1..k}}, J = {{k+1..2k}} when 2k <= n.  Cube: I = {0},
    J = {e_1}.
    """
    if ctx.kind == "cube":
        return (0,), (1,)
    idx = ctx._index
    first = tuple(range(1, ctx.k + 1))
    second = tuple(range(ctx.k + 1, 2 * ctx.k + 1)) if 2 * ctx.k <= ctx.n else tuple(range(2, ctx.k + 2))
    return (idx[first],), (idx[second],)


def trend_rows(kind: str, ns, k: int = 2) -> list[dict]:
    rows = []
    for n in ns:
        ctx = hypergraph_context(n, k) if kind == "hypergraph" else cube_context(n)
        I, J = default_sets(ctx)
        res = dmt_fraction(DmtQuery(ctx, I, J))
        rows.append(
            {
                "kind": kind,
                "n": n,
                "k": k if kind == "hypergraph" else 2,
                "index_set": len(ctx.points),
                "group_order": ctx.order,
                "I": "|".join(map(str, (ctx.points[t] for t in I))),
                "J": "|".join(map(str, (ctx.points[t] for t in J))),
                "hits": res.hits,
                "pairs": res.pairs,
                "fraction": res.fraction,
                "classes": res.classes,
                "witnesses_verified": res.verified,
            }
        )
    return rows
