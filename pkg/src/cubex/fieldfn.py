"""Functions F_q^d -> F_q for small primes q, and r-cube zero-sum tests.

Points of F_q^d are indexed by sum_i x_i q^(i-1), coordinate 1 least
significant, mirroring the binary cube encoding.  Polynomial coefficient
vectors use the same layout over exponent tuples (e_1..e_d), 0 <= e_i < q.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .cube import TooLargeError

SUPPORTED_Q = (2, 3, 5)
MAX_POINTS = 20_000
MAX_EXHAUSTIVE = 1 << 20


def _check_q(q: int) -> None:
    if q not in SUPPORTED_Q:
        raise ValueError(f"q={q} not supported (prime in {SUPPORTED_Q})")


@dataclass(frozen=True)
class FieldFn:
    q: int
    d: int
    table: tuple[int, ...]

    def __post_init__(self):
        _check_q(self.q)
        if self.d < 1:
            raise ValueError("dimension must be positive")
        if len(self.table) != self.q**self.d:
            raise ValueError(f"table needs {self.q ** self.d} entries")
        if any(not 0 <= v < self.q for v in self.table):
            raise ValueError(f"values must lie in [0, {self.q})")

    @classmethod
    def from_poly(cls, q: int, d: int, terms: dict) -> FieldFn:
        """Evaluate sum c * prod x_i^e_i; ``terms`` maps exponent tuples to c."""
        _check_q(q)
        vals = []
        for x in points(q, d):
            s = 0
            for exps, c in terms.items():
                m = c
                for xi, e in zip(x, exps):
                    m = m * pow(xi, e, q)
                s += m
            vals.append(s % q)
        return cls(q, d, tuple(vals))

    @classmethod
    def from_key(cls, q: int, d: int, key: int) -> FieldFn:
        vals = []
        for _ in range(q**d):
            key, v = divmod(key, q)
            vals.append(v)
        return cls(q, d, tuple(vals))


def points(q: int, d: int) -> list[tuple[int, ...]]:
    """All points in index order (coordinate 1 varies fastest)."""
    return [tuple(reversed(p)) for p in itertools.product(range(q), repeat=d)]


def _index(q: int, x) -> int:
    return sum(v * q**i for i, v in enumerate(x))


@lru_cache(maxsize=None)
def _vandermonde_inverse(q: int) -> np.ndarray:
    """Inverse mod q of V[a, e] = a^e, so that coeffs = Vinv @ values."""
    v = np.array([[pow(a, e, q) for e in range(q)] for a in range(q)], dtype=np.int64)
    return _inverse_mod(v, q)


def _inverse_mod(m: np.ndarray, p: int) -> np.ndarray:
    size = m.shape[0]
    aug = np.concatenate([m % p, np.eye(size, dtype=np.int64)], axis=1)
    for col in range(size):
        piv = next(r for r in range(col, size) if aug[r, col] % p)
        aug[[col, piv]] = aug[[piv, col]]
        aug[col] = aug[col] * pow(int(aug[col, col]), -1, p) % p
        for r in range(size):
            if r != col and aug[r, col]:
                aug[r] = (aug[r] - aug[r, col] * aug[col]) % p
    return aug[:, size:]


def coefficients(q: int, d: int, tables: np.ndarray) -> np.ndarray:
    """Interpolate a batch of value tables (shape (N, q^d)) to coefficients."""
    tables = np.asarray(tables, dtype=np.int64)
    batch = tables.shape[0]
    # C-order reshape puts coordinate 1 on the last axis
    arr = tables.reshape((batch,) + (q,) * d)
    vinv = _vandermonde_inverse(q)
    for axis in range(1, d + 1):
        arr = np.moveaxis(np.tensordot(arr, vinv, axes=([axis], [1])), -1, axis) % q
    return arr.reshape(batch, q**d)


@lru_cache(maxsize=None)
def _exponent_sums(q: int, d: int) -> np.ndarray:
    return np.array([sum(p) for p in points(q, d)], dtype=np.int64)


def degrees(q: int, d: int, tables: np.ndarray) -> np.ndarray:
    """Total degree of each table's reduced polynomial; -1 for zero."""
    coef = coefficients(q, d, tables)
    sums = _exponent_sums(q, d)
    return np.where(coef != 0, sums, -1).max(axis=1)


def field_degree(f: FieldFn) -> int:
    return int(degrees(f.q, f.d, np.array([f.table]))[0])


# -- r-cube copies -------------------------------------------------------------


def _independent(vectors, q: int) -> bool:
    if not vectors:
        return True
    m = np.array(vectors, dtype=np.int64) % q
    return _rank_mod(m, q) == len(vectors)


def _rank_mod(m: np.ndarray, p: int) -> int:
    m = m.copy() % p
    rank = 0
    rows, cols = m.shape
    for col in range(cols):
        piv = next((r for r in range(rank, rows) if m[r, col]), None)
        if piv is None:
            continue
        m[[rank, piv]] = m[[piv, rank]]
        m[rank] = m[rank] * pow(int(m[rank, col]), -1, p) % p
        for r in range(rows):
            if r != rank and m[r, col]:
                m[r] = (m[r] - m[r, col] * m[rank]) % p
        rank += 1
    return rank


def _canonical(row: dict, q: int, signed: bool) -> tuple:
    items = tuple(sorted(row.items()))
    if not signed:
        return items
    neg = tuple(sorted((k, (-v) % q) for k, v in row.items()))
    return min(items, neg)


def _copy_row(pts_signs, q: int, signed: bool) -> dict:
    row: dict[int, int] = {}
    for idx, sign in pts_signs:
        c = sign if signed else 1
        row[idx] = (row.get(idx, 0) + c) % q
    return {k: v for k, v in row.items() if v}


@lru_cache(maxsize=32)
def cube_copies(q: int, d: int, r: int, mode: str, signed: bool = False) -> np.ndarray:
    """Incidence matrix (copies x points) of r-cube copies in F_q^d.

    Each row holds the coefficient of every point in the copy's sum: 1 for a
    plain sum, +-1 (by parity of the cube vertex) when ``signed``.  Copies
    with identical rows up to sign are listed once.
    """
    _check_q(q)
    if not 0 <= r <= d:
        raise ValueError(f"r={r} outside [0, {d}]")
    if q**d > MAX_POINTS:
        raise TooLargeError(f"{q ** d} points exceed {MAX_POINTS}")
    if mode not in ("affine", "isometric"):
        raise ValueError(f"unknown mode {mode!r}")
    allpts = points(q, d)
    verts = list(itertools.product((0, 1), repeat=r))
    rows = {}
    if mode == "affine":
        nonzero = [v for v in allpts if any(v)]
        # reordering the directions leaves the (signed) sum unchanged
        for bs in itertools.combinations(nonzero, r):
            if not _independent(list(bs), q):
                continue
            for a in allpts:
                ps = []
                for x in verts:
                    p = [a[i] + sum(x[j] * bs[j][i] for j in range(r)) for i in range(d)]
                    ps.append((_index(q, [c % q for c in p]), (-1) ** sum(x)))
                row = _copy_row(ps, q, signed)
                if row:
                    rows.setdefault(_canonical(row, q, signed), row)
    else:
        pairs = list(itertools.combinations(range(q), 2))
        for coords in itertools.combinations(range(d), r):
            rest = [i for i in range(d) if i not in coords]
            for choice in itertools.product(pairs, repeat=r):
                for fixed in itertools.product(range(q), repeat=len(rest)):
                    ps = []
                    for x in verts:
                        p = [0] * d
                        for i, v in zip(rest, fixed):
                            p[i] = v
                        for j, i in enumerate(coords):
                            p[i] = choice[j][x[j]]
                        ps.append((_index(q, p), (-1) ** sum(x)))
                    row = _copy_row(ps, q, signed)
                    if row:
                        rows.setdefault(_canonical(row, q, signed), row)
    mat = np.zeros((len(rows), q**d), dtype=np.int64)
    for i, key in enumerate(sorted(rows)):
        for idx, c in rows[key].items():
            mat[i, idx] = c
    mat.setflags(write=False)
    return mat


def passes(q: int, d: int, r: int, mode: str, tables: np.ndarray, signed: bool = False) -> np.ndarray:
    """Boolean mask: which tables sum to zero over every copy."""
    mat = cube_copies(q, d, r, mode, signed)
    sums = (np.asarray(tables, dtype=np.int64) @ mat.T) % q
    return ~sums.any(axis=1)


def field_face_sum_test(f: FieldFn, r: int, mode: str, signed: bool = False) -> bool:
    if r > f.d:
        raise ValueError(f"r={r} exceeds dimension {f.d}")
    return bool(passes(f.q, f.d, r, mode, np.array([f.table]), signed)[0])


def nullspace_mod(m: np.ndarray, p: int) -> np.ndarray:
    """Basis (as rows) of {x : m @ x = 0 mod p}, in reduced echelon form."""
    m = np.array(m, dtype=np.int64) % p
    rows, cols = m.shape
    pivots = []
    rank = 0
    for col in range(cols):
        piv = next((r for r in range(rank, rows) if m[r, col]), None)
        if piv is None:
            continue
        m[[rank, piv]] = m[[piv, rank]]
        m[rank] = m[rank] * pow(int(m[rank, col]), -1, p) % p
        for r in range(rows):
            if r != rank and m[r, col]:
                m[r] = (m[r] - m[r, col] * m[rank]) % p
        pivots.append(col)
        rank += 1
    free = [c for c in range(cols) if c not in pivots]
    basis = np.zeros((len(free), cols), dtype=np.int64)
    for i, fc in enumerate(free):
        basis[i, fc] = 1
        for r, pc in enumerate(pivots):
            basis[i, pc] = (-m[r, fc]) % p
    return basis


def all_tables(q: int, d: int, start: int = 0, stop: int | None = None) -> np.ndarray:
    """Value tables of the functions with keys in [start, stop)."""
    total = q ** (q**d)
    stop = total if stop is None else min(stop, total)
    keys = np.arange(start, stop, dtype=np.int64)
    out = np.empty((len(keys), q**d), dtype=np.int64)
    for i in range(q**d):
        keys, out[:, i] = np.divmod(keys, q)
    return out


def field_search(
    q: int,
    d: int,
    r: int,
    exhaustive: bool = True,
    samples: int = 0,
    seed: int | None = None,
    signed: bool = False,
) -> dict:
    """Compare affine and isometric zero-sum tests against degree <= r.

    The pass sets of both tests are F_q-linear subspaces, so their kernels
    give an exact verdict at any size.  With ``exhaustive`` every one of the
    q^(q^d) functions is also tested directly, which serves as the
    brute-force cross-check of the kernel computation; with ``samples`` the
    kernel is sampled uniformly (seeded) and each draw re-tested directly.
    """
    _check_q(q)
    npts = q**d
    report = {"q": q, "d": d, "r": r, "signed": signed}
    for mode in ("affine", "isometric"):
        mat = cube_copies(q, d, r, mode, signed)
        basis = nullspace_mod(mat, q)
        degs = degrees(q, d, basis) if len(basis) else np.array([], dtype=np.int64)
        entry = {"copies": int(mat.shape[0]), "kernel_dim": int(len(basis))}
        entry["max_degree"] = int(degs.max()) if len(degs) else -1
        for name, bound in (("r", r), ("r_minus_1", r - 1)):
            # the pass set is a subspace: it lies in degree <= bound iff its basis does
            high = np.flatnonzero(degs > bound)
            entry[f"implies_degree_le_{name}"] = not len(high)
            entry[f"witness_above_{name}"] = _key_of(basis[high[0]], q) if len(high) else None
        report[mode] = entry
    if exhaustive:
        total = q**npts
        if total > MAX_EXHAUSTIVE:
            raise TooLargeError(f"{total} functions exceed exhaustive limit")
        tabs = all_tables(q, d)
        degs = degrees(q, d, tabs)
        for mode in ("affine", "isometric"):
            ok = passes(q, d, r, mode, tabs, signed)
            ex = {
                "functions": int(total),
                "passing": int(ok.sum()),
                "max_degree": int(degs[ok].max()) if ok.any() else -1,
            }
            for name, bound in (("r", r), ("r_minus_1", r - 1)):
                bad = np.flatnonzero(ok & (degs > bound))
                ex[f"passing_above_{name}"] = int(len(bad))
                ex[f"first_witness_above_{name}"] = int(bad[0]) if len(bad) else None
            report[mode]["exhaustive"] = ex
    if samples:
        if seed is None:
            raise ValueError("sampled search needs a seed")
        rng = np.random.Generator(np.random.Philox(key=seed))
        for mode in ("affine", "isometric"):
            basis = nullspace_mod(cube_copies(q, d, r, mode, signed), q)
            if len(basis):
                combos = rng.integers(0, q, size=(samples, len(basis)))
                draws = combos @ basis % q
            else:
                draws = np.zeros((samples, npts), dtype=np.int64)
            ok = passes(q, d, r, mode, draws, signed)
            degs = degrees(q, d, draws)
            report[mode]["sampled"] = {
                "samples": samples,
                "seed": seed,
                "all_pass_direct_test": bool(ok.all()),
                "draws_above_r": int((degs > r).sum()),
                "draws_above_r_minus_1": int((degs > r - 1).sum()),
            }
    iso = report["isometric"]
    if not iso["implies_degree_le_r"]:
        report["verdict"] = f"isometric-only witness of degree > r at (q,d,r)=({q},{d},{r})"
    else:
        report["verdict"] = f"exhausted at (q,d,r)=({q},{d},{r}): no isometric-only witness of degree > r"
    return report


def _key_of(table, q: int) -> int:
    return sum(int(v) * q**i for i, v in enumerate(table))
