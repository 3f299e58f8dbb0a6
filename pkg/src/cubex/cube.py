"""The finite cube F_2^n, its faces and its isometry group.

Point encoding: coordinate i (1-based) of a point is bit i-1 of its index.
Every file format in the package depends on this, so it never changes.

Isometries act on points covariantly, g(x) = pi(x) + t with
(pi(x))_i = x_{pi^-1(i)}.  Configurations (maps from points to symbols)
are acted on contravariantly, (g.c)(x) = c(g(x)), so that

    act_on_config(compose(g, h), c) == act_on_config(h, act_on_config(g, c)).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from math import comb, factorial
from typing import Iterable, Iterator, Sequence

import numpy as np

MAX_DIM = 24
MAX_ENUM_DIM = 8
MAX_ORBIT_TABLE = 1 << 20


class DimensionError(ValueError):
    pass


class TooLargeError(ValueError):
    """Raised when a request exceeds an enumeration guard."""


def _check_dim(n: int) -> None:
    if not 1 <= n <= MAX_DIM:
        raise DimensionError(f"dimension {n} outside [1, {MAX_DIM}]")


def _same_dim(a: int, b: int) -> None:
    if a != b:
        raise DimensionError(f"dimension mismatch: {a} != {b}")


@dataclass(frozen=True, order=True)
class CubePoint:
    n: int
    index: int

    def __post_init__(self):
        _check_dim(self.n)
        if not 0 <= self.index < (1 << self.n):
            raise ValueError(f"index {self.index} not a point of F_2^{self.n}")

    @property
    def coords(self) -> tuple[int, ...]:
        return tuple((self.index >> i) & 1 for i in range(self.n))

    @property
    def weight(self) -> int:
        return self.index.bit_count()


def unit(n: int, i: int) -> CubePoint:
    """The basis vector e_i (1-based)."""
    return CubePoint(n, 1 << (i - 1))


def hamming(x: int, y: int) -> int:
    return (x ^ y).bit_count()


def _permute_bits(perm: Sequence[int], x: int) -> int:
    # perm is 0-based: bit j of x moves to position perm[j]
    y = 0
    j = 0
    while x:
        if x & 1:
            y |= 1 << perm[j]
        x >>= 1
        j += 1
    return y


@dataclass(frozen=True)
class Isometry:
    """An element (pi, t) of Isom(F_2^n).

    ``perm`` is the one-line form of pi over {1..n}: ``perm[i-1] = pi(i)``.
    """

    n: int
    perm: tuple[int, ...]
    trans: int = 0

    def __post_init__(self):
        _check_dim(self.n)
        if sorted(self.perm) != list(range(1, self.n + 1)):
            raise ValueError(f"{self.perm} is not a permutation of 1..{self.n}")
        if not 0 <= self.trans < (1 << self.n):
            raise ValueError("translation out of range")
        object.__setattr__(self, "_p0", tuple(p - 1 for p in self.perm))

    @classmethod
    def identity(cls, n: int) -> Isometry:
        return cls(n, tuple(range(1, n + 1)), 0)

    @classmethod
    def flip(cls, n: int, i: int) -> Isometry:
        """The bit-flip sigma_i: x -> x + e_i."""
        return cls(n, tuple(range(1, n + 1)), 1 << (i - 1))

    @classmethod
    def transposition(cls, n: int, i: int, j: int) -> Isometry:
        perm = list(range(1, n + 1))
        perm[i - 1], perm[j - 1] = perm[j - 1], perm[i - 1]
        return cls(n, tuple(perm), 0)

    def __call__(self, x: int) -> int:
        return _permute_bits(self._p0, x) ^ self.trans

    def table(self) -> tuple[int, ...]:
        """Full action table: ``table()[x] == self(x)``."""
        return point_table(self.n, self.perm, self.trans)

    def is_identity(self) -> bool:
        return self.trans == 0 and self.perm == tuple(range(1, self.n + 1))

    def __str__(self):
        return f"({' '.join(map(str, self.perm))}; t={self.trans:#x})"


@lru_cache(maxsize=65536)
def point_table(n: int, perm: tuple[int, ...], trans: int) -> tuple[int, ...]:
    p0 = tuple(p - 1 for p in perm)
    # pi is linear, so tabulate it from the images of the basis vectors
    basis = [1 << p for p in p0]
    out = [0] * (1 << n)
    for x in range(1, 1 << n):
        low = (x & -x).bit_length() - 1
        out[x] = out[x & (x - 1)] ^ basis[low]
    return tuple(v ^ trans for v in out)


def apply_isometry(g: Isometry, x: CubePoint) -> CubePoint:
    _same_dim(g.n, x.n)
    return CubePoint(g.n, g(x.index))


def compose(g: Isometry, h: Isometry) -> Isometry:
    """The isometry x -> g(h(x)), i.e. (pi_g o pi_h, pi_g(t_h) + t_g)."""
    _same_dim(g.n, h.n)
    perm = tuple(g.perm[p - 1] for p in h.perm)
    trans = _permute_bits(g._p0, h.trans) ^ g.trans
    return Isometry(g.n, perm, trans)


def inverse(g: Isometry) -> Isometry:
    inv = [0] * g.n
    for i, p in enumerate(g.perm):
        inv[p - 1] = i + 1
    inv_t = tuple(inv)
    return Isometry(g.n, inv_t, _permute_bits(tuple(p - 1 for p in inv_t), g.trans))


def generators(n: int) -> list[Isometry]:
    """Adjacent transpositions plus all bit-flips.

    The transpositions generate the coordinate permutations and the flips
    generate the translations, so together they generate Isom(F_2^n).
    """
    _check_dim(n)
    gens = [Isometry.transposition(n, i, i + 1) for i in range(1, n)]
    gens += [Isometry.flip(n, i) for i in range(1, n + 1)]
    return gens


def group_order(n: int) -> int:
    return (1 << n) * factorial(n)


def iter_group(n: int) -> Iterator[Isometry]:
    _check_dim(n)
    for perm in itertools.permutations(range(1, n + 1)):
        for t in range(1 << n):
            yield Isometry(n, perm, t)


@lru_cache(maxsize=8)
def _group(n: int) -> tuple[Isometry, ...]:
    seen = set()
    out = []
    for g in iter_group(n):
        # an affine map is fixed by the images of 0 and the basis vectors
        key = (g(0),) + tuple(g(1 << i) for i in range(n))
        if key in seen:
            continue
        seen.add(key)
        out.append(g)
    return tuple(out)


def enumerate_group(n: int) -> list[Isometry]:
    """All 2^n * n! isometries of F_2^n, permutation-major order."""
    _check_dim(n)
    if n > MAX_ENUM_DIM:
        raise TooLargeError(f"n={n} too large to enumerate; use generators()")
    return list(_group(n))


@lru_cache(maxsize=8)
def group_tables(n: int) -> np.ndarray:
    """Action tables of the whole group as an int array of shape (|G|, 2^n)."""
    return np.array([g.table() for g in _group(n)], dtype=np.int64)


# -- faces -------------------------------------------------------------------


@dataclass(frozen=True, order=True)
class Face:
    """An r-face: the free coordinates vary, the rest are fixed to ``base``.

    ``free`` is stored as a bitmask (bit i-1 for coordinate i); ``base`` has
    every free bit cleared, which makes (free, base) a canonical key.
    """

    n: int
    free: int
    base: int = 0

    def __post_init__(self):
        _check_dim(self.n)
        full = (1 << self.n) - 1
        if self.free & ~full or self.base & ~full:
            raise ValueError("face masks exceed the dimension")
        if self.base & self.free:
            raise ValueError("base must vanish on free coordinates")

    @classmethod
    def from_coords(cls, n: int, free: Iterable[int], base: int = 0) -> Face:
        mask = 0
        for i in free:
            mask |= 1 << (i - 1)
        return cls(n, mask, base & ~mask)

    @property
    def dim(self) -> int:
        return self.free.bit_count()

    @property
    def free_coords(self) -> tuple[int, ...]:
        return tuple(i + 1 for i in range(self.n) if self.free >> i & 1)

    def points(self) -> list[int]:
        """Points in chart order: local index j maps to base + sum_j bits."""
        return [self.base | _deposit(j, self.free) for j in range(1 << self.dim)]

    def mask(self) -> int:
        """The point set as a bitmask over the 2^n points."""
        m = 0
        for x in self.points():
            m |= 1 << x
        return m


def _deposit(j: int, mask: int) -> int:
    """Scatter the low bits of j into the set bits of mask (pdep)."""
    out = 0
    bit = 0
    while mask:
        low = mask & -mask
        if j >> bit & 1:
            out |= low
        mask ^= low
        bit += 1
    return out


def _submasks(mask: int) -> Iterator[int]:
    s = 0
    while True:
        yield s
        s = (s - mask) & mask
        if s == 0:
            return


def enumerate_faces(n: int, r: int) -> list[Face]:
    _check_dim(n)
    if not 0 <= r <= n:
        raise ValueError(f"face dimension {r} outside [0, {n}]")
    full = (1 << n) - 1
    faces = []
    for free in itertools.combinations(range(n), r):
        fmask = sum(1 << i for i in free)
        for base in _submasks(full & ~fmask):
            faces.append(Face(n, fmask, base))
    return faces


def face_count(n: int, r: int) -> int:
    return comb(n, r) << (n - r)


def image_face(g: Isometry, face: Face) -> Face:
    pts = [g(x) for x in face.points()]
    base = min(pts)
    free = 0
    for x in pts:
        free |= x ^ base
    return Face(face.n, free, base & ~free)


# -- configurations ----------------------------------------------------------


@dataclass(frozen=True)
class Config:
    """A map from the 2^n points to symbols in [0, k).

    The canonical integer key reads the values as base-k digits with the
    value at point 0 least significant.  For k = 2 that is the truth table.
    """

    n: int
    k: int
    values: tuple[int, ...]

    def __post_init__(self):
        # n = 0 is allowed here: marginals onto a single point
        if not 0 <= self.n <= MAX_DIM:
            raise DimensionError(f"dimension {self.n} outside [0, {MAX_DIM}]")
        if self.k < 1:
            raise ValueError("alphabet size must be positive")
        if len(self.values) != 1 << self.n:
            raise ValueError(f"config needs {1 << self.n} values, got {len(self.values)}")
        if any(not 0 <= v < self.k for v in self.values):
            raise ValueError(f"config values must lie in [0, {self.k})")

    @classmethod
    def constant(cls, n: int, k: int, value: int) -> Config:
        return cls(n, k, (value,) * (1 << n))

    @classmethod
    def from_key(cls, n: int, k: int, key: int) -> Config:
        vals = []
        for _ in range(1 << n):
            key, v = divmod(key, k)
            vals.append(v)
        if key:
            raise ValueError("key too large for (n, k)")
        return cls(n, k, tuple(vals))

    @property
    def key(self) -> int:
        if self.k == 2:
            return sum(v << i for i, v in enumerate(self.values))
        out = 0
        for v in reversed(self.values):
            out = out * self.k + v
        return out

    def __lt__(self, other: Config) -> bool:
        return (self.n, self.k, self.key) < (other.n, other.k, other.key)

    def restrict(self, face: Face) -> tuple[int, ...]:
        """Values on the face, in the face's chart order."""
        return tuple(self.values[x] for x in face.points())


def act_on_config(g: Isometry, c: Config) -> Config:
    """Contravariant action: the result at x is c at g(x)."""
    _same_dim(g.n, c.n)
    tab = g.table()
    vals = c.values
    return Config(c.n, c.k, tuple(vals[y] for y in tab))


def fixed_point_count(g: Isometry, k: int) -> int:
    """|Fix(g)| on k-ary configurations: k ** (cycles of g on points)."""
    tab = g.table()
    seen = bytearray(len(tab))
    cycles = 0
    for x in range(len(tab)):
        if not seen[x]:
            cycles += 1
            while not seen[x]:
                seen[x] = 1
                x = tab[x]
    return k**cycles


def burnside_count(n: int, k: int) -> int:
    total = sum(fixed_point_count(g, k) for g in _group(n))
    q, rem = divmod(total, group_order(n))
    assert rem == 0
    return q


def orbit_of(c: Config) -> frozenset[Config]:
    """Orbit of a single configuration (orbit-of-seed mode)."""
    return frozenset(act_on_config(g, c) for g in _group(c.n))


def orbit_rep(c: Config) -> Config:
    return min(orbit_of(c), key=lambda x: x.key)


@dataclass(frozen=True)
class OrbitTable:
    """Partition of all k-ary configs on F_2^n into Isom-orbits.

    ``rep_of[key]`` is the minimal key in the orbit of ``key``; ``reps`` lists
    the orbit representatives in increasing order.
    """

    n: int
    k: int
    rep_of: np.ndarray
    reps: tuple[int, ...]
    sizes: tuple[int, ...]

    def __len__(self):
        return len(self.reps)

    def orbit(self, rep: int) -> list[int]:
        return np.flatnonzero(self.rep_of == rep).tolist()


def config_orbits(n: int, k: int) -> OrbitTable:
    _check_dim(n)
    size = k ** (1 << n)
    if size > MAX_ORBIT_TABLE or n > MAX_ENUM_DIM:
        raise TooLargeError(f"{size} configurations exceed the orbit-table limit")
    npts = 1 << n
    keys = np.arange(size, dtype=np.int64)
    digits = np.empty((size, npts), dtype=np.int64)
    rest = keys.copy()
    for i in range(npts):
        rest, digits[:, i] = np.divmod(rest, k)
    place = k ** np.arange(npts, dtype=np.int64)
    rep = keys.copy()
    for tab in group_tables(n):
        np.minimum(rep, digits[:, tab] @ place, out=rep)
    reps, sizes = np.unique(rep, return_counts=True)
    return OrbitTable(n, k, rep, tuple(reps.tolist()), tuple(sizes.tolist()))
