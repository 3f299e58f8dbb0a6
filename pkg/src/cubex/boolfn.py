"""Boolean functions on F_2^n as truth-table bitboards.

A function is held as a Python int whose bit ``i`` is the value at point
``i``; its algebraic normal form uses the same layout, bit ``a`` holding the
coefficient of the monomial prod_{i : bit i-1 of a set} x_i.  All kernels
are word-parallel over that int.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb

from .cube import Face, TooLargeError, _check_dim, _same_dim, enumerate_faces

MAX_RM_DIM = 20


@dataclass(frozen=True)
class BoolFn:
    n: int
    table: int

    def __post_init__(self):
        _check_dim(self.n)
        if not 0 <= self.table < (1 << (1 << self.n)):
            raise ValueError("truth table does not fit 2^n bits")

    def __call__(self, x: int) -> int:
        return self.table >> x & 1

    @classmethod
    def from_values(cls, values) -> BoolFn:
        values = list(values)
        n = len(values).bit_length() - 1
        if len(values) != 1 << n:
            raise ValueError("table length must be a power of two")
        return cls(n, sum((v & 1) << i for i, v in enumerate(values)))

    @classmethod
    def monomial(cls, n: int, coords) -> BoolFn:
        """The product of x_i over the given 1-based coordinates."""
        a = 0
        for i in coords:
            a |= 1 << (i - 1)
        return mobius_forward(AnfCoeffs(n, 1 << a))

    @classmethod
    def from_hex(cls, n: int, text: str) -> BoolFn:
        return cls(n, int(text, 16))

    def to_hex(self) -> str:
        return format(self.table, f"0{max(1, (1 << self.n) // 4)}x")

    def values(self) -> list[int]:
        return [self.table >> i & 1 for i in range(1 << self.n)]

    @property
    def weight(self) -> int:
        return self.table.bit_count()


@dataclass(frozen=True)
class AnfCoeffs:
    n: int
    coeffs: int

    def __post_init__(self):
        _check_dim(self.n)
        if not 0 <= self.coeffs < (1 << (1 << self.n)):
            raise ValueError("coefficient vector does not fit 2^n bits")

    def support(self) -> list[tuple[int, ...]]:
        """Monomials with nonzero coefficient, as tuples of 1-based coordinates."""
        out = []
        c = self.coeffs
        while c:
            a = (c & -c).bit_length() - 1
            out.append(tuple(i + 1 for i in range(self.n) if a >> i & 1))
            c &= c - 1
        return out


@lru_cache(maxsize=64)
def _low_half_masks(n: int) -> tuple[int, ...]:
    """For each i, the points whose coordinate i+1 is zero."""
    size = 1 << n
    all_ones = (1 << size) - 1
    masks = []
    for i in range(n):
        step = 1 << i
        block = (1 << step) - 1
        masks.append(block * (all_ones // ((1 << (2 * step)) - 1)))
    return tuple(masks)


def _mobius(n: int, t: int) -> int:
    # butterfly: on each coordinate, add the value at x_i=0 into x_i=1
    for i, m in enumerate(_low_half_masks(n)):
        t ^= (t & m) << (1 << i)
    return t


def mobius_forward(u: AnfCoeffs) -> BoolFn:
    """g(v) = XOR of u_alpha over alpha contained in supp(v)."""
    return BoolFn(u.n, _mobius(u.n, u.coeffs))


def mobius_inverse(g: BoolFn) -> AnfCoeffs:
    # over F_2 the transform is its own inverse
    return AnfCoeffs(g.n, _mobius(g.n, g.table))


@lru_cache(maxsize=64)
def _weight_layers(n: int) -> tuple[int, ...]:
    """layers[d] = bitmask of the indices with popcount d."""
    layers = [0] * (n + 1)
    for a in range(1 << n):
        layers[a.bit_count()] |= 1 << a
    return tuple(layers)


def anf_degree(u: AnfCoeffs) -> int:
    layers = _weight_layers(u.n)
    for d in range(u.n, -1, -1):
        if u.coeffs & layers[d]:
            return d
    return -1


def degree(g: BoolFn) -> int:
    """Algebraic degree; -1 for the zero function."""
    return anf_degree(mobius_inverse(g))


def face_sum(g: BoolFn, face: Face) -> int:
    _same_dim(g.n, face.n)
    return (g.table & face.mask()).bit_count() & 1


@lru_cache(maxsize=64)
def _face_masks(n: int, r: int) -> tuple[int, ...]:
    return tuple(f.mask() for f in enumerate_faces(n, r))


def omega_member(g: BoolFn, r: int) -> bool:
    """True iff g sums to zero over every r-face of F_2^n."""
    if not 1 <= r <= g.n:
        raise ValueError(f"r={r} outside [1, {g.n}]")
    t = g.table
    return all(not (t & m).bit_count() & 1 for m in _face_masks(g.n, r))


def restrict(g: BoolFn, face: Face) -> BoolFn:
    """Restriction to a face, read in the face's chart (free coords ascending)."""
    _same_dim(g.n, face.n)
    if face.dim == 0:
        raise ValueError("cannot chart a 0-face as a function on F_2^0")
    t = g.table
    bits = 0
    for j, x in enumerate(face.points()):
        bits |= (t >> x & 1) << j
    return BoolFn(face.dim, bits)


def rm_dimension(n: int, r: int) -> int:
    return sum(comb(n, i) for i in range(min(r, n) + 1))


def rm_basis(n: int, r: int) -> list[int]:
    """Truth tables of the monomials of degree <= r."""
    return [
        _mobius(n, 1 << a) for a in range(1 << n) if a.bit_count() <= r
    ]


def rm_distance(g: BoolFn, r: int) -> int:
    """Hamming distance from g to the nearest function of degree <= r.

    Exact: walks every codeword of the Reed-Muller code RM(r, n) in Gray-code
    order, so the code dimension is capped at ``MAX_RM_DIM``.
    """
    if r < 0:
        return g.weight
    dim = rm_dimension(g.n, r)
    if dim > MAX_RM_DIM:
        raise TooLargeError(f"RM({r},{g.n}) has dimension {dim} > {MAX_RM_DIM}")
    basis = rm_basis(g.n, r)
    word = g.table
    best = word.bit_count()
    for i in range(1, 1 << dim):
        word ^= basis[(i & -i).bit_length() - 1]
        w = word.bit_count()
        if w < best:
            best = w
            if best == 0:
                break
    return best


def verify_omega_threshold(n: int) -> dict:
    """Exhaustively compare face-sum membership with degree bounds.

    For every function on F_2^n and every r in 1..n, checks
    ``omega_member(g, r)`` against ``degree(g) <= r - 1`` and against the
    looser ``degree(g) <= r``.  Returns per-r mismatch counts, the first
    counterexample to each reading, and the threshold that held everywhere.
    """
    _check_dim(n)
    if n > 4:
        raise TooLargeError("exhaustive threshold check is limited to n <= 4")
    total = 1 << (1 << n)
    rows = []
    for r in range(1, n + 1):
        masks = _face_masks(n, r)
        members = 0
        miss = {r - 1: 0, r: 0}
        first = {r - 1: None, r: None}
        for t in range(total):
            member = all(not (t & m).bit_count() & 1 for m in masks)
            members += member
            d = degree(BoolFn(n, t))
            for bound in (r - 1, r):
                if member != (d <= bound):
                    miss[bound] += 1
                    if first[bound] is None:
                        first[bound] = t
        rows.append(
            {
                "r": r,
                "members": members,
                "mismatch_deg_le_r_minus_1": miss[r - 1],
                "mismatch_deg_le_r": miss[r],
                "counterexample_deg_le_r": first[r],
            }
        )
    holds = {
        "r-1": all(row["mismatch_deg_le_r_minus_1"] == 0 for row in rows),
        "r": all(row["mismatch_deg_le_r"] == 0 for row in rows),
    }
    verified = [name for name, ok in holds.items() if ok]
    return {
        "n": n,
        "functions": total,
        "rows": rows,
        "verified_threshold": verified[0] if len(verified) == 1 else verified,
        "summary": (
            f"verified: Omega_r <=> degree <= {verified[0]} for r=1..{n}, {total} functions"
            if len(verified) == 1
            else "no single threshold verified"
        ),
    }
