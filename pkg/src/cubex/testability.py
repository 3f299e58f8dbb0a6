"""Face-sampling tests for low degree, and the non-testability witness table.

A subject E is a subset of F_2^n given as a BoolFn.  A trial draws a uniform
J-face (free set uniform among the C(n, J), base uniform among the 2^(n-J)
completions) and passes when E restricted to that face, read in the face's
chart, has degree <= r.  The degree-(r+1) monomial passes with probability
tending to 1 as n grows while staying at relative distance 2^-(r+1) from
every degree-<=r function, which is the witness pattern reported here.

Trial i draws from a Philox stream keyed by (seed, i), so its outcome does
not depend on how trials are scheduled.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, sqrt

import numpy as np

from .boolfn import MAX_RM_DIM, BoolFn, degree, restrict, rm_dimension, rm_distance
from .cube import Face, enumerate_faces


@dataclass(frozen=True)
class TestabilityTrial:
    n: int
    J: int
    r: int
    subject: BoolFn
    trials: int
    seed: int
    passes: int
    exact_p: Fraction | None = None
    distance: int | None = None

    def __post_init__(self):
        if not 0 <= self.passes <= self.trials:
            raise ValueError("pass count exceeds trial count")

    @property
    def rel_distance(self) -> Fraction | None:
        return None if self.distance is None else Fraction(self.distance, 1 << self.n)


def _binom(a: int, b: int) -> int:
    return comb(a, b) if 0 <= b <= a else 0


def face_passes(E: BoolFn, face: Face, r: int) -> bool:
    return degree(restrict(E, face)) <= r


def sample_face(n: int, J: int, seed: int, i: int) -> Face:
    rng = np.random.Generator(np.random.Philox(key=[seed, i]))
    free = rng.choice(n, size=J, replace=False)
    fmask = 0
    for c in free.tolist():
        fmask |= 1 << c
    rest = [c for c in range(n) if not fmask >> c & 1]
    bits = rng.integers(0, 2, size=len(rest)).tolist()
    base = sum(1 << c for c, b in zip(rest, bits) if b)
    return Face(n, fmask, base)


def face_test(E: BoolFn, J: int, r: int, trials: int, seed: int) -> tuple[int, int]:
    """Run ``trials`` seeded face samples; returns (passes, trials)."""
    if not 1 <= J <= E.n:
        raise ValueError(f"J={J} outside [1, {E.n}]")
    if seed is None:
        raise ValueError("face_test needs a seed")
    passes = sum(face_passes(E, sample_face(E.n, J, seed, i), r) for i in range(trials))
    return passes, trials


def enumerated_pass_probability(E: BoolFn, J: int, r: int) -> Fraction:
    """Exact pass probability by visiting every J-face."""
    faces = enumerate_faces(E.n, J)
    return Fraction(sum(face_passes(E, f, r) for f in faces), len(faces))


def exact_pass_probability(coords, n: int, J: int, r: int) -> Fraction:
    """Pass probability for the monomial prod_{i in coords} x_i of degree r+1.

    A face fails exactly when all of the monomial's coordinates are free.
    """
    coords = tuple(coords)
    if len(set(coords)) != len(coords) or len(coords) != r + 1:
        raise ValueError(f"monomial must have r+1 = {r + 1} distinct coordinates")
    if any(not 1 <= c <= n for c in coords):
        raise ValueError("monomial coordinate out of range")
    if not 0 <= J <= n:
        raise ValueError(f"J={J} outside [0, {n}]")
    return 1 - Fraction(_binom(n - (r + 1), J - (r + 1)), comb(n, J))


def within_three_sigma(passes: int, trials: int, p: Fraction) -> bool:
    sigma = sqrt(float(p) * (1 - float(p)) / trials)
    return abs(passes / trials - float(p)) <= 3 * sigma


def nontestability_report(
    r: int, n_list, J: int, trials: int = 0, seed: int | None = None
) -> list[dict]:
    """Rows (n, J, r, trials, passes, exact_p, distance, rel_distance).

    The subject is x_1 ... x_{r+1}.  Its Reed-Muller distance is brute forced
    where the code is small enough and otherwise reported analytically as
    2^(n-r-1); ``distance_method`` says which.
    """
    if trials and seed is None:
        raise ValueError("sampled rows need a seed")
    rows = []
    coords = tuple(range(1, r + 2))
    for n in n_list:
        E = BoolFn.monomial(n, coords)
        exact = exact_pass_probability(coords, n, J, r)
        if rm_dimension(n, r) <= MAX_RM_DIM and n <= 10:
            dist, method = rm_distance(E, r), "brute-force"
        else:
            dist, method = 1 << (n - r - 1), "analytic"
        passes = face_test(E, J, r, trials, seed)[0] if trials else 0
        rows.append(
            {
                "n": n,
                "J": J,
                "r": r,
                "trials": trials,
                "passes": passes,
                "exact_p": exact,
                "distance": dist,
                "rel_distance": Fraction(dist, 1 << n),
                "distance_method": method,
            }
        )
    return rows
