"""The d-bar (joining) distance between invariant measures, computed exactly.

A joining of mu and nu is an invariant measure on pairs of configs with
marginals mu and nu.  Averaging any joining over the group keeps both
marginals and the disagreement mass, so it suffices to optimise over
invariant joinings, i.e. over weights x_P on the diagonal orbits P of pair
configs.  Every pair orbit projects onto a single orbit on each side, which
makes the marginal constraints 0/1 rows:

    sum_{P -> O} x_P = mu(O)   for each orbit O on the first side,

and the objective is sum_P x_P * (share of P disagreeing at the vertex v).
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction

from . import lp
from .cube import Config, TooLargeError, config_orbits
from .measures import (
    ExactMeasure,
    MeasureError,
    ergodic_decompose,
    is_invariant,
    mix,
    orbit,
    orbit_uniform,
    pair_config,
    rep,
    split_pair,
)

MAX_PAIRS = 1 << 17


class JoiningError(RuntimeError):
    pass


@dataclass
class JoiningProgram:
    n: int
    k: int
    vertex: int
    orbits: list[Config]
    sizes: list[int]
    objective: list[Fraction]
    row_keys: list[tuple[str, int]]
    A: list[list[int]]
    b: list[Fraction]
    first: list[int] = field(default_factory=list)
    second: list[int] = field(default_factory=list)

    def column_sums_ok(self) -> bool:
        """Each pair orbit contributes exactly once to each side's rows."""
        for j in range(len(self.orbits)):
            for side in ("first", "second"):
                s = sum(self.A[i][j] for i, (sd, _) in enumerate(self.row_keys) if sd == side)
                if s != 1:
                    return False
        return True

    def joining(self, x) -> ExactMeasure:
        """The invariant pair measure sum_P x_P * uniform(P)."""
        return mix((w, orbit_uniform(c)) for c, w in zip(self.orbits, x) if w)


def disagreement(pair: Config, k: int, v: int) -> int:
    s = pair.values[v]
    return int(s // k != s % k)


def disagreement_mass(lam: ExactMeasure, k: int, v: int = 0) -> Fraction:
    return sum((p for c, p in lam.items() if disagreement(c, k, v)), Fraction(0))


def _orbit_closure(mu: ExactMeasure) -> list[Config]:
    out = set()
    for c in mu.support():
        out |= orbit(c)
    return sorted(out, key=lambda c: c.key)


def build_joining_program(
    mu: ExactMeasure, nu: ExactMeasure, v: int = 0, mode: str = "sparse"
) -> JoiningProgram:
    """Orbit-reduced LP whose feasible points are the invariant joinings.

    ``sparse`` only enumerates pairs drawn from the orbits meeting the two
    supports (other pairs are forced to weight zero anyway); ``full``
    enumerates the whole pair space through the cube-core orbit table.
    """
    if (mu.n, mu.k) != (nu.n, nu.k):
        raise MeasureError("joinings need measures on the same space")
    if not (is_invariant(mu) and is_invariant(nu)):
        raise MeasureError("joining program needs invariant marginals")
    n, k = mu.n, mu.k
    if not 0 <= v < 1 << n:
        raise ValueError("reference vertex out of range")

    if mode == "sparse":
        left, right = _orbit_closure(mu), _orbit_closure(nu)
        if len(left) * len(right) > MAX_PAIRS:
            raise TooLargeError("pair space too large")
        seen: set[Config] = set()
        orbits, members = [], []
        for a in left:
            for b in right:
                pc = pair_config(a, b)
                if pc in seen:
                    continue
                orb = orbit(pc)
                seen |= orb
                orbits.append(min(orb, key=lambda c: c.key))
                members.append(orb)
        order = sorted(range(len(orbits)), key=lambda i: orbits[i].key)
        orbits = [orbits[i] for i in order]
        members = [members[i] for i in order]
    elif mode == "full":
        table = config_orbits(n, k * k)
        orbits = [Config.from_key(n, k * k, r) for r in table.reps]
        members = [[Config.from_key(n, k * k, x) for x in table.orbit(r)] for r in table.reps]
    else:
        raise ValueError(f"unknown mode {mode!r}")

    first, second, objective, sizes = [], [], [], []
    for orb_rep, orb in zip(orbits, members):
        a, b = split_pair(orb_rep, k)
        first.append(rep(a).key)
        second.append(rep(b).key)
        sizes.append(len(orb))
        bad = sum(disagreement(c, k, v) for c in orb)
        objective.append(Fraction(bad, len(orb)))

    mass1: dict[int, Fraction] = defaultdict(Fraction)
    mass2: dict[int, Fraction] = defaultdict(Fraction)
    for c, p in mu.items():
        mass1[rep(c).key] += p
    for c, p in nu.items():
        mass2[rep(c).key] += p
    row_keys = [("first", r) for r in sorted(set(first))]
    row_keys += [("second", r) for r in sorted(set(second))]
    A, b = [], []
    for side, r in row_keys:
        col = first if side == "first" else second
        A.append([int(x == r) for x in col])
        b.append((mass1 if side == "first" else mass2)[r])
    return JoiningProgram(n, k, v, orbits, sizes, objective, row_keys, A, b, first, second)


@dataclass
class JoiningSolution:
    value: Fraction
    weights: list[Fraction]
    program: JoiningProgram

    @property
    def joining(self) -> ExactMeasure:
        return self.program.joining(self.weights)


def solve_program(prog: JoiningProgram, order: list[int] | None = None) -> JoiningSolution:
    """Solve, optionally presenting the columns in a permuted ``order``."""
    cols = list(range(len(prog.orbits))) if order is None else list(order)
    res = lp.solve(
        [prog.objective[j] for j in cols],
        [[row[j] for j in cols] for row in prog.A],
        prog.b,
    )
    if res.status != "optimal":
        raise JoiningError(f"joining program {res.status}; marginals should always admit one")
    x = [Fraction(0)] * len(cols)
    for pos, j in enumerate(cols):
        x[j] = res.x[pos]
    return JoiningSolution(res.value, x, prog)


def optimal_joining(mu: ExactMeasure, nu: ExactMeasure, v: int = 0, mode: str = "sparse") -> JoiningSolution:
    return solve_program(build_joining_program(mu, nu, v, mode))


def dbar_distance(mu: ExactMeasure, nu: ExactMeasure, v: int = 0) -> Fraction:
    return optimal_joining(mu, nu, v).value


def marginals(lam: ExactMeasure, k: int) -> tuple[ExactMeasure, ExactMeasure]:
    a: dict[Config, Fraction] = defaultdict(Fraction)
    b: dict[Config, Fraction] = defaultdict(Fraction)
    for c, p in lam.items():
        x, y = split_pair(c, k)
        a[x] += p
        b[y] += p
    return ExactMeasure(lam.n, k, a), ExactMeasure(lam.n, k, b)


def compose_joinings(l1: ExactMeasure, l2: ExactMeasure, k: int) -> ExactMeasure:
    """Relational composition: glue (w, e) ~ l1 and (e, z) ~ l2 along e.

    The glued triple is conditionally independent given e, which keeps it
    invariant when l1 and l2 are.
    """
    by_mid: dict[Config, list[tuple[Config, Fraction]]] = defaultdict(list)
    mid_mass: dict[Config, Fraction] = defaultdict(Fraction)
    for c, p in l2.items():
        e, z = split_pair(c, k)
        by_mid[e].append((z, p))
        mid_mass[e] += p
    acc: dict[Config, Fraction] = defaultdict(Fraction)
    for c, p in l1.items():
        w, e = split_pair(c, k)
        if e not in by_mid:
            raise MeasureError("joinings do not share the middle marginal")
        for z, q in by_mid[e]:
            acc[pair_config(w, z)] += p * q / mid_mass[e]
    return ExactMeasure(l1.n, k * k, acc)


@dataclass
class NearDiagonalReport:
    terms: list[tuple[Config, Fraction, Fraction]]
    total: Fraction
    weighted_sum: Fraction

    @property
    def identity_holds(self) -> bool:
        return self.total == self.weighted_sum


def near_diagonal_decomposition(lam: ExactMeasure, k: int, v: int = 0) -> NearDiagonalReport:
    """Orbit components of a pair measure with their disagreement masses.

    Each component is uniform on one orbit, so its two marginals are again
    orbit-uniform (ergodic at finite scale).
    """
    dec = ergodic_decompose(lam)
    terms = []
    for c, w in dec.terms:
        orb = orbit(c)
        share = Fraction(sum(disagreement(x, k, v) for x in orb), len(orb))
        terms.append((c, w, share))
    total = disagreement_mass(lam, k, v)
    weighted = sum((w * s for _, w, s in terms), Fraction(0))
    return NearDiagonalReport(terms, total, weighted)
