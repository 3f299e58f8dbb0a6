"""Exact invariant probability measures on configuration spaces K^(F_2^n).

Weights are ``fractions.Fraction`` throughout, so invariance and
reconstruction checks are equalities.  At finite scale the extreme invariant
measures are exactly the uniform measures on single orbits, which is what
``ergodic_decompose`` reports; nothing here says anything about weak mixing
of the infinite action.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping

from .cube import Config, Face, _group, act_on_config, generators

ONE = Fraction(1)


class MeasureError(ValueError):
    pass


class ExactMeasure:
    """A finitely supported probability measure on k-ary configs of F_2^n."""

    __slots__ = ("n", "k", "_w")

    def __init__(self, n: int, k: int, weights: Mapping[Config, Fraction]):
        w = {}
        for c, p in weights.items():
            p = Fraction(p)
            if p < 0:
                raise MeasureError(f"negative weight {p}")
            if p == 0:
                continue
            if c.n != n or c.k != k:
                raise MeasureError(f"config of shape ({c.n},{c.k}) in a ({n},{k}) measure")
            w[c] = p
        total = sum(w.values(), Fraction(0))
        if total != 1:
            raise MeasureError(f"weights sum to {total}, not 1")
        self.n = n
        self.k = k
        self._w = w

    def __getitem__(self, c: Config) -> Fraction:
        return self._w.get(c, Fraction(0))

    def __len__(self):
        return len(self._w)

    def __eq__(self, other):
        if not isinstance(other, ExactMeasure):
            return NotImplemented
        return (self.n, self.k) == (other.n, other.k) and self._w == other._w

    def __hash__(self):
        return hash((self.n, self.k, frozenset(self._w.items())))

    def __repr__(self):
        body = ", ".join(f"{c.key}: {p}" for c, p in self.items()[:6])
        more = ", ..." if len(self) > 6 else ""
        return f"ExactMeasure(n={self.n}, k={self.k}, {{{body}{more}}})"

    def items(self) -> list[tuple[Config, Fraction]]:
        """Support in canonical (ascending key) order."""
        return sorted(self._w.items(), key=lambda it: it[0].key)

    def support(self) -> list[Config]:
        return [c for c, _ in self.items()]

    def expect(self, f) -> Fraction:
        return sum((p * f(c) for c, p in self._w.items()), Fraction(0))


def delta(c: Config) -> ExactMeasure:
    return ExactMeasure(c.n, c.k, {c: ONE})


def uniform(configs: Iterable[Config]) -> ExactMeasure:
    configs = set(configs)
    if not configs:
        raise MeasureError("uniform measure on an empty set")
    first = next(iter(configs))
    w = Fraction(1, len(configs))
    return ExactMeasure(first.n, first.k, {c: w for c in configs})


def mix(terms: Iterable[tuple[Fraction, ExactMeasure]]) -> ExactMeasure:
    """Convex combination sum a_i mu_i."""
    acc: dict[Config, Fraction] = defaultdict(Fraction)
    shape = None
    for a, mu in terms:
        shape = shape or (mu.n, mu.k)
        if (mu.n, mu.k) != shape:
            raise MeasureError("mixing measures on different spaces")
        for c, p in mu.items():
            acc[c] += Fraction(a) * p
    if shape is None:
        raise MeasureError("empty mixture")
    return ExactMeasure(shape[0], shape[1], acc)


def pushforward(mu: ExactMeasure, fn, n: int | None = None, k: int | None = None) -> ExactMeasure:
    acc: dict[Config, Fraction] = defaultdict(Fraction)
    for c, p in mu.items():
        acc[fn(c)] += p
    some = next(iter(acc))
    return ExactMeasure(some.n if n is None else n, some.k if k is None else k, acc)


def act(g, mu: ExactMeasure) -> ExactMeasure:
    """Law of g.omega when omega ~ mu."""
    return pushforward(mu, lambda c: act_on_config(g, c))


def is_invariant(mu: ExactMeasure) -> bool:
    """Exact invariance under the generating set of Isom(F_2^n)."""
    if mu.n == 0:
        return True
    for g in generators(mu.n):
        for c, p in mu.items():
            if mu[act_on_config(g, c)] != p:
                return False
    return True


# -- pair spaces ---------------------------------------------------------------


def pair_config(a: Config, b: Config) -> Config:
    """Encode (omega, eta) as one config over the alphabet K1 x K2."""
    if a.n != b.n:
        raise MeasureError("pairing configs of different dimension")
    return Config(a.n, a.k * b.k, tuple(x * b.k + y for x, y in zip(a.values, b.values)))


def split_pair(c: Config, k2: int) -> tuple[Config, Config]:
    k1 = c.k // k2
    return (
        Config(c.n, k1, tuple(v // k2 for v in c.values)),
        Config(c.n, k2, tuple(v % k2 for v in c.values)),
    )


def product(mu: ExactMeasure, nu: ExactMeasure) -> ExactMeasure:
    if mu.n != nu.n:
        raise MeasureError("product of measures on different cubes")
    return ExactMeasure(
        mu.n,
        mu.k * nu.k,
        {pair_config(a, b): p * q for a, p in mu.items() for b, q in nu.items()},
    )


# -- orbits and decomposition ------------------------------------------------


@lru_cache(maxsize=1 << 16)
def orbit(c: Config) -> frozenset[Config]:
    if c.n == 0:
        return frozenset([c])
    return frozenset(act_on_config(g, c) for g in _group(c.n))


def rep(c: Config) -> Config:
    """Orbit representative: the minimal key."""
    return min(orbit(c), key=lambda x: x.key)


def orbit_uniform(c: Config) -> ExactMeasure:
    return uniform(orbit(c))


@dataclass(frozen=True)
class OrbitDecomposition:
    n: int
    k: int
    terms: tuple[tuple[Config, Fraction], ...]

    def reconstruct(self) -> ExactMeasure:
        return mix((w, orbit_uniform(c)) for c, w in self.terms)

    def weights(self) -> dict[int, Fraction]:
        return {c.key: w for c, w in self.terms}


def ergodic_decompose(mu: ExactMeasure) -> OrbitDecomposition:
    """mu = sum_O mu(O) * uniform(O), orbits in representative order."""
    if not is_invariant(mu):
        raise MeasureError("cannot decompose a non-invariant measure")
    acc: dict[Config, Fraction] = defaultdict(Fraction)
    for c, p in mu.items():
        acc[rep(c)] += p
    terms = tuple(sorted(acc.items(), key=lambda it: it[0].key))
    return OrbitDecomposition(mu.n, mu.k, terms)


# -- marginals -------------------------------------------------------------------


def marginal(mu: ExactMeasure, face: Face) -> ExactMeasure:
    """Law of the restriction to ``face``, read in the face's chart."""
    if face.n != mu.n:
        raise MeasureError(f"face in dimension {face.n}, measure in {mu.n}")
    pts = face.points()
    acc: dict[Config, Fraction] = defaultdict(Fraction)
    for c, p in mu.items():
        acc[Config(face.dim, mu.k, tuple(c.values[x] for x in pts))] += p
    return ExactMeasure(face.dim, mu.k, acc)


def tv_distance(mu: ExactMeasure, nu: ExactMeasure) -> Fraction:
    if (mu.n, mu.k) != (nu.n, nu.k):
        raise MeasureError("total variation between different spaces")
    keys = set(mu.support()) | set(nu.support())
    return sum((abs(mu[c] - nu[c]) for c in keys), Fraction(0)) / 2


def cylinder_tv(mu: ExactMeasure, nu: ExactMeasure, face: Face) -> Fraction:
    if (mu.n, mu.k) != (nu.n, nu.k):
        raise MeasureError("cylinder distance between different spaces")
    return tv_distance(marginal(mu, face), marginal(nu, face))
