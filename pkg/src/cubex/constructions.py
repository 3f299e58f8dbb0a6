"""Explicit invariant measures on cube configurations.

* the hyperplane measure: law of x -> <x, z> + eta with z_i iid Bernoulli(p)
  and eta a fair bit, which puts mass close to 1/2 on each constant pattern
  over any fixed subcube when p is small;
* random-walk measures over a finite abelian group U: g_v = g_0 + sum v_i g_i
  with g_0 uniform and the increments iid from nu;
* the selector psi(eta, w1, w2) and the mixture experiment that feeds a
  hyperplane measure and an orbit component of mu1 x mu2 through it.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import prod

from .cube import Config, Face, TooLargeError, _same_dim
from .measures import (
    ExactMeasure,
    MeasureError,
    ergodic_decompose,
    is_invariant,
    marginal,
    orbit_uniform,
    product,
    split_pair,
)

MAX_HYPERPLANE_DIM = 10
MAX_WALK_SUPPORT = 10**6
MAX_MIXTURE_SUPPORT = 2 * 10**5
MAX_FACTOR = 16


@dataclass(frozen=True)
class HyperplaneParams:
    n: int
    p: Fraction

    def __post_init__(self):
        object.__setattr__(self, "p", Fraction(self.p))
        if not 0 < self.p < 1:
            raise ValueError(f"p={self.p} must lie strictly between 0 and 1")


def hyperplane_measure(params: HyperplaneParams) -> ExactMeasure:
    n, p = params.n, params.p
    if not 1 <= n <= MAX_HYPERPLANE_DIM:
        raise TooLargeError(f"hyperplane measure limited to 1 <= n <= {MAX_HYPERPLANE_DIM}")
    weights = {}
    half = Fraction(1, 2)
    for z in range(1 << n):
        wz = z.bit_count()
        base = half * p**wz * (1 - p) ** (n - wz)
        vals = tuple((x & z).bit_count() & 1 for x in range(1 << n))
        for eta in (0, 1):
            weights[Config(n, 2, tuple(v ^ eta for v in vals))] = base
    return ExactMeasure(n, 2, weights)


def marginal_allzero_prob(params: HyperplaneParams, N: int) -> Fraction:
    """Mass of the all-zero pattern on the subcube of the first N coordinates.

    The pattern is constant there iff z_1 = ... = z_N = 0, and then it is
    zero iff eta = 0.
    """
    if not 0 <= N <= params.n:
        raise ValueError(f"N={N} outside [0, {params.n}]")
    return (1 - params.p) ** N / 2


def subcube(n: int, N: int) -> Face:
    return Face(n, (1 << N) - 1, 0)


def constant_pattern_mass(mu: ExactMeasure, N: int, value: int) -> Fraction:
    """Mass of the constant pattern on the first-N subcube, by enumeration."""
    if N == 0:
        return sum((p for c, p in mu.items() if c.values[0] == value), Fraction(0))
    m = marginal(mu, subcube(mu.n, N))
    return m[Config.constant(N, mu.k, value)]


# -- finite abelian groups and random walks --------------------------------------


@dataclass(frozen=True)
class FiniteAbelianGroup:
    """Z/m_1 x ... x Z/m_s; elements indexed in mixed radix, factor 1 fastest."""

    factors: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        if not self.factors or any(not 1 <= m <= MAX_FACTOR for m in self.factors):
            raise ValueError(f"cyclic factors must lie in [1, {MAX_FACTOR}]")

    @property
    def order(self) -> int:
        return prod(self.factors)

    def element(self, i: int) -> tuple[int, ...]:
        out = []
        for m in self.factors:
            i, r = divmod(i, m)
            out.append(r)
        return tuple(out)

    def index(self, e) -> int:
        i = 0
        for r, m in zip(reversed(e), reversed(self.factors)):
            i = i * m + r % m
        return i

    def add(self, i: int, j: int) -> int:
        return self.index(tuple(a + b for a, b in zip(self.element(i), self.element(j))))

    def neg(self, i: int) -> int:
        return self.index(tuple(-a for a in self.element(i)))

    def elements(self) -> range:
        return range(self.order)


def _check_nu(group: FiniteAbelianGroup, nu) -> tuple[Fraction, ...]:
    nu = tuple(Fraction(x) for x in nu)
    if len(nu) != group.order:
        raise MeasureError(f"nu has {len(nu)} entries, group order is {group.order}")
    if any(x < 0 for x in nu) or sum(nu) != 1:
        raise MeasureError("nu is not a probability vector")
    return nu


def check_nu_symmetry(group: FiniteAbelianGroup, nu) -> bool:
    """Do (g0, g1) -> (g0, g0+g1) and (g0, g1) -> (g0+g1, g0) agree in law?

    Here g0 is uniform on the group and g1 ~ nu, independently.
    """
    if group.order > 10**4:
        raise TooLargeError("group order above 10^4")
    nu = _check_nu(group, nu)
    w = Fraction(1, group.order)
    first: dict[tuple[int, int], Fraction] = {}
    second: dict[tuple[int, int], Fraction] = {}
    for g0 in group.elements():
        for g1, p in enumerate(nu):
            if not p:
                continue
            s = group.add(g0, g1)
            first[(g0, s)] = first.get((g0, s), 0) + w * p
            second[(s, g0)] = second.get((s, g0), 0) + w * p
    return first == second


@dataclass(frozen=True)
class WalkParams:
    group: FiniteAbelianGroup
    nu: tuple
    n: int

    def __post_init__(self):
        object.__setattr__(self, "nu", _check_nu(self.group, self.nu))


def random_walk_measure(params: WalkParams) -> ExactMeasure:
    """Exact law of v -> g_0 + sum_i v_i g_i on F_2^n, symbols = group indices."""
    group, nu, n = params.group, params.nu, params.n
    steps = [(g, p) for g, p in enumerate(nu) if p]
    if group.order * len(steps) ** n > MAX_WALK_SUPPORT:
        raise TooLargeError("random-walk support exceeds 10^6 outcomes")
    weights: dict[Config, Fraction] = {}
    w0 = Fraction(1, group.order)
    for incs in itertools.product(steps, repeat=n):
        p_inc = prod((p for _, p in incs), start=Fraction(1))
        gs = [g for g, _ in incs]
        for g0 in group.elements():
            vals = [g0] * (1 << n)
            for v in range(1, 1 << n):
                low = (v & -v).bit_length() - 1
                vals[v] = group.add(vals[v & (v - 1)], gs[low])
            c = Config(n, group.order, tuple(vals))
            weights[c] = weights.get(c, 0) + w0 * p_inc
    return ExactMeasure(n, group.order, weights)


# -- psi and the mixture experiment ------------------------------------------------


def psi_combine(eta: Config, w1: Config, w2: Config) -> Config:
    """Pointwise selection: w1 where eta is 0, w2 where eta is 1."""
    _same_dim(eta.n, w1.n)
    _same_dim(eta.n, w2.n)
    if eta.k != 2:
        raise ValueError("selector must be a binary config")
    if w1.k != w2.k:
        raise ValueError("w1 and w2 must share an alphabet")
    return Config(
        w1.n, w1.k, tuple(b if e else a for e, a, b in zip(eta.values, w1.values, w2.values))
    )


def pick_component(mu1: ExactMeasure, mu2: ExactMeasure) -> Config:
    """Representative of the heaviest orbit of mu1 x mu2 (smallest key on ties)."""
    dec = ergodic_decompose(product(mu1, mu2))
    return max(dec.terms, key=lambda t: (t[1], -t[0].key))[0]


def mixture_experiment(
    mu1: ExactMeasure, mu2: ExactMeasure, params: HyperplaneParams, face: Face
) -> dict:
    """Push hyperplane x (orbit component of mu1 x mu2) through psi.

    For every pattern a on ``face`` the report gives
    |psi_#(a) - mu1(a)/2 - mu2(a)/2| and checks it against 2 * eps with
    eps = 1 - (1 - p)^m, m the number of free coordinates of the face.
    """
    if mu1.n != mu2.n or mu1.k != mu2.k:
        raise MeasureError("mu1 and mu2 must live on the same space")
    if params.n != mu1.n or face.n != mu1.n:
        raise MeasureError("dimension mismatch between measures, params and face")
    if not (is_invariant(mu1) and is_invariant(mu2)):
        raise MeasureError("mixture inputs must be invariant")
    k = mu1.k
    comp = pick_component(mu1, mu2)
    lam = orbit_uniform(comp)
    mu0 = hyperplane_measure(params)
    if len(mu0) * len(lam) > MAX_MIXTURE_SUPPORT:
        raise TooLargeError("exact product support too large")
    acc: dict[Config, Fraction] = {}
    for eta, p in mu0.items():
        for pair, q in lam.items():
            w1, w2 = split_pair(pair, k)
            c = psi_combine(eta, w1, w2)
            acc[c] = acc.get(c, 0) + p * q
    out = ExactMeasure(mu1.n, k, acc)

    m = face.dim
    eps = 1 - (1 - params.p) ** m
    bound = 2 * eps
    got = marginal(out, face)
    m1 = marginal(mu1, face)
    m2 = marginal(mu2, face)
    patterns = set(got.support()) | set(m1.support()) | set(m2.support())
    devs = {a.key: abs(got[a] - m1[a] / 2 - m2[a] / 2) for a in patterns}
    max_dev = max(devs.values(), default=Fraction(0))
    # sup over arbitrary events on the face = total variation
    tv = sum(devs.values(), Fraction(0)) / 2
    invariant = is_invariant(out)
    return {
        "n": mu1.n,
        "k": k,
        "p": params.p,
        "face_free": face.free_coords,
        "face_base": face.base,
        "component_rep": comp.key,
        "indicators": k ** (1 << m),
        "eps": eps,
        "bound": bound,
        "max_deviation": max_dev,
        "tv_deviation": tv,
        "within_bound": max_dev <= bound and tv <= bound,
        "deviations": dict(sorted(devs.items())),
        "invariant": invariant,
        "decomposition": ergodic_decompose(out).weights() if invariant else None,
        "measure": out,
    }
