import itertools
import random
from fractions import Fraction as F

import pytest

from cubex.boolfn import BoolFn, degree, omega_member
from cubex.constructions import (
    FiniteAbelianGroup,
    HyperplaneParams,
    WalkParams,
    check_nu_symmetry,
    constant_pattern_mass,
    hyperplane_measure,
    marginal_allzero_prob,
    mixture_experiment,
    psi_combine,
    random_walk_measure,
)
from cubex.cube import Config, Face, act_on_config, enumerate_group
from cubex.measures import delta, ergodic_decompose, is_invariant, marginal, mix

P_GRID = [F(1, 8), F(1, 3), F(1, 2), F(5, 7)]


def test_hyperplane_examples():
    mu = hyperplane_measure(HyperplaneParams(3, F(1, 8)))
    assert mu[Config.constant(3, 2, 0)] == F(343, 1024)
    assert sum(p for _, p in mu.items()) == 1
    assert len(mu) == 16
    assert is_invariant(hyperplane_measure(HyperplaneParams(4, F(1, 8))))


def test_hyperplane_bad_p():
    for p in (F(0), F(1), F(3, 2)):
        with pytest.raises(ValueError):
            HyperplaneParams(3, p)


def test_hyperplane_support_has_degree_le_1():
    mu = hyperplane_measure(HyperplaneParams(4, F(1, 3)))
    for c, _ in mu.items():
        g = BoolFn(4, c.key)
        assert degree(g) <= 1
        assert omega_member(g, 2)


def brute_allzero(n, p, N):
    # independent enumeration over (z, eta)
    tot = F(0)
    for z in range(1 << n):
        w = F(1, 2) * p ** bin(z).count("1") * (1 - p) ** (n - bin(z).count("1"))
        if z & ((1 << N) - 1) == 0:
            tot += w  # eta = 0 and <x,z> = 0 on the first N coordinates
    return tot


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
@pytest.mark.parametrize("p", P_GRID)
def test_allzero_closed_form(n, p):
    params = HyperplaneParams(n, p)
    mu = hyperplane_measure(params) if n <= 5 else None
    for N in range(n + 1):
        closed = marginal_allzero_prob(params, N)
        assert closed == brute_allzero(n, p, N) == (1 - p) ** N / 2
        if mu is not None:
            assert constant_pattern_mass(mu, N, 0) == closed == constant_pattern_mass(mu, N, 1)


def test_allzero_examples():
    params = HyperplaneParams(4, F(1, 8))
    assert marginal_allzero_prob(params, 0) == F(1, 2)
    assert marginal_allzero_prob(params, 3) == F(343, 1024)
    with pytest.raises(ValueError):
        marginal_allzero_prob(params, 5)


def test_group_axioms():
    g = FiniteAbelianGroup((2, 3))
    els = list(g.elements())
    assert len(els) == 6
    for a, b, c in itertools.product(els, repeat=3):
        assert g.add(g.add(a, b), c) == g.add(a, g.add(b, c))
        assert g.add(a, b) == g.add(b, a)
    for a in els:
        assert g.add(a, 0) == a and g.add(a, g.neg(a)) == 0


def nu_grid(order):
    vals = [F(0), F(1, 4), F(1, 2), F(3, 4), F(1)]
    out = []
    for v in itertools.product(vals, repeat=order):
        if sum(v) == 1:
            out.append(v)
    return out


def brute_symmetric(group, nu):
    # law of (x, x + s) vs (x + s, x) with x uniform and s ~ nu
    a, b = {}, {}
    for x in group.elements():
        for s, w in enumerate(nu):
            y = group.add(x, s)
            a[(x, y)] = a.get((x, y), 0) + w
            b[(y, x)] = b.get((y, x), 0) + w
    clean = lambda d: {k: v for k, v in d.items() if v}
    return clean(a) == clean(b)


def test_nu_examples():
    z2, z4 = FiniteAbelianGroup((2,)), FiniteAbelianGroup((4,))
    for p in (F(0), F(1, 4), F(1, 2), F(3, 4), F(1)):
        assert check_nu_symmetry(z2, (1 - p, p))
    assert not check_nu_symmetry(z4, (0, 1, 0, 0))
    assert check_nu_symmetry(z4, (0, F(1, 2), 0, F(1, 2)))
    with pytest.raises(ValueError):
        check_nu_symmetry(z4, (F(1, 2), 0, 0, 0))


@pytest.mark.parametrize("factors", [(2,), (3,), (4,), (2, 2)])
def test_walk_invariance_iff_symmetry(factors):
    group = FiniteAbelianGroup(factors)
    grid = nu_grid(group.order)
    for nu in grid:
        sym = check_nu_symmetry(group, nu)
        assert sym == brute_symmetric(group, nu)
        mu = random_walk_measure(WalkParams(group, nu, 2))
        assert is_invariant(mu) == sym


def test_walk_examples():
    z4 = FiniteAbelianGroup((4,))
    mu = random_walk_measure(WalkParams(z4, (1, 0, 0, 0), 2))
    dec = ergodic_decompose(mu)
    assert [w for _, w in dec.terms] == [F(1, 4)] * 4
    assert all(len(set(c.values)) == 1 for c, _ in dec.terms)
    mu = random_walk_measure(WalkParams(z4, (0, F(1, 2), 0, F(1, 2)), 2))
    assert is_invariant(mu)
    z2 = FiniteAbelianGroup((2,))
    mu = random_walk_measure(WalkParams(z2, (F(2, 3), F(1, 3)), 3))
    assert marginal(mu, Face(3, 0, 0)) == mix(
        [(F(1, 2), delta(Config.constant(0, 2, 0))), (F(1, 2), delta(Config.constant(0, 2, 1)))]
    )


def test_psi_examples():
    w1, w2 = Config(1, 3, (2, 2)), Config(1, 3, (1, 1))
    assert psi_combine(Config.constant(1, 2, 0), w1, w2) == w1
    assert psi_combine(Config.constant(1, 2, 1), w1, w2) == w2
    assert psi_combine(Config(1, 2, (0, 1)), w1, w2).values == (2, 1)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_psi_equivariant(n):
    rng = random.Random(n)
    group = enumerate_group(n)
    for _ in range(100):
        g = rng.choice(group)
        eta = Config.from_key(n, 2, rng.randrange(2 ** (1 << n)))
        w1 = Config.from_key(n, 3, rng.randrange(3 ** (1 << n)))
        w2 = Config.from_key(n, 3, rng.randrange(3 ** (1 << n)))
        lhs = psi_combine(act_on_config(g, eta), act_on_config(g, w1), act_on_config(g, w2))
        assert lhs == act_on_config(g, psi_combine(eta, w1, w2))


def test_mixture_same_measure_zero_deviation():
    d0 = delta(Config.constant(3, 2, 0))
    rep = mixture_experiment(d0, d0, HyperplaneParams(3, F(1, 16)), Face.from_coords(3, [1, 2, 3]))
    assert rep["max_deviation"] == 0


@pytest.mark.parametrize("p", [F(1, 16), F(1, 4), F(1, 2)])
def test_mixture_within_bound(p):
    d0, d1 = delta(Config.constant(3, 2, 0)), delta(Config.constant(3, 2, 1))
    rep = mixture_experiment(d0, d1, HyperplaneParams(3, p), Face.from_coords(3, [1, 2, 3]))
    assert rep["within_bound"] and rep["invariant"]
    assert rep["bound"] == 2 * (1 - (1 - p) ** 3)
    assert rep["indicators"] == 256


def test_mixture_rejects_noninvariant():
    e1 = delta(Config(2, 2, (0, 1, 0, 0)))
    with pytest.raises(ValueError):
        mixture_experiment(e1, e1, HyperplaneParams(2, F(1, 2)), Face.from_coords(2, [1]))
