import itertools
import random
from fractions import Fraction as F

import numpy as np
import pytest
from scipy.optimize import linprog

from cubex import lp
from cubex.cube import Config, act_on_config, burnside_count, config_orbits, generators
from cubex.joinings import (
    build_joining_program,
    compose_joinings,
    dbar_distance,
    disagreement_mass,
    marginals,
    near_diagonal_decomposition,
    optimal_joining,
    solve_program,
)
from cubex.measures import MeasureError, cylinder_tv, delta, is_invariant, mix, orbit_uniform
from cubex.cube import Face

Z = Config.constant(2, 2, 0)
O = Config.constant(2, 2, 1)
D0, D1 = delta(Z), delta(O)
HALF = mix([(F(1, 2), D0), (F(1, 2), D1)])
EXTREME = [orbit_uniform(Config.from_key(2, 2, r)) for r in config_orbits(2, 2).reps]


def scipy_dbar(mu, nu, v=0):
    """Unreduced LP over every pair config, with explicit invariance rows."""
    n, k = mu.n, mu.k
    size = (k * k) ** (1 << n)
    pairs = [Config.from_key(n, k * k, i) for i in range(size)]
    rows, rhs = [], []
    for side, meas in ((0, mu), (1, nu)):
        for key in range(k ** (1 << n)):
            c = Config.from_key(n, k, key)
            row = np.zeros(size)
            for j, pc in enumerate(pairs):
                part = tuple((s // k) if side == 0 else (s % k) for s in pc.values)
                if part == c.values:
                    row[j] = 1
            rows.append(row)
            rhs.append(float(meas[c]))
    for g in generators(n):
        for j, pc in enumerate(pairs):
            jj = act_on_config(g, pc).key
            if jj != j:
                row = np.zeros(size)
                row[j], row[jj] = 1, -1
                rows.append(row)
                rhs.append(0.0)
    cost = [float(pc.values[v] // k != pc.values[v] % k) for pc in pairs]
    res = linprog(cost, A_eq=np.array(rows), b_eq=rhs, bounds=(0, None), method="highs")
    assert res.status == 0
    return res.fun


def test_lp_basic():
    # min -x - y  s.t. x + y + s = 4, x + 3y + t = 6
    res = lp.solve([-1, -1, 0, 0], [[1, 1, 1, 0], [1, 3, 0, 1]], [4, 6])
    assert res.status == "optimal" and res.value == -4
    assert lp.solve([1], [[1], [1]], [1, 2]).status == "infeasible"
    assert lp.solve([-1, 0], [[1, -1]], [0]).status == "unbounded"


def test_lp_against_scipy():
    rng = random.Random(3)
    for _ in range(40):
        m, n = rng.randint(1, 4), rng.randint(2, 6)
        A = [[rng.randint(-3, 3) for _ in range(n)] for _ in range(m)]
        x0 = [rng.randint(0, 3) for _ in range(n)]
        b = [sum(a * x for a, x in zip(row, x0)) for row in A]
        c = [rng.randint(-2, 5) for _ in range(n)]
        ours = lp.solve(c, A, b)
        ref = linprog(c, A_eq=A, b_eq=b, bounds=(0, None), method="highs")
        if ref.status == 3:
            assert ours.status == "unbounded"
            continue
        assert ours.status == "optimal"
        assert abs(float(ours.value) - ref.fun) < 1e-7
        assert all(sum(a * x for a, x in zip(row, ours.x)) == bb for row, bb in zip(A, b))


def test_program_examples():
    p = build_joining_program(D0, D0)
    sol = solve_program(p)
    assert sol.value == 0
    assert dbar_distance(D0, D1) == 1
    assert len(build_joining_program(D0, D1).orbits) == 1


def test_full_program_orbit_count():
    p = build_joining_program(D0, D1, mode="full")
    assert len(p.orbits) == burnside_count(2, 4) == 55
    assert p.column_sums_ok()


def test_dbar_examples():
    assert dbar_distance(D0, D1) == 1
    assert dbar_distance(D0, HALF) == F(1, 2)
    for mu in EXTREME:
        assert dbar_distance(mu, mu) == 0


def test_optimal_joining_is_a_joining():
    sol = optimal_joining(D0, HALF)
    lam = sol.joining
    a, b = marginals(lam, 2)
    assert a == D0 and b == HALF
    assert is_invariant(lam)
    assert disagreement_mass(lam, 2) == sol.value


def test_rejects_noninvariant():
    with pytest.raises(MeasureError):
        dbar_distance(delta(Config(2, 2, (0, 1, 0, 0))), D0)


def test_symmetry_and_identity():
    for mu, nu in itertools.product(EXTREME, repeat=2):
        d = dbar_distance(mu, nu)
        assert d == dbar_distance(nu, mu)
        assert (d == 0) == (mu == nu)


def test_triangle_via_composition():
    sols = {}
    for i, j in itertools.product(range(len(EXTREME)), repeat=2):
        sols[i, j] = optimal_joining(EXTREME[i], EXTREME[j])
    for i, j, l in itertools.product(range(len(EXTREME)), repeat=3):
        glued = compose_joinings(sols[i, j].joining, sols[j, l].joining, 2)
        a, b = marginals(glued, 2)
        assert a == EXTREME[i] and b == EXTREME[l]
        assert is_invariant(glued)
        upper = disagreement_mass(glued, 2)
        assert upper <= sols[i, j].value + sols[j, l].value
        assert sols[i, l].value <= upper


def test_vertex_independence():
    for mu, nu in [(D0, HALF), (EXTREME[2], EXTREME[4]), (HALF, EXTREME[3])]:
        vals = {optimal_joining(mu, nu, v).value for v in range(4)}
        assert len(vals) == 1


def test_permuted_columns_same_value():
    rng = random.Random(5)
    for mu, nu in [(EXTREME[1], EXTREME[4]), (HALF, EXTREME[2])]:
        p = build_joining_program(mu, nu)
        base = solve_program(p).value
        for _ in range(5):
            order = list(range(len(p.orbits)))
            rng.shuffle(order)
            assert solve_program(p, order).value == base


def test_dbar_dominates_vertex_tv():
    v0 = Face(2, 0, 0)
    for mu, nu in itertools.product(EXTREME + [HALF], repeat=2):
        assert dbar_distance(mu, nu) >= cylinder_tv(mu, nu, v0)


@pytest.mark.parametrize("i,j", [(0, 5), (1, 3), (2, 4), (3, 3)])
def test_against_unreduced_scipy(i, j):
    ours = dbar_distance(EXTREME[i], EXTREME[j])
    assert abs(float(ours) - scipy_dbar(EXTREME[i], EXTREME[j])) < 1e-8


def test_sparse_equals_full():
    for mu, nu in [(HALF, EXTREME[2]), (EXTREME[1], EXTREME[4])]:
        a = optimal_joining(mu, nu, mode="sparse").value
        b = optimal_joining(mu, nu, mode="full").value
        assert a == b


def test_near_diagonal_examples():
    diag = delta(Config.constant(2, 4, 0))
    rep = near_diagonal_decomposition(diag, 2)
    assert len(rep.terms) == 1 and rep.terms[0][2] == 0
    two = mix([(F(1, 2), diag), (F(1, 2), delta(Config.constant(2, 4, 3)))])
    rep = near_diagonal_decomposition(two, 2)
    assert len(rep.terms) == 2 and all(s == 0 for _, _, s in rep.terms)
    lam = optimal_joining(D0, HALF).joining
    rep = near_diagonal_decomposition(lam, 2)
    assert rep.identity_holds and rep.weighted_sum == F(1, 2)
