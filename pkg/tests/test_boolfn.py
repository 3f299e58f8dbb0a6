import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cubex.boolfn import (
    AnfCoeffs,
    BoolFn,
    anf_degree,
    degree,
    face_sum,
    mobius_forward,
    mobius_inverse,
    omega_member,
    restrict,
    rm_distance,
    verify_omega_threshold,
)
from cubex.cube import Config, Face, act_on_config, enumerate_faces, enumerate_group, Isometry


def naive_forward(u: AnfCoeffs) -> BoolFn:
    # g(v) = xor of u_a over a subset of supp(v)
    vals = [0] * (1 << u.n)
    for v in range(1 << u.n):
        vals[v] = sum(u.coeffs >> a & 1 for a in range(1 << u.n) if a & v == a) & 1
    return BoolFn.from_values(vals)


def naive_degree(g: BoolFn) -> int:
    u = naive_forward(AnfCoeffs(g.n, g.table))  # involution
    return max((bin(a).count("1") for a in range(1 << g.n) if u.table >> a & 1), default=-1)


def as_config(g: BoolFn) -> Config:
    return Config.from_key(g.n, 2, g.table)


def test_forward_examples():
    assert mobius_forward(AnfCoeffs(2, 0b1)).table == 0b1111
    assert mobius_forward(AnfCoeffs(2, 0b10)).values() == [0, 1, 0, 1]
    assert mobius_forward(AnfCoeffs(2, 0b1000)).values() == [0, 0, 0, 1]


def test_inverse_examples():
    assert mobius_inverse(BoolFn(3, 0)).coeffs == 0
    xor = BoolFn.from_values([0, 1, 1, 0])
    assert mobius_inverse(xor).support() == [(1,), (2,)]


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_forward_matches_naive(n):
    for t in range(1 << (1 << n)) if n < 4 else random.Random(1).sample(range(1 << 16), 500):
        assert mobius_forward(AnfCoeffs(n, t)) == naive_forward(AnfCoeffs(n, t))


@settings(max_examples=200)
@given(st.integers(1, 16).flatmap(lambda n: st.tuples(st.just(n), st.integers(0, (1 << (1 << n)) - 1))))
def test_involution(nt):
    n, t = nt
    g = BoolFn(n, t)
    assert mobius_forward(mobius_inverse(g)) == g
    u = AnfCoeffs(n, t)
    assert mobius_inverse(mobius_forward(u)) == u


def test_roundtrip_n10_random():
    rng = random.Random(10)
    for _ in range(10_000):
        g = BoolFn(10, rng.getrandbits(1024))
        assert mobius_forward(mobius_inverse(g)) == g


def test_degree_examples():
    assert degree(BoolFn(3, 0xFF)) == 0
    assert degree(BoolFn.monomial(4, (1, 2, 3))) == 3
    assert degree(BoolFn(3, 0)) == -1
    assert anf_degree(AnfCoeffs(3, 0)) == -1


def test_degree_matches_naive_n3():
    for t in range(256):
        assert degree(BoolFn(3, t)) == naive_degree(BoolFn(3, t))


def test_degree_isometry_invariant_n3():
    group = enumerate_group(3)
    for t in range(256):
        g = BoolFn(3, t)
        d = degree(g)
        for h in group:
            assert degree(BoolFn(3, act_on_config(h, as_config(g)).key)) == d


@settings(max_examples=100)
@given(st.integers(0, (1 << 256) - 1), st.permutations(range(1, 9)), st.integers(0, 255))
def test_degree_isometry_invariant_n8(t, perm, trans):
    g = BoolFn(8, t)
    h = Isometry(8, tuple(perm), trans)
    assert degree(BoolFn(8, act_on_config(h, as_config(g)).key)) == degree(g)


def test_face_sum_examples():
    assert face_sum(BoolFn(2, 0b1111), Face.from_coords(2, [1])) == 0
    assert face_sum(BoolFn.monomial(2, (1,)), Face.from_coords(2, [1])) == 1
    assert face_sum(BoolFn.monomial(2, (1, 2)), Face.from_coords(2, [1, 2])) == 1


def test_omega_examples():
    for r in range(1, 4):
        assert omega_member(BoolFn(3, 0), r)
        assert omega_member(BoolFn(3, 0xFF), r)
    assert not omega_member(BoolFn.monomial(2, (1, 2)), 2)
    with pytest.raises(ValueError):
        omega_member(BoolFn(2, 0), 3)


def test_constant_one_in_omega_1():
    # a 1-face sum of the constant 1 is 0, so constants are members for every r >= 1
    assert omega_member(BoolFn(3, 0xFF), 1)


def omega_naive(g, r):
    return all(sum(g(x) for x in f.points()) % 2 == 0 for f in enumerate_faces(g.n, r))


def test_omega_threshold_exhaustive_n3():
    for t in range(256):
        g = BoolFn(3, t)
        for r in range(1, 4):
            m = omega_naive(g, r)
            assert omega_member(g, r) == m == (degree(g) <= r - 1)


def test_omega_monotone_n3():
    for t in range(256):
        g = BoolFn(3, t)
        flags = [omega_member(g, r) for r in range(1, 4)]
        assert flags == sorted(flags)


def test_verify_threshold_report():
    rep = verify_omega_threshold(3)
    assert rep["verified_threshold"] == "r-1"
    assert all(row["mismatch_deg_le_r_minus_1"] == 0 for row in rep["rows"])
    assert all(row["mismatch_deg_le_r"] > 0 for row in rep["rows"])


def test_rm_distance_examples():
    assert rm_distance(BoolFn.monomial(3, (1, 2, 3)), 2) == 1
    assert rm_distance(BoolFn.monomial(5, (1, 2, 3)), 2) == 4
    assert rm_distance(BoolFn.monomial(4, (1, 2)), 2) == 0


def test_rm_distance_zero_iff_degree():
    for t in range(256):
        g = BoolFn(3, t)
        for r in range(0, 4):
            assert (rm_distance(g, r) == 0) == (degree(g) <= r)


def test_rm_distance_brute_oracle_n3():
    # independent oracle: scan every function of degree <= 1
    low = [BoolFn(3, t) for t in range(256) if degree(BoolFn(3, t)) <= 1]
    for t in range(0, 256, 7):
        g = BoolFn(3, t)
        assert rm_distance(g, 1) == min(bin(g.table ^ h.table).count("1") for h in low)


@pytest.mark.parametrize("n,r", [(3, 0), (4, 1), (5, 1), (5, 2), (4, 2)])
def test_monomial_distance(n, r):
    g = BoolFn.monomial(n, tuple(range(1, r + 2)))
    assert rm_distance(g, r) == 1 << (n - r - 1)


def test_rm_too_large():
    with pytest.raises(ValueError):
        rm_distance(BoolFn(8, 0), 3)


def test_restriction_cannot_raise_degree_n4():
    rng = random.Random(4)
    faces = [f for r in range(1, 5) for f in enumerate_faces(4, r)]
    for t in rng.sample(range(1 << 16), 300):
        g = BoolFn(4, t)
        d = degree(g)
        for f in faces:
            assert degree(restrict(g, f)) <= d


def test_restrict_chart():
    g = BoolFn.monomial(3, (1, 3))
    h = restrict(g, Face.from_coords(3, [1, 3], base=0b010))
    assert h.n == 2 and h == BoolFn.monomial(2, (1, 2))
    with pytest.raises(ValueError):
        restrict(g, Face(3, 0, 0))


def test_hex_roundtrip():
    g = BoolFn(5, 0x8000_0001)
    assert g.to_hex() == "80000001"
    assert BoolFn.from_hex(5, g.to_hex()) == g
    assert BoolFn(1, 2).to_hex() == "2"
