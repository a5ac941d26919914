import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from groupoid_limits import region as rg
from groupoid_limits.covers import CoverError, OmegaPoint, example_A, example_B, example_C, last_difference, w_closure, w_region
from groupoid_limits.finite_level import NotComposable, in_GN, in_GN_check
from groupoid_limits.limit import (
    BasicSet,
    LimitArrow,
    basic_range,
    basic_range_is_open,
    compose_limit,
    factor_through_closure,
    format_arrow,
    g_unit_neighborhood,
    in_closure_G_infinity,
    in_G,
    in_G_check_infinity,
    in_G_infinity,
    in_TR,
    in_Xn,
    in_Yn,
    parse_arrow,
    project,
    script_local_compactness_failure,
    witness_level,
)
from groupoid_limits.sampling import random_arrow, random_omega_point, sample_G

A, B, C = example_A(), example_B(), example_C()
P = parse_arrow

g = P("(|0, 0, |0)")
x = P("(0|2, 0, |2)")
y = P("(|2, 0, 1|2)")
z = P("(0|2, 0, 1|2)")


def test_parse_and_format_round_trip():
    for text in ["(|0, 0, |0)", "(0|2, -1/2, 1|2)", "(0 1|2 1, 3/4, |1)"]:
        a = P(text)
        assert P(format_arrow(a)) == a
    assert z.alpha == OmegaPoint((0,), (2,))
    assert P("(2|2, 1/2, |2 2)").alpha == OmegaPoint.constant(2)


@pytest.mark.parametrize("bad", ["", "(|0, 0)", "|0, 0, |0", "(|0, x, |0)", "(0, 0, 0)"])
def test_parse_errors(bad):
    with pytest.raises((CoverError, ValueError)):
        P(bad)


def test_tail_relation():
    assert in_TR(A, x)
    assert not in_TR(A, P("(|0, 0, |1)"))
    assert in_TR(A, P("(1 0|1, 1/3, 1 0|1)"))
    assert not in_TR(A, P("(|0, 2, |0)"))


def test_x_and_y_levels():
    assert in_Xn(A, g, 0)
    assert in_Xn(A, z, 0) and in_Yn(A, z, 0)
    assert not in_Xn(A, P("(|0, 0, |1)"), 5)
    w = P("(0 0 1|2, 0, |2)")
    assert [in_Xn(A, w, n) for n in range(4)] == [False, False, True, True]


def test_G_infinity_examples():
    assert not in_G_infinity(A, g)
    assert in_G_infinity(A, P("(|0, -1/2, |0)"))
    assert in_G_infinity(C, P("(|0, 1/2, |0)"))
    assert in_G_infinity(A, P("(|2, 0, |2)"))


def test_closure_examples():
    assert in_closure_G_infinity(A, g)
    assert not in_closure_G_infinity(A, z)
    assert in_closure_G_infinity(A, x) and in_closure_G_infinity(A, y)


def test_closure_groupoid_examples():
    assert in_G_check_infinity(A, z)
    assert not in_G_check_infinity(A, P("(|0, 1, |0)"))
    assert in_G_check_infinity(A, P("(|0, 0, |0)"))


def test_G_examples():
    assert in_G(A, g) == (False, None)
    assert in_G(A, P("(|2, 0, |2)")) == (True, 0)
    assert in_G(A, P("(1 1|2, 1/2, 2 1|2)")) == (True, 0)
    assert in_G(A, P("(2 1|2, 1/2, 1 2|2)")) == (True, 1)
    assert in_G(A, P("(0 2|2, -1/2, 1 2|2)")) == (False, None)


def test_composition_and_inverse():
    assert compose_limit(x, y) == z
    assert z.inverse() == P("(1|2, 0, 0|2)")
    assert compose_limit(z, z.inverse()) == z.range()
    with pytest.raises(NotComposable):
        compose_limit(y, x)
    with pytest.raises(NotComposable):
        compose_limit(x, P("(|2, 1/2, |2)"))


def test_projection():
    a = project(z, 2)
    assert a.alpha == (0, 2, 2) and a.beta == (1, 2, 2) and a.t == 0
    assert not in_GN(A, project(z, 0))
    assert in_GN_check(A, project(z, 0))
    with pytest.raises(CoverError):
        project(z, -1)


def test_factorization_example():
    left, right = factor_through_closure(A, z)
    gamma = OmegaPoint.constant(2)
    assert left == LimitArrow(z.alpha, 0, gamma)
    assert right == LimitArrow(gamma, 0, z.beta)
    assert compose_limit(left, right) == z
    with pytest.raises(CoverError):
        factor_through_closure(A, P("(|0, 1, |0)"))


def test_units_of_the_closure_groupoid_lie_in_the_closure():
    # for units both conditions reduce to t in the closure of W
    for u in [g, P("(0|1, 0, 0|1)"), P("(2 0|2, -1/2, 2 0|2)")]:
        assert in_G_check_infinity(A, u) == in_closure_G_infinity(A, u)
    left, right = factor_through_closure(A, g)
    assert compose_limit(left, right) == g
    assert in_closure_G_infinity(A, left) and in_closure_G_infinity(A, right)


def test_basic_range_not_open():
    U = rg.region(B.space, ("1/4", "3/4", False, False))
    bs = BasicSet(0, (0,), (1,), U)
    r = basic_range(B, bs)
    assert r.region == rg.region(B.space, ("1/2", "3/4", True, False))
    assert r.fiber == B.space.whole()
    assert not basic_range_is_open(B, bs)


def test_basic_range_diagonal_and_example_A():
    U = rg.region(B.space, ("1/4", "3/4", False, False))
    assert basic_range_is_open(B, BasicSet(0, (0,), (0,), U))
    V = rg.region(A.space, ("-1/2", "1/2", False, False))
    assert basic_range_is_open(A, BasicSet(0, (2,), (2,), V))


def test_basic_set_errors():
    U = rg.region(B.space, ("1/4", "3/4", True, False))
    with pytest.raises(CoverError):
        basic_range(B, BasicSet(0, (0,), (1,), U))
    with pytest.raises(CoverError):
        BasicSet(1, (0,), (1,), B.space.whole())
    tiny = rg.region(B.space, ("1/8", "1/4", False, False))
    with pytest.raises(CoverError):
        basic_range(B, BasicSet(0, (0,), (1,), tiny))


def test_basic_set_membership():
    U = rg.region(B.space, ("1/4", "3/4", False, False))
    bs = BasicSet(0, (0,), (1,), U)
    assert bs.contains(B, P("(0|0, 5/8, 1|0)"))
    assert not bs.contains(B, P("(0|0, 3/8, 1|0)"))
    assert not bs.contains(B, P("(0|0, 5/8, 0|0)"))


def test_local_compactness_script():
    report = script_local_compactness_failure(C)
    assert report["sequence"]["3"] is True
    assert report["all_in_G_infinity"]
    assert report["limit_in_G_check_infinity"] and not report["limit_in_G_infinity"]
    assert report["constant_zero_in_G_infinity"]
    assert report["ok"]
    with pytest.raises(CoverError):
        script_local_compactness_failure(A)


def brute_in_G_infinity(seq, a, levels=12):
    return all(
        rg.contains(w_region(seq, a.alpha.truncate(N)), a.t) and rg.contains(w_region(seq, a.beta.truncate(N)), a.t)
        for N in range(levels)
    )


def brute_in_G_check(seq, a, levels=12):
    return all(
        rg.contains(w_closure(seq, a.alpha.truncate(N)), a.t) and rg.contains(w_closure(seq, a.beta.truncate(N)), a.t)
        for N in range(levels)
    )


def brute_in_G(seq, a, levels=12):
    d = last_difference(a.alpha, a.beta)
    if d is None or not brute_in_G_check(seq, a, levels):
        return False
    return any(in_GN(seq, project(a, n)) for n in range(max(d, 0), levels))


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([A, B, C]))
def test_predicates_agree_with_long_truncations(seed, seq):
    a = random_arrow(seq, np.random.default_rng(seed))
    if not in_TR(seq, a):
        return
    assert in_G_infinity(seq, a) == brute_in_G_infinity(seq, a)
    assert in_G_check_infinity(seq, a) == brute_in_G_check(seq, a)
    assert in_G(seq, a)[0] == brute_in_G(seq, a)


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([A, B, C]))
def test_lattice_and_witness(seed, seq):
    a = random_arrow(seq, np.random.default_rng(seed))
    ginf, clos, chk = in_G_infinity(seq, a), in_closure_G_infinity(seq, a), in_G_check_infinity(seq, a)
    ing = in_G(seq, a)[0]
    assert not ginf or clos
    assert not clos or chk
    assert not ginf or ing
    assert not ing or chk
    ys = [in_Yn(seq, a, n) for n in range(6)]
    assert ys == sorted(ys)
    if chk:
        n = witness_level(seq, a)
        assert in_Yn(seq, a, n) and (n == 0 or not in_Yn(seq, a, n - 1))
    assert in_G(seq, a)[0] == in_G(seq, a.inverse())[0]


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([A, B, C]))
def test_factorization_property(seed, seq):
    rng = np.random.default_rng(seed)
    a = random_arrow(seq, rng)
    if not in_G_check_infinity(seq, a):
        return
    left, right = factor_through_closure(seq, a)
    assert compose_limit(left, right) == a
    assert in_closure_G_infinity(seq, left) and in_closure_G_infinity(seq, right)


def test_G_units_have_neighbourhoods_in_G():
    rng = np.random.default_rng(3)
    for seq in (A, B, C):
        for a in sample_G(seq, rng, 30):
            u = a.range()
            nb = g_unit_neighborhood(seq, u)
            assert nb.contains(seq, u)
            for t in rg.sample_points(nb.U):
                alpha = random_omega_point(seq, rng, t, 1.0).replace_prefix(nb.alpha)
                v = LimitArrow(alpha, t, alpha)
                if nb.contains(seq, v):
                    assert in_G(seq, v)[0]
    with pytest.raises(CoverError):
        g_unit_neighborhood(A, g)
    with pytest.raises(CoverError):
        g_unit_neighborhood(A, x)
