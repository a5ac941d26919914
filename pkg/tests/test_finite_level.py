from fractions import Fraction
from itertools import product

import pytest

from groupoid_limits.covers import CoverError, chambers, example_A, example_B, nonempty_multi_indices, uhf
from groupoid_limits.finite_level import (
    ArrowN,
    NotComposable,
    compose,
    composable,
    groupoid_report,
    in_GN,
    in_GN_check,
    lift,
    project_nm,
)

A, B = example_A(), example_B()
h = Fraction(-1, 2)


def test_in_GN_examples():
    assert in_GN(A, ArrowN((0,), h, (2,)))
    assert not in_GN(A, ArrowN((0,), 0, (0,)))
    assert in_GN(A, ArrowN((1,), Fraction(1, 3), (1,)))


def test_in_GN_check_examples():
    assert in_GN_check(A, ArrowN((0,), 0, (1,)))
    assert not in_GN_check(A, ArrowN((0,), 1, (0,)))
    with pytest.raises(CoverError):
        in_GN(A, ArrowN((4,), 0, (0,)))


def test_every_GN_arrow_is_a_closure_arrow():
    for n in range(3):
        for c in chambers(A, n):
            for a, b in product(c.closure_signature, repeat=2):
                x = ArrowN(a, c.sample, b)
                assert in_GN(A, x) == (a in c.open_signature and b in c.open_signature)
                assert in_GN_check(A, x)


def test_compose_examples():
    assert compose(ArrowN((0,), h, (2,)), ArrowN((2,), h, (0,))) == ArrowN((0,), h, (0,))
    with pytest.raises(NotComposable):
        compose(ArrowN((0,), h, (2,)), ArrowN((2,), 0, (0,)))
    z = compose(ArrowN((0,), 0, (2,)), ArrowN((2,), 0, (1,)))
    assert z == ArrowN((0,), 0, (1,))
    assert in_GN_check(A, z) and not in_GN(A, z)


def test_projection():
    assert project_nm(ArrowN((0, 2), 0, (1, 2)), 0) == ArrowN((0,), 0, (1,))
    x = ArrowN((0, 2, 1), 0, (1, 2, 2))
    assert project_nm(x, 2) == x
    assert project_nm(project_nm(x, 1), 0) == project_nm(x, 0)
    with pytest.raises(CoverError):
        project_nm(ArrowN((0,), 0, (1,)), 1)


def test_projection_respects_products_and_closures():
    for c in chambers(A, 2):
        sig = c.closure_signature
        for a, b, d in list(product(sig, repeat=3))[:200]:
            x, y = ArrowN(a, c.sample, b), ArrowN(b, c.sample, d)
            px, py = project_nm(x, 1), project_nm(y, 1)
            assert composable(px, py)
            assert project_nm(compose(x, y), 1) == compose(px, py)
            assert in_GN_check(A, px)


@pytest.mark.parametrize("seq", [A, B], ids=["A", "B"])
def test_projection_is_onto_closure_arrows(seq):
    for n in range(2):
        for c in chambers(seq, n):
            for a, b in product(c.closure_signature, repeat=2):
                x = ArrowN(a, c.sample, b)
                y = lift(seq, x, n + 2)
                assert project_nm(y, n) == x
                assert in_GN_check(seq, y)


def test_groupoid_reports():
    r = groupoid_report(A, 0)
    assert (len(r.chambers), r.open_fiber_sizes, r.closure_fiber_sizes) == (3, [2, 1, 2], [2, 3, 2])
    assert r.axioms_ok
    r = groupoid_report(B, 0)
    assert r.open_fiber_sizes == [1, 1, 2]
    r = groupoid_report(uhf((2,)), 1)
    assert r.open_fiber_sizes == [4] and r.axioms_ok
    assert r.as_dict()["chamber_count"] == 1


def test_pair_groupoid_axioms_by_exhaustion():
    for c in chambers(A, 1):
        sig = c.open_signature
        arrows = {(a, b): ArrowN(a, c.sample, b) for a, b in product(sig, repeat=2)}
        for (a, b), x in arrows.items():
            assert compose(x, x.inverse()) == x.range()
            for d in sig:
                y = arrows[b, d]
                assert compose(x, y) == arrows[a, d]
                for e in sig:
                    z = arrows[d, e]
                    assert compose(compose(x, y), z) == compose(x, compose(y, z))


def test_nonempty_indices_match_w_regions():
    from groupoid_limits.covers import iter_multi_indices, w_region

    full = [a for a in iter_multi_indices(A, 2) if not w_region(A, a).is_empty()]
    assert sorted(full) == sorted(nonempty_multi_indices(A, 2))
