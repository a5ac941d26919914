from itertools import product as iproduct

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from groupoid_limits import cocycles as cc
from groupoid_limits import convolution as cv
from groupoid_limits.convolution import AlgebraElement, AlgebraError
from groupoid_limits.covers import example_A, example_B, uhf
from groupoid_limits.finite_level import ArrowN, compose, in_GN, level_view

A, B = example_A(), example_B()


def brute_convolve(f, g, sigma):
    """Sum over middle indices using arrows and cocycle_value, not the chamber tables."""
    out = []
    for i, ch in enumerate(f.view.chambers):
        sig = ch.signature(f.domain)
        t = ch.sample
        block = np.zeros((len(sig), len(sig)), dtype=complex)
        for r, a in enumerate(sig):
            for c, e in enumerate(sig):
                total = 0j
                for b in sig:
                    x, y = ArrowN(a, t, b), ArrowN(b, t, e)
                    assert compose(x, y) == ArrowN(a, t, e)
                    total += f.entry(i, a, b) * g.entry(i, b, e) * cc.cocycle_value(sigma, x, y)
                block[r, c] = total
        out.append(block)
    return out


def brute_point_mass_norm(f, sigma):
    best = 0.0
    for i, ch in enumerate(f.view.chambers):
        sig = ch.signature(f.domain)
        t = ch.sample
        for g in sig:
            T = np.array([[f.entry(i, a, b) * cc.cocycle_value(sigma, ArrowN(a, t, b), ArrowN(b, t, g)) for b in sig] for a in sig])
            if T.size:
                best = max(best, np.linalg.svd(T, compute_uv=False)[0])
    return best


def single_block(matrix):
    view = level_view(uhf((len(matrix),)), 0)
    return AlgebraElement(view, "open", [np.array(matrix, dtype=complex)]), cc.trivial(view)


def test_unit_section_is_a_unit():
    view = level_view(A, 1)
    sigma = cc.random_coboundary(view, 0)
    f = cv.random_element(view, np.random.default_rng(0))
    d = cv.unit_section(view)
    assert cv.convolve(f, d, sigma).max_abs_diff(f) < 1e-14
    assert cv.convolve(d, f, sigma).max_abs_diff(f) < 1e-14
    assert cv.i_norm(d) == 1
    assert cv.reduced_norm(d, sigma) == 1


def test_matrix_units_multiply():
    e12, sigma = single_block([[0, 1], [0, 0]])
    e21, _ = single_block([[0, 0], [1, 0]])
    assert np.array_equal(cv.convolve(e12, e21, sigma).blocks[0], np.array([[1, 0], [0, 0]]))


def test_all_ones_block():
    f, sigma = single_block([[1, 1], [1, 1]])
    assert cv.i_norm(f) == 2
    assert cv.reduced_norm(f, sigma) == pytest.approx(2, abs=1e-15)


@pytest.mark.parametrize("seq,n", [(A, 0), (A, 1), (B, 0), (B, 2)])
def test_convolution_matches_direct_summation(seq, n):
    view = level_view(seq, n)
    sigma = cc.random_coboundary(view, 5)
    rng = np.random.default_rng(1)
    for domain in ("open", "closed"):
        f, g = cv.random_element(view, rng, domain), cv.random_element(view, rng, domain)
        got = cv.convolve(f, g, sigma)
        for a, b in zip(got.blocks, brute_convolve(f, g, sigma)):
            assert np.allclose(a, b, atol=1e-12)


def test_involution_with_trivial_cocycle_is_adjoint():
    view = level_view(A, 1)
    f = cv.random_element(view, np.random.default_rng(2))
    fs = cv.involution(f, cc.trivial(view))
    for a, b in zip(fs.blocks, f.blocks):
        assert np.array_equal(a, b.conj().T)


def test_involution_entries():
    view = level_view(A, 0)
    sigma = cc.random_coboundary(view, 8)
    f = cv.random_element(view, np.random.default_rng(3))
    fs = cv.involution(f, sigma)
    for i, ch in enumerate(view.chambers):
        t = ch.sample
        for a, b in iproduct(ch.open_signature, repeat=2):
            s = cc.cocycle_value(sigma, ArrowN(a, t, b), ArrowN(b, t, a))
            assert fs.entry(i, a, b) == pytest.approx(np.conj(f.entry(i, b, a) * s), abs=1e-14)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([(A, 0), (A, 1), (B, 1)]), st.sampled_from(["open", "closed"]))
def test_star_algebra_laws(seed, config, domain):
    seq, n = config
    view = level_view(seq, n)
    sigma = cc.random_coboundary(view, seed)
    rng = np.random.default_rng(seed)
    f, g, h = (cv.random_element(view, rng, domain) for _ in range(3))
    conv = lambda x, y: cv.convolve(x, y, sigma)
    star = lambda x: cv.involution(x, sigma)
    assert conv(conv(f, g), h).max_abs_diff(conv(f, conv(g, h))) < 1e-10
    assert star(star(f)).max_abs_diff(f) < 1e-12
    assert star(conv(f, g)).max_abs_diff(conv(star(g), star(f))) < 1e-10
    nf = cv.reduced_norm(f, sigma)
    assert cv.reduced_norm(conv(star(f), f), sigma) == pytest.approx(nf**2, rel=1e-8)
    assert nf <= cv.i_norm(f) * (1 + 1e-12)
    assert (f + g).max_abs_diff(g + f) == 0
    assert (2 * f - f).max_abs_diff(f) < 1e-14


def test_point_masses_and_reduced_norm_against_svd():
    view = level_view(A, 1)
    sigma = cc.random_coboundary(view, 4)
    f = cv.random_element(view, np.random.default_rng(4))
    assert cv.reduced_norm(f, sigma) == pytest.approx(brute_point_mass_norm(f, sigma), rel=1e-12)
    triv = cc.trivial(view)
    for i, ch in enumerate(view.chambers):
        for g in ch.open_signature:
            assert np.array_equal(cv.ind_point_mass(f, triv, i, g).matrix, f.blocks[i])
    with pytest.raises(AlgebraError):
        cv.ind_point_mass(f, sigma, 1, (0, 0))


def test_unit_section_point_mass_is_identity():
    view = level_view(A, 1)
    sigma = cc.random_coboundary(view, 4)
    d = cv.unit_section(view)
    for i, ch in enumerate(view.chambers):
        for g in ch.open_signature:
            assert np.array_equal(cv.ind_point_mass(d, sigma, i, g).matrix, np.eye(len(ch.open_signature)))


def test_coboundary_twist_is_unitarily_equivalent():
    view = level_view(A, 1)
    mu = cc.random_generator(view, 12)
    sigma = cc.coboundary_from(mu)
    f = cv.random_element(view, np.random.default_rng(5))
    for i, ch in enumerate(view.chambers):
        pos = np.array(ch.open_in_closure, dtype=int)
        m = mu.phases(i)[np.ix_(pos, pos)]
        for gi, g in enumerate(ch.open_signature):
            T = cv.ind_point_mass(f, sigma, i, g).matrix
            # T[a,b] = f[a,b] mu[a,b] mu[b,g] conj(mu[a,g]) = D1 (f * mu) D2
            D1 = np.diag(np.conj(m[:, gi]))
            D2 = np.diag(m[:, gi])
            assert np.allclose(T, D1 @ (f.blocks[i] * m) @ D2, atol=1e-12)
            assert cv.operator_norm(T) == pytest.approx(cv.operator_norm(f.blocks[i] * m), rel=1e-10)


def test_closed_padding_on_the_point_chamber():
    view = level_view(A, 0)
    sigma = cc.random_coboundary(view, 6)
    f = cv.random_element(view, np.random.default_rng(6))
    padded = f.to_closed()
    assert len(view.chambers[1].closure_signature) > len(view.chambers[1].open_signature)
    assert cv.reduced_norm(padded, sigma) == pytest.approx(cv.reduced_norm(f, sigma), rel=1e-12)
    assert cv.convolve(padded, padded, sigma).max_abs_diff(cv.convolve(f, f, sigma).to_closed()) < 1e-12


def test_operator_norm_closed_forms():
    rng = np.random.default_rng(7)
    for shape in [(1, 1), (2, 2), (3, 3)]:
        for _ in range(20):
            m = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
            assert cv.operator_norm(m) == pytest.approx(np.linalg.svd(m, compute_uv=False)[0], rel=1e-10)
    assert cv.operator_norm(np.zeros((0, 0))) == 0


def test_shape_and_level_checks():
    view = level_view(A, 0)
    with pytest.raises(AlgebraError):
        AlgebraElement(view, "open", [np.zeros((1, 1))] * 3)
    with pytest.raises(AlgebraError):
        AlgebraElement(view, "sideways", [])
    f = cv.random_element(view, np.random.default_rng(0))
    g = cv.random_element(level_view(A, 1), np.random.default_rng(0))
    with pytest.raises(AlgebraError):
        cv.convolve(f, g, cc.trivial(view))
    with pytest.raises(AlgebraError):
        f + f.to_closed()
    with pytest.raises(cc.CocycleError):
        cv.convolve(g, g, cc.trivial(view))


def test_element_norms_rows():
    view = level_view(A, 0)
    f = cv.unit_section(view)
    rows = cv.element_norms(f, cc.trivial(view))
    assert [r["size"] for r in rows] == [2, 1, 2]
    assert all(r["reduced_norm"] == 1 for r in rows)


def test_open_elements_vanish_off_GN():
    view = level_view(A, 1)
    f = cv.random_element(view, np.random.default_rng(0))
    for i, ch in enumerate(view.chambers):
        for a, b in iproduct(ch.closure_signature, repeat=2):
            if not in_GN(A, ArrowN(a, ch.sample, b)):
                assert f.entry(i, a, b) == 0
