import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from profilekit import freeconv as fc
from profilekit import logpoly as lp
from profilekit import profile as pr
from profilekit.errors import (
    ArgumentError,
    ConsistencyError,
    DegreeError,
    PreconditionError,
    ZeroPolynomialError,
)

int_roots = st.lists(st.integers(-5, 0), min_size=0, max_size=6)


# --- boxplus -------------------------------------------------------------------


def test_boxplus_square_example(backend):
    p = lp.from_roots([-1, -1])
    out = fc.boxplus_n(p, p, 2)
    np.testing.assert_allclose(np.exp(out.logc), [4, 4, 1], rtol=1e-14)
    exact = fc.boxplus_exact(fc.ExactPoly.from_roots([-1, -1]), fc.ExactPoly.from_roots([-1, -1]), 2)
    assert exact == fc.ExactPoly.from_roots([-2, -2])


@pytest.mark.parametrize("n", range(1, 7))
def test_monomial_is_boxplus_unit(n, backend):
    rng = random.Random(n)
    r = [-rng.randint(0, 5) for _ in range(n)]
    p = lp.from_roots(r, cap=n)
    out = fc.boxplus_n(lp.monomial(n), p, n)
    np.testing.assert_allclose(out.logc[np.isfinite(out.logc)], p.logc[np.isfinite(p.logc)], atol=1e-13)
    ep = fc.ExactPoly.from_roots(r)
    unit = fc.ExactPoly(tuple([0] * n + [1]))
    assert fc.boxplus_exact(unit, ep, n) == ep


def test_boxplus_degree_deficit():
    with pytest.raises(DegreeError):
        fc.boxplus_n(lp.from_roots([-1.0], cap=3), lp.from_roots([-1.0], cap=3), 3)
    with pytest.raises(ArgumentError):
        fc.boxplus_n(lp.from_roots([-1.0], cap=2), lp.from_roots([-1.0], cap=3))


@pytest.mark.parametrize("j", range(7))
@pytest.mark.parametrize("k", range(7))
def test_oracle_on_monomials(j, k):
    n = 6
    p = fc.ExactPoly(tuple([0] * j + [1]))
    q = fc.ExactPoly(tuple([0] * k + [1]))
    assert fc.boxplus_oracle(p, q, n) == fc.boxplus_exact(p, q, n)


def test_oracle_random_integer_rooted():
    rng = random.Random(12345)
    for _ in range(100):
        n = rng.randint(1, 6)
        a = fc.ExactPoly.from_roots([-rng.randint(0, 6) for _ in range(rng.randint(0, n))])
        b = fc.ExactPoly.from_roots([-rng.randint(0, 6) for _ in range(rng.randint(0, n))])
        assert fc.boxplus_oracle(a, b, n) == fc.boxplus_exact(a, b, n)


@given(int_roots, int_roots)
def test_float_boxplus_matches_exact(r1, r2):
    n = max(len(r1), len(r2), 1)
    if len(r1) + len(r2) < n:
        return
    p, q = lp.from_roots(r1, cap=n), lp.from_roots(r2, cap=n)
    out = fc.boxplus_n(p, q, n)
    ex = fc.boxplus_exact(fc.ExactPoly.from_roots(r1), fc.ExactPoly.from_roots(r2), n)
    ref = ex.to_float(n + 1)
    got = out.coefficients()
    np.testing.assert_allclose(got, ref, rtol=1e-12, atol=0)
    assert out.degree == len(r1) + len(r2) - n


@given(int_roots, int_roots, int_roots, st.integers(1, 5), st.integers(1, 5))
def test_exact_boxplus_symmetric_and_bilinear(r1, r2, r3, s, t):
    n = 6
    p, q, w = (fc.ExactPoly.from_roots(r) for r in (r1, r2, r3))
    assert fc.boxplus_exact(p, q, n) == fc.boxplus_exact(q, p, n)
    comb = fc.ExactPoly(tuple(s * a + t * b for a, b in zip(fc._padded(p, n), fc._padded(w, n))))
    lhs = fc.boxplus_exact(comb, q, n)
    x, y = fc.boxplus_exact(p, q, n), fc.boxplus_exact(w, q, n)
    rhs = fc.ExactPoly(tuple(s * a + t * b for a, b in zip(fc._padded(x, n), fc._padded(y, n))))
    assert lhs == rhs


@given(st.lists(st.floats(0, 4), min_size=3, max_size=7), st.lists(st.floats(0, 4), min_size=3, max_size=7))
def test_boxplus_output_is_real_rooted(l1, l2):
    n = max(len(l1), len(l2))
    p = lp.from_roots(-np.round(np.array(l1), 1), cap=n)
    q = lp.from_roots(-np.round(np.array(l2), 1), cap=n)
    out = fc.boxplus_n(p, q, n)
    r = lp.roots(out)
    assert r.size == out.degree and np.all(r <= 1e-9)


# --- boxtimes and Hadamard -------------------------------------------------------------


def test_boxtimes_examples():
    c = 2.5
    one = lp.from_roots([1.0], reflected=True)
    xc = lp.from_roots([c], reflected=True)
    assert fc.boxtimes_n(one, xc, 1).same_as(xc, atol=1e-15)
    sq = lp.from_roots([1.0, 1.0], reflected=True)
    assert fc.boxtimes_n(sq, sq, 2).same_as(sq, atol=1e-15)


def test_boxtimes_preconditions():
    p = lp.from_roots([1.0, 2.0], reflected=True)
    with pytest.raises(PreconditionError):
        fc.boxtimes_n(p, lp.from_roots([-1.0, -2.0]), 2)
    with pytest.raises(PreconditionError):
        fc.boxtimes_n(p, lp.from_roots([0.0, 0.0], reflected=True), 2)
    lo = lp.LogPoly(4, [0.0, 0.0, -np.inf, -np.inf, -np.inf], True)
    hi = lp.shift(lp.from_roots([1.0, 1.0], reflected=True), 2, cap=4)
    with pytest.raises(ZeroPolynomialError):
        fc._boxtimes_raw(lo, hi, 4)


@given(st.lists(st.floats(0.01, 5), min_size=1, max_size=40))
def test_boxtimes_unit_is_exact(lam):
    n = len(lam)
    q = lp.from_roots(np.array(lam), reflected=True)
    out = fc.boxtimes_n(lp.binomial(n), q, n)
    assert np.array_equal(out.logc, q.logc)


def test_boxtimes_exact_matches_float():
    rng = random.Random(7)
    for _ in range(30):
        n = rng.randint(1, 6)
        r1 = [rng.randint(1, 4) for _ in range(n)]
        r2 = [rng.randint(1, 4) for _ in range(n)]
        got = fc.boxtimes_n(lp.from_roots(r1, reflected=True), lp.from_roots(r2, reflected=True), n)
        ex = fc.boxtimes_exact(fc.ExactPoly.from_roots(r1), fc.ExactPoly.from_roots(r2), n)
        np.testing.assert_allclose(got.signed_coefficients(), ex.to_float(n + 1), rtol=1e-13)


def test_hadamard_examples():
    n = 30
    b = lp.binomial(n, reflected=False)
    h = fc.hadamard_n(b, b)
    np.testing.assert_allclose(h.logc, 2 * b.logc, rtol=1e-15)
    const = lp.from_roots([], cap=n)
    h1 = fc.hadamard_n(b, const)
    assert h1.degree == 0 and h1.logc[0] == 0.0
    with pytest.raises(ZeroPolynomialError):
        fc.hadamard_n(lp.monomial(n), const)


def test_hadamard_profile_additivity():
    n = 200
    p = lp.from_roots(-np.linspace(0.5, 2, n))
    q = lp.from_roots(np.full(n, -3.0))
    gp = pr.empirical_profile(p, normalize=False).g
    gq = pr.empirical_profile(q, normalize=False).g
    gh = pr.empirical_profile(fc.hadamard_n(p, q), normalize=False).g
    np.testing.assert_array_equal(gh, (p.logc + q.logc) / n)
    np.testing.assert_allclose(gh, gp + gq, rtol=0, atol=4e-16 * np.abs(gh).max())


def test_hadamard_small_output_real_rooted():
    p = lp.from_roots([-1, -2, -3, -4])
    q = lp.from_roots([-0.5, -1, -1.5, -6])
    r = lp.roots(fc.hadamard_n(p, q))
    assert r.size == 4 and np.all(r < 0)


# --- T-polynomials and the repeated action ------------------------------------------


def test_t_poly_sidi_case():
    n, ell = 12, 5
    t = fc.t_poly(n, ell, 1, 1)
    j = np.arange(1, n + 1)
    expect = [math.log(math.comb(n, int(i))) + ell * math.log(i / n) for i in j]
    np.testing.assert_allclose(t.logc[1:], expect, rtol=1e-13, atol=5e-14)
    assert np.isneginf(t.logc[0]) and t.reflected


@pytest.mark.parametrize("a,b,ell", [(1, 1, 3), (0, 1, 1), (0, 1, 3), (2, 1, 2), (1, 2, 2), (3, 1, 1)])
def test_t_poly_matches_exact_oracle(a, b, ell):
    n = 9
    t = fc.t_poly(n, ell, a, b)
    ex = fc.t_poly_exact(n, ell, a, b)
    np.testing.assert_allclose(t.signed_coefficients(), ex.to_float(n + 1), rtol=1e-12, atol=0)
    z = t.low
    assert z == fc.t_poly_zero_multiplicity(n, ell, a, b)


def test_t_poly_operator_path():
    n = 10
    t = fc.t_poly(n, 1, 0, 1)
    via = lp.shift(lp.apply_Aab(lp.binomial(n), 0, 1, n), 1, cap=n)
    assert t.same_as(via, atol=1e-13)


def test_t_poly_bad_arguments():
    with pytest.raises(ArgumentError):
        fc.t_poly(10, 10, 0, 1)


def test_repeated_action_on_unit_is_t_poly():
    n = 40
    for a, b, ell in [(1, 1, 7), (0, 1, 5), (2, 1, 3)]:
        out = fc.repeated_action(lp.binomial(n), a, b, ell, n)
        assert out.same_as(fc.t_poly(n, ell, a, b), atol=1e-10)


def test_repeated_action_derivative_case_n50():
    n = 50
    q = lp.from_roots(np.arange(n) / n, reflected=True)
    out = fc.repeated_action(q, 0, 1, 1, n, atol=1e-10)
    d = lp.shift(lp.apply_Aab(q, 0, 1, n), 1, cap=n)
    assert out.same_as(d, atol=1e-12)


def test_repeated_action_identity_and_mismatch():
    q = lp.from_roots([1.0, 2.0, 3.0], reflected=True)
    assert fc.repeated_action(q, 1, 1, 0).same_as(q)
    with pytest.raises(PreconditionError):
        fc.repeated_action(lp.from_roots([-1.0, -2.0]), 1, 1, 1)
    with pytest.raises(ConsistencyError):
        fc.repeated_action(q, 1, 1, 2, atol=-1.0)


@given(st.lists(st.integers(1, 5), min_size=1, max_size=6), st.integers(0, 2), st.integers(0, 2), st.integers(0, 3))
def test_repeated_action_exact_identity(r, a, b, ell):
    n = len(r)
    if 1 + (a - b) * ell / n <= 0 or (ell and b > n):
        return
    try:
        lhs = fc.repeated_action_exact(fc.ExactPoly.from_roots(r), a, b, ell, n)
    except PreconditionError:
        return
    t = fc.t_poly_exact(n, ell, a, b)
    rhs = fc.boxtimes_exact(fc.ExactPoly.from_roots(r), t, n)
    assert lhs == rhs


def test_exact_poly_basics():
    p = fc.ExactPoly.from_roots([1, 2])
    assert p.coeffs == (Fraction(2), Fraction(-3), Fraction(1))
    assert fc.ExactPoly(()).degree == -1
    assert p.derivative(2).coeffs == (Fraction(2),)
    with pytest.raises(ArgumentError):
        fc.ExactPoly(tuple(range(20)))
