import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from profilekit import freeconv as fc
from profilekit import logpoly as lp
from profilekit import rootspace as rsp
from profilekit.errors import ArgumentError, DegreeError


def test_rootset_validation():
    with pytest.raises(ArgumentError):
        rsp.RootSet(np.array([1.0, 0.5]), np.array([1, 1]), 2)
    with pytest.raises(ArgumentError):
        rsp.RootSet(np.array([1.0]), np.array([0]), 2)
    with pytest.raises(ArgumentError):
        rsp.RootSet(np.array([1.0]), np.array([3]), 2)


def test_from_values_and_json():
    rs = rsp.RootSet.from_values([-1, -3, -1, 0], cap=6)
    assert list(rs.z) == [-3, -1, 0] and list(rs.m) == [1, 2, 1]
    back = rsp.RootSet.from_json(json.loads(rs.dumps()))
    assert np.array_equal(back.z, rs.z) and np.array_equal(back.m, rs.m) and back.cap == 6
    # a flat list without multiplicities is accepted too
    flat = rsp.RootSet.from_json({"cap": 3, "roots": [-1, -1, -2]})
    assert list(flat.m) == [1, 2]


def test_measure_mass_at_infinity():
    mu = rsp.RootSet.from_values([1.0, 2.0], cap=5, reflected=True).measure()
    assert mu.infinity_mass == pytest.approx(0.6) and mu.infinity_sign == 1


@given(st.lists(st.integers(0, 12), min_size=2, max_size=6, unique=True))
def test_derivative_matches_coefficient_route(idx):
    r = -np.sort(np.array(idx, dtype=float))
    rs = rsp.RootSet.from_values(r)
    d = rsp.derivative(rs, 1)
    ref = np.sort(lp.roots(lp.derivative(lp.from_roots(r), 1)))
    np.testing.assert_allclose(d.expand(), ref, atol=1e-8)
    assert d.cap == rs.cap - 1


def test_derivative_keeps_multiple_roots():
    rs = rsp.RootSet(np.array([-2.0, 0.0]), np.array([3, 2]), 5)
    d = rsp.derivative(rs, 2)
    assert d.multiplicity_at(-2.0) == 1 and d.multiplicity_at(0.0) == 0
    assert d.degree == 3
    with pytest.raises(DegreeError):
        rsp.derivative(rs, 6)


def test_t_poly_roots_match_coefficients_small_n():
    for a, b, ell in [(1, 1, 2), (0, 1, 2), (2, 1, 2), (1, 2, 1)]:
        rs = rsp.t_poly_roots(8, ell, a, b)
        p = fc.t_poly(8, ell, a, b)
        assert rs.degree == p.degree
        ref = np.sort(-lp.roots(p))
        np.testing.assert_allclose(np.sort(rs.expand()), ref, atol=1e-8)


def test_zero_root_multiplicity():
    # a=2, b=1: D=1, multiplicity b=1
    assert rsp.t_poly_roots(30, 4, 2, 1).multiplicity_at(0.0) == 1
    # a=0, b=1, ell=3: D=-1, multiplicity a - ell*D = 3
    assert rsp.t_poly_roots(30, 3, 0, 1).multiplicity_at(0.0) == 3
    assert fc.t_poly_zero_multiplicity(30, 3, 0, 1) == 3


def test_repeated_action_identity():
    rs = rsp.RootSet.from_values([-1.0, -0.5], cap=4)
    out = rsp.repeated_action(rs, 1, 2, 0)
    assert np.array_equal(out.z, rs.z)


def test_large_n_derivative_chain_counts():
    # x^ell (d/dx)^ell (x-1)^n keeps every surviving root at 1
    rs = rsp.t_poly_roots(800, 300, 0, 1)
    assert rs.degree == 800
    assert rs.multiplicity_at(0.0) == 300 and rs.multiplicity_at(1.0) == 500

    grid = rsp.RootSet.from_values(np.arange(800) / 800, reflected=True)
    d = rsp.derivative(grid, 400)
    assert d.degree == 400 and np.all(d.m == 1)
    assert 0.0 < d.z.min() and d.z.max() < 799 / 800
