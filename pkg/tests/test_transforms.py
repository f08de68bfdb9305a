import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from profilekit import closedform as cf
from profilekit import freeconv as fc
from profilekit import logpoly as lp
from profilekit import profile as pr
from profilekit import transforms as tr
from profilekit.errors import ArgumentError, DomainError, RangeError, SingularityError
from profilekit.samples import TransformSample


def emp(atoms, cap=None, sign=-1):
    return lp.EmpiricalMeasure.from_roots(np.asarray(atoms, dtype=float), cap=cap, infinity_sign=sign)


# --- Cauchy -------------------------------------------------------------------------


def test_cauchy_examples():
    assert tr.cauchy(emp([-1.0]), 1.0) == pytest.approx(0.5)
    assert tr.cauchy(cf.DiracMixture([0.0, -2.0]), 2.0) == pytest.approx(3 / 8)
    assert tr.cauchy(emp([0.0, -2.0]), 2.0) == pytest.approx(3 / 8)


def test_cauchy_with_mass_at_infinity():
    mu = emp([-1.0, -2.0, -0.5], cap=10)
    t = 1e8
    assert tr.cauchy(mu, t) == pytest.approx((1 - mu.infinity_mass) / t, rel=1e-6)


def test_cauchy_singularity():
    with pytest.raises(SingularityError):
        tr.cauchy(emp([-1.0, -2.0]), -1.0 + 1e-13)


def test_cauchy_polynomial_routes_agree():
    r = -np.array([0.5, 1.0, 2.0, 3.5])
    p = lp.from_roots(r, cap=6)
    t = np.array([0.3, 1.0, 4.0])
    np.testing.assert_allclose(tr.cauchy(p, t), tr.cauchy(emp(r, cap=6), t), rtol=1e-13)
    q = lp.from_roots(-r, cap=6, reflected=True)
    np.testing.assert_allclose(tr.cauchy(q, -t), tr.cauchy(emp(-r, cap=6, sign=1), -t), rtol=1e-13)


def test_t_g_is_increasing():
    p = lp.from_roots(-np.linspace(0.1, 2, 300))
    t = np.geomspace(1e-3, 1e3, 200)
    tg = t * tr.cauchy(p, t)
    assert np.all(np.diff(tg) > 0)


# --- R -------------------------------------------------------------------------


@pytest.mark.parametrize("a", [-3.0, -1.0, 0.0, 0.7])
def test_r_of_dirac_is_linear(a):
    s = np.linspace(0.05, 2.0, 9)
    np.testing.assert_allclose(tr.r_transform(cf.DiracMixture([a]), s), a * s, atol=1e-12)


def test_r_dirac_sum():
    s = np.linspace(0.05, 0.5, 7)
    r1 = tr.r_transform(cf.DiracMixture([-1.0]), s)
    r2 = tr.r_transform(cf.DiracMixture([-2.0]), s)
    np.testing.assert_allclose(2 * r1, r2, atol=1e-12)


def test_r_at_zero_is_minus_infinity_mass():
    mu = emp(-np.linspace(0.5, 2, 70), cap=100)
    assert tr.r_transform(mu, 1e-6) == pytest.approx(-0.3, abs=1e-3)
    p = lp.from_roots(-np.linspace(0.5, 2, 70), cap=100)
    assert tr.r_transform(p, 1e-6) == pytest.approx(-0.3, abs=1e-3)


def test_r_range_errors():
    with pytest.raises(RangeError):
        tr.r_transform(cf.Uniform(-1.0, 0.0), 1e6)
    with pytest.raises(RangeError):
        tr.r_transform(emp([-1.0]), -0.1)
    with pytest.raises(DomainError):
        tr.r_transform(emp([1.0], cap=2, sign=1), 0.1)


def test_r_polynomial_beyond_coefficient_range():
    # s past G(0+) needs the inverse left of zero: falls back to the roots
    r = [-1.0, -2.0, -4.0]
    p = lp.from_roots(r)
    s = np.array([0.2, 1.5, 3.0])
    np.testing.assert_allclose(tr.r_transform(p, s), tr.r_transform(emp(r), s), rtol=1e-10)


# --- psi and S ---------------------------------------------------------------------


def test_psi_examples():
    assert tr.psi_transform(cf.DiracMixture([1.0]), -1.0) == pytest.approx(-0.5)
    nu = emp([0.0, 0.0, 1.0, 3.0, 4.0], cap=8, sign=1)
    # nu({0}) = 2/8, nu({+inf}) = 3/8
    assert tr.psi_transform(nu, -1e-6) == pytest.approx(-3 / 8, abs=1e-3)
    assert tr.psi_transform(nu, -1e6) == pytest.approx(2 / 8 - 1, abs=1e-3)
    with pytest.raises(DomainError):
        tr.psi_transform(nu, 0.5)


@given(st.lists(st.floats(0.0, 10.0), min_size=1, max_size=30))
def test_psi_is_increasing(atoms):
    nu = emp(sorted(atoms), cap=len(atoms) + 1, sign=1)
    t = -np.geomspace(1e3, 1e-3, 60)
    v = tr.psi_transform(nu, t)
    assert np.all(np.diff(v) >= -1e-15)


def test_s_examples():
    t = np.array([-0.8, -0.5, -0.2])
    np.testing.assert_allclose(tr.s_transform(cf.DiracMixture([1.0]), t), 1.0, rtol=1e-10)
    c = 2.5
    np.testing.assert_allclose(tr.s_transform(cf.DiracMixture([c]), t), 1 / c, rtol=1e-10)
    k = 0.3
    t = np.array([-0.6, -0.4, -0.1])
    np.testing.assert_allclose(tr.s_transform(cf.Bernoulli01(k), t), (t + 1) / (1 + t - k), rtol=1e-9)


def test_s_at_zero_is_filled():
    nu = cf.DiracMixture([1.0, 3.0], [0.5, 0.5])
    near = tr.s_transform(nu, np.array([-1e-4, -1e-5]))
    at0 = tr.s_transform(nu, 0.0)
    assert at0 == pytest.approx(near[1], rel=1e-4)
    # S(0) = 1 / mean for a measure without atoms at 0 or infinity
    assert at0 == pytest.approx(0.5, rel=1e-6)


def test_s_range_error():
    with pytest.raises(RangeError):
        tr.s_transform(cf.Bernoulli01(0.3), -0.8)


def test_s_discrete_bernoulli_matches_closed_form():
    k = 0.3
    n = 1000
    nu = emp(np.r_[np.zeros(300), np.ones(700)], cap=n, sign=1)
    t = np.linspace(-0.6, -0.05, 12)
    np.testing.assert_allclose(tr.s_transform(nu, t), cf.nu_ab_s_transform(0, 1, k, t), atol=1e-6)


# --- profile routes -------------------------------------------------------------------


def test_s_from_binomial_profile():
    t = np.linspace(-0.9, -0.1, 9)
    lim = pr.profile_from_measure(cf.DiracMixture([-1.0]))
    np.testing.assert_allclose(tr.s_from_profile(lim, t), 1.0, atol=1e-6)
    fin = pr.empirical_profile(lp.binomial(1000))
    np.testing.assert_allclose(tr.s_from_profile(fin, t), 1.0, atol=1e-6)


def test_s_from_bernoulli_coefficients():
    k, n = 0.3, 1000
    prof = pr.empirical_profile(fc.t_poly(n, int(k * n), 0, 1))
    t = np.linspace(-0.6, -0.1, 11)
    np.testing.assert_allclose(tr.s_from_profile(prof, t), (t + 1) / (1 + t - k), atol=1e-4)


def test_r_from_binomial_profile():
    s = np.linspace(0.05, 0.45, 9)
    lim = pr.profile_from_measure(cf.DiracMixture([-1.0]))
    np.testing.assert_allclose(tr.r_from_profile(lim, s), -s, atol=1e-6)
    fin = pr.empirical_profile(lp.binomial(1000, reflected=False))
    np.testing.assert_allclose(tr.r_from_profile(fin, s), -s, atol=1e-6)


def test_profile_route_range_errors():
    prof = pr.profile_from_measure(cf.DiracMixture([0.0, -1.0], [0.5, 0.5]))
    with pytest.raises(RangeError):
        tr.s_from_profile(prof, -0.7)
    with pytest.raises(RangeError):
        tr.r_from_profile(pr.profile_from_measure(cf.DiracMixture([-1.0])), 5.0)


def test_alpha_exp_gprime_decreasing():
    lim = pr.profile_from_measure(cf.Uniform(-2.0, -1.0))
    x, s = lim.slope_samples()
    assert np.all(np.diff(x * np.exp(s)) < 0)
    # finite n: the first few coefficients sit in the Poisson regime, away from the limit
    fin = pr.empirical_profile(lp.from_roots(-np.linspace(1, 2, 500)))
    x, s = fin.slope_samples()
    inner = (x >= 0.02) & (x <= 0.98)
    assert np.all(np.diff(x[inner] * np.exp(s[inner])) < 0)


def test_dual_path_r_on_uniform_minus_two_minus_one():
    n = 1000
    atoms = -2 + np.arange(n) / n
    p = lp.from_roots(atoms)
    s = np.linspace(0.05, 0.5, 15)
    got = tr.r_from_profile(pr.empirical_profile(p), s)
    ref = tr.r_transform(emp(atoms), s)
    assert np.max(np.abs(got - ref)) <= 1e-3


def test_dual_path_s_on_reflected_polynomial():
    n = 1000
    atoms = 0.5 + 1.5 * np.arange(n) / n
    p = lp.from_roots(atoms, reflected=True)
    t = np.linspace(-0.9, -0.1, 17)
    got = tr.s_from_profile(pr.empirical_profile(p), t)
    ref = tr.s_transform(emp(atoms, sign=1), t)
    assert np.max(np.abs(got - ref)) <= 1e-3


# --- s_power and samples --------------------------------------------------------------


def test_s_power_identity_and_constants():
    t = np.linspace(-0.5, -0.1, 5)
    S = tr.sample("S", cf.DiracMixture([2.0]), t)
    assert np.array_equal(tr.s_power(S, 1).values, S.values)
    np.testing.assert_allclose(tr.s_power(S, 3).values, 0.5**3, rtol=1e-9)


def test_s_power_matches_negative_delta_case():
    a, b, k = 0, 2, 0.2
    d = a - b
    t = np.linspace(-0.55, -0.1, 10)
    base = TransformSample("S", t, cf.nu_ab_s_transform(0, 1, -d * k, t))
    powered = tr.s_power(base, b / -d)
    np.testing.assert_allclose(powered.values, cf.nu_ab_s_transform(a, b, k, t), rtol=1e-12)


def test_s_power_errors():
    S = TransformSample("S", np.array([-0.5, -0.2]), np.array([1.0, -1.0]))
    with pytest.raises(DomainError):
        tr.s_power(S, 2)
    with pytest.raises(ArgumentError):
        tr.s_power(S, 0.5)


def test_sample_dispatch_and_csv(tmp_path):
    t = np.linspace(1.0, 3.0, 5)
    smp = tr.sample("G", cf.DiracMixture([-1.0]), t)
    np.testing.assert_allclose(smp.values, 1 / (t + 1))
    path = tmp_path / "g.csv"
    smp.write(path)
    back = TransformSample.read(path)
    assert back.kind == "G" and np.array_equal(back.values, smp.values)
    assert (tmp_path / "g.csv.json").exists() or any(p.suffix == ".json" for p in tmp_path.iterdir())
    with pytest.raises(ArgumentError):
        tr.sample("chi", cf.DiracMixture([-1.0]), t)
    prof = pr.profile_from_measure(cf.DiracMixture([-1.0]))
    with pytest.raises(ArgumentError):
        tr.sample("psi", prof, -t)
    assert math.isclose(tr.sample("R", prof, [0.2]).values[0], -0.2, abs_tol=1e-6)
