"""Closed-form limit laws and the special functions they need.

* ``nu_{a,b;kappa}``: the limit root law of ``x^(-ell(a-b)) A_{a,b}^ell (x-1)^n``
  with ``ell/n -> kappa``. Its S-transform is explicit; for ``a == b`` the
  Cauchy transform is explicit through the principal Lambert branch.
* ``mu_kappa``: the limit of ``floor(kappa n)`` derivatives of a polynomial with
  uniform roots on ``[-1, 1]``, with ``G = Y_kappa^{-1}``,
  ``Y_kappa(t) = coth t - kappa/t``.
* ``g_S``: the coefficient profile of ``prod_{j<n} (x + j/n)``.
"""

from __future__ import annotations

import json
import math

import numpy as np
from scipy.integrate import quad

from .errors import (
    ArgumentError,
    DomainError,
    RangeError,
    SingularityError,
    UnsupportedError,
)
from .profile import TiltingContext

INV_E = math.exp(-1.0)
_E = math.e

# ---------------------------------------------------------------------------
# Lambert W, principal branch


def _branch_series(p):
    # W near -1/e in powers of p = sqrt(2 (e x + 1))
    return -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0 + p * (-43.0 / 540.0 + p * 769.0 / 17280.0))))


def _halley(w, x, maxiter=60):
    for _ in range(maxiter):
        ew = np.exp(w)
        f = w * ew - x
        wp1 = w + 1.0
        denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1)
        step = f / denom
        w = w - step
        if np.all(np.abs(step) <= 4e-16 * (1.0 + np.abs(w))):
            break
    return w


def lambert_w0(x):
    """Principal branch ``W0`` for real ``x >= -1/e`` (Halley iteration)."""
    x = np.asarray(x, dtype=float)
    if np.any(x < -INV_E - 1e-15):
        raise DomainError("lambert_w0 needs x >= -1/e; use lambert_w0_above below it")
    flat = np.atleast_1d(x).astype(float).ravel()
    w = np.empty_like(flat)
    q = np.maximum(2.0 * (_E * flat + 1.0), 0.0)
    p = np.sqrt(q)
    near = p < 0.5
    w[near] = _branch_series(p[near])
    mid = ~near & (flat < 3.0)
    w[mid] = np.log1p(flat[mid]) * (1.0 - np.log1p(np.log1p(flat[mid])) / (2.0 + np.log1p(flat[mid])))
    big = flat >= 3.0
    L1 = np.log(flat[big])
    L2 = np.log(L1)
    w[big] = L1 - L2 + L2 / L1
    # the series is already exact to rounding very close to the branch point
    polish = p >= 1e-3
    w[polish] = _halley(w[polish], flat[polish])
    out = w.reshape(x.shape)
    return float(out) if out.ndim == 0 else out


def lambert_w0_complex(z):
    """Principal branch for complex ``z``; on the cut ``(-inf, -1/e)`` the value from above."""
    z = np.asarray(z, dtype=complex)
    flat = np.atleast_1d(z).ravel().copy()
    # put the cut on the upper side
    on_cut = (flat.imag == 0) & (flat.real < -INV_E)
    flat[on_cut] = flat[on_cut].real + 0j
    p = np.sqrt(2.0 * (_E * flat + 1.0))
    p[on_cut] = 1j * np.sqrt(-2.0 * (_E * flat[on_cut].real + 1.0))
    w = np.empty_like(flat)
    near = np.abs(p) < 1.38
    w[near] = _branch_series(p[near])
    # left of the branch point log1p misleads Halley; use the asymptotic form there
    left = ~near & (flat.real < -INV_E) & (np.abs(flat.imag) < 1.5)
    L1 = np.log(flat[left])
    L1 = np.where(on_cut[left], np.log(np.abs(flat[left])) + 1j * math.pi, L1)
    L2 = np.log(L1)
    w[left] = L1 - L2 + L2 / L1
    rest = ~near & ~left
    L = np.log1p(flat[rest])
    w[rest] = L * (1.0 - np.log1p(L) / (2.0 + L))
    polish = np.abs(p) >= 1e-3
    with np.errstate(over="ignore", invalid="ignore"):
        w[polish] = _halley(w[polish], flat[polish])
    out = w.reshape(z.shape)
    return complex(out) if out.ndim == 0 else out


def lambert_w0_above(y):
    """``W0(y + i0)`` for real ``y < -1/e``; imaginary part in ``(0, pi)``."""
    y = np.asarray(y, dtype=float)
    if np.any(y >= -INV_E):
        raise DomainError("lambert_w0_above needs y < -1/e")
    return lambert_w0_complex(y + 0j)


# ---------------------------------------------------------------------------
# nu_{a,b;kappa}


def _check_ab(a, b, kappa):
    if a < 0 or b < 0 or kappa <= 0:
        raise ArgumentError("need a, b >= 0 and kappa > 0")
    if 1 + (a - b) * kappa <= 0:
        raise ArgumentError("need 1 + (a-b) kappa > 0")


def nu_aa_support(a, kappa):
    c = a * kappa
    return 0.0, c * math.exp(1.0 - c)


def nu_aa_atom_at_one(a, kappa):
    return max(1.0 - a * kappa, 0.0)


def nu_aa_cauchy(a, kappa, t):
    """``G(t) = 1 / (t (1 + W0(-c e^{-c}/t)/c))`` with ``c = a kappa``.

    Real ``t`` must avoid the support ``[0, c e^{1-c}]`` and, when ``c < 1``,
    the atom at 1. Complex ``t`` off the real axis is always accepted.
    """
    _check_ab(a, a, kappa)
    c = a * kappa
    t = np.asarray(t)
    tc = t.astype(complex)
    _, hi = nu_aa_support(a, kappa)
    real = tc.imag == 0
    if np.any(real & (tc.real >= 0) & (tc.real <= hi)):
        raise SingularityError(f"t on the support [0, {hi:.6g}]")
    if c < 1 and np.any(real & (np.abs(tc.real - 1.0) < 1e-12)):
        raise SingularityError("t at the atom x = 1")
    arg = -c * math.exp(-c) / tc
    if np.all(real):
        w = lambert_w0(arg.real)
    else:
        w = lambert_w0_complex(arg)
    out = 1.0 / (tc * (1.0 + w / c))
    if np.all(real) and not np.iscomplexobj(t):
        out = np.real(out)
    return out.item() if np.ndim(out) == 0 else out


def _w_above_log(u):
    """``W0(-e^u + i0)`` from ``w + log w = u + i pi`` (no overflow for large ``u``)."""
    rhs = u + 1j * math.pi
    L2 = np.log(rhs)
    w = rhs - L2 + L2 / rhs
    for _ in range(50):
        step = (w + np.log(w) - rhs) / (1.0 + 1.0 / w)
        w = w - step
        if np.all(np.abs(step) <= 4e-16 * np.abs(w)):
            break
    return w


def _x_density(c, s):
    """``x p(x)`` at ``x = e^{-s}``."""
    # u = log|y| for the Lambert argument y = -c e^{-c} / x
    u = math.log(c) - c + np.asarray(s, dtype=float)
    w = np.empty(u.shape, dtype=complex)
    big = u > 30.0
    w[big] = _w_above_log(u[big])
    w[~big] = lambert_w0_above(-np.exp(u[~big]))
    return -np.imag(1.0 / (1.0 + w / c)) / math.pi


def nu_aa_density(a, kappa, x):
    """Absolutely continuous density of ``nu_{a,a;kappa}`` on ``(0, c e^{1-c})``.

    The remaining mass ``max(1 - c, 0)`` is an atom at 1 (:func:`nu_aa_atom_at_one`).
    """
    _check_ab(a, a, kappa)
    c = a * kappa
    x = np.asarray(x, dtype=float)
    _, hi = nu_aa_support(a, kappa)
    flat = np.atleast_1d(x).ravel()
    if np.any(flat <= 0) or np.any(flat >= hi):
        raise DomainError(f"x must lie in (0, {hi:.6g})")
    out = (_x_density(c, -np.log(flat)) / flat).reshape(x.shape)
    return float(out) if out.ndim == 0 else out


def nu_aa_density_mass(a, kappa):
    """Integral of :func:`nu_aa_density` (should equal ``min(a kappa, 1)``).

    Near 0 the density behaves like ``1/(x log^2 x)``, so the integral is
    taken in ``s = -log x`` out to infinity.
    """
    _check_ab(a, a, kappa)
    c = a * kappa
    _, hi = nu_aa_support(a, kappa)
    s0 = -math.log(hi)

    def ds(s):
        if s <= s0:
            return 0.0
        return float(_x_density(c, np.array([s]))[0])

    # square-root edge at s0; split off the first unit
    head, _ = quad(ds, s0, s0 + 1.0, limit=200, epsabs=1e-13, epsrel=1e-11)
    tail, _ = quad(ds, s0 + 1.0, np.inf, limit=400, epsabs=1e-13, epsrel=1e-11)
    return head + tail


def nu_ab_atom_at_zero(a, b, kappa):
    return max(0.0, -(a - b) * kappa)


def nu_ab_s_domain(a, b, kappa):
    """Open interval of ``t + 1`` on which the S-transform formula holds."""
    return max(0.0, -(a - b) * kappa), 1.0


def nu_ab_s_transform(a, b, kappa, t):
    _check_ab(a, b, kappa)
    t = np.asarray(t, dtype=float)
    lo, hi = nu_ab_s_domain(a, b, kappa)
    u = t + 1.0
    if np.any(u <= lo) or np.any(u >= hi):
        raise RangeError(f"t + 1 must lie in ({lo:.6g}, 1)")
    d = a - b
    if d > 0:
        out = (1.0 + d * kappa / u) ** (b / d)
    elif d < 0:
        out = (u / (u + d * kappa)) ** (b / (-d))
    else:
        out = np.exp(b * kappa / u)
    return float(out) if np.ndim(out) == 0 else out


def nu_ab_exp_neg_gprime(a, b, kappa, alpha):
    """``exp(-g'(alpha))`` for the profile of the reflected ``nu_{a,b;kappa}``."""
    alpha = np.asarray(alpha, dtype=float)
    d = a - b
    if d == 0:
        return alpha / (1.0 - alpha) * np.exp(-b * kappa / alpha)
    return alpha ** (a / d) / ((1.0 - alpha) * (alpha + d * kappa) ** (b / d))


def nu_ab_profile(a, b, kappa, alpha):
    """Unnormalized profile ``H(alpha) + b int_0^kappa log(alpha + (a-b)s) ds``."""
    alpha = np.asarray(alpha, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        H = -alpha * np.log(alpha) - (1.0 - alpha) * np.log1p(-alpha)
    d = a - b
    if d == 0:
        return H + b * kappa * np.log(alpha)

    def F(x):
        return x * np.log(x) - x

    return H + b * (F(alpha + d * kappa) - F(alpha)) / d


# ---------------------------------------------------------------------------
# mu_kappa


def y_kappa(kappa, t):
    t = np.asarray(t, dtype=float)
    return 1.0 / np.tanh(t) - kappa / t


def z_kappa(kappa):
    """Positive root of ``sinh z = z / sqrt(kappa)`` (the critical point of ``Y_kappa``)."""
    if not 0 < kappa < 1:
        raise DomainError("kappa must lie in (0, 1)")
    r = 1.0 / math.sqrt(kappa)
    lo, hi = 1e-12, 2.0 * math.log(2.0 * r) + 10.0  # sinh z > z r well before this
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if math.sinh(mid) - r * mid < 0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-15 * hi:
            break
    return 0.5 * (lo + hi)


def mu_kappa_support(kappa):
    e = float(y_kappa(kappa, z_kappa(kappa)))
    return -e, e


def mu_kappa_cauchy(kappa, z):
    """``G = Y_kappa^{-1}`` on the branch ``(0, z_kappa)``, odd in ``z``.

    The total mass of this Cauchy transform is ``1 - kappa`` (``z G -> 1 - kappa``).
    """
    z = np.asarray(z, dtype=float)
    zk = z_kappa(kappa)
    edge = float(y_kappa(kappa, zk))
    if np.any(np.abs(z) <= edge):
        raise SingularityError(f"|z| must exceed the support edge {edge:.6g}")
    az = np.abs(np.atleast_1d(z).ravel())
    lo = np.full(az.size, 0.0)
    hi = np.full(az.size, zk)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        with np.errstate(divide="ignore"):
            above = y_kappa(kappa, np.where(mid > 0, mid, 1e-300)) > az
        lo = np.where(above, mid, lo)
        hi = np.where(above, hi, mid)
        if np.all(hi - lo <= 1e-15 * hi):
            break
    out = (np.sign(np.atleast_1d(z).ravel()) * 0.5 * (lo + hi)).reshape(z.shape)
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# Stirling profile


def w_s(alpha):
    """``w > 0`` with ``w / (e^w - 1) = alpha``, for ``alpha`` in ``(0, 1)``."""
    alpha = np.asarray(alpha, dtype=float)
    if np.any(alpha <= 0) or np.any(alpha >= 1):
        raise DomainError("alpha must lie in (0, 1)")
    flat = np.atleast_1d(alpha).ravel()
    lo = np.zeros(flat.size)
    hi = np.full(flat.size, 1.0)
    while True:
        bad = hi / np.expm1(hi) > flat
        if not bad.any():
            break
        hi = np.where(bad, 2.0 * hi, hi)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        f = mid / np.expm1(mid)
        up = f > flat
        lo = np.where(up, mid, lo)
        hi = np.where(up, hi, mid)
        if np.all(hi - lo <= 1e-15 * hi):
            break
    out = (0.5 * (lo + hi)).reshape(alpha.shape)
    return float(out) if out.ndim == 0 else out


def stirling_profile(alpha):
    """Limit of ``(1/n) log [x^k] prod_{j<n}(x + j/n)`` at ``k/n = alpha``."""
    alpha = np.asarray(alpha, dtype=float)
    w = w_s(alpha)
    return -1.0 + alpha + (1.0 - alpha) * np.log(alpha) + w + (alpha - 1.0) * np.log(w)


# ---------------------------------------------------------------------------
# measure descriptions


class MeasureSpec:
    """A closed-form probability measure on the (extended) real line."""

    variant = ""

    def params(self):
        raise NotImplementedError

    def cauchy(self, t):
        raise NotImplementedError

    def hull(self):
        """Convex hull ``(lo, hi)`` of the finite part of the support."""
        raise NotImplementedError

    def tilting(self):
        raise UnsupportedError(f"{self.variant} has no tilting description")

    def mass_at_zero(self):
        return 0.0

    def mass_at_infinity(self):
        return 0.0

    def to_json(self):
        return {"variant": self.variant, "params": self.params()}

    def dumps(self):
        return json.dumps(self.to_json())

    def __repr__(self):
        return f"{type(self).__name__}({self.params()})"


class DiracMixture(MeasureSpec):
    variant = "dirac_mixture"

    def __init__(self, atoms, weights=None):
        self.atoms = np.asarray(atoms, dtype=float)
        if weights is None:
            weights = np.full(self.atoms.size, 1.0 / self.atoms.size)
        self.weights = np.asarray(weights, dtype=float)
        if self.atoms.shape != self.weights.shape or np.any(self.weights < 0):
            raise ArgumentError("atoms and nonnegative weights must match")
        if abs(self.weights.sum() - 1.0) > 1e-12:
            raise ArgumentError("weights must sum to 1")

    def params(self):
        return {"atoms": self.atoms.tolist(), "weights": self.weights.tolist()}

    def hull(self):
        return float(self.atoms.min()), float(self.atoms.max())

    def mass_at_zero(self):
        return float(self.weights[self.atoms == 0].sum())

    def cauchy(self, t):
        t = np.asarray(t)
        d = t[..., None] - self.atoms
        if np.any(np.abs(d) < 1e-12):
            raise SingularityError("t at an atom")
        out = np.sum(self.weights / d, axis=-1)
        return out.item() if np.ndim(out) == 0 else out

    def tilting(self):
        atoms = self.atoms
        if atoms.max() > 0:
            if atoms.min() < 0:
                raise DomainError("mixture must sit on one half-line")
            atoms = -atoms
        return TiltingContext.discrete(1.0 / (1.0 - atoms), self.weights, -atoms / (1.0 - atoms))


class Bernoulli01(DiracMixture):
    """``kappa delta_0 + (1 - kappa) delta_1``."""

    variant = "bernoulli01"

    def __init__(self, kappa):
        if not 0 <= kappa <= 1:
            raise ArgumentError("kappa must lie in [0, 1]")
        self.kappa = float(kappa)
        super().__init__([0.0, 1.0], [self.kappa, 1.0 - self.kappa])

    def params(self):
        return {"kappa": self.kappa}


class Uniform(MeasureSpec):
    variant = "uniform"

    def __init__(self, lo, hi):
        if not lo < hi:
            raise ArgumentError("need lo < hi")
        self.lo, self.hi = float(lo), float(hi)

    def params(self):
        return {"lo": self.lo, "hi": self.hi}

    def hull(self):
        return self.lo, self.hi

    def cauchy(self, t):
        t = np.asarray(t)
        if not np.iscomplexobj(t) and np.any((t >= self.lo) & (t <= self.hi)):
            raise SingularityError("t on the support")
        out = np.log((t - self.lo) / (t - self.hi)) / (self.hi - self.lo)
        return out.item() if np.ndim(out) == 0 else out

    def tilting(self):
        lo, hi = self.lo, self.hi
        if hi > 0 and lo < 0:
            raise DomainError("uniform law must sit on one half-line")
        if lo >= 0:
            lo, hi = -hi, -lo
        L = hi - lo

        def F(x):
            # antiderivative of log x, with 0 log 0 = 0
            x = np.asarray(x, dtype=float)
            with np.errstate(divide="ignore", invalid="ignore"):
                return np.where(x > 0, x * np.log(np.where(x > 0, x, 1.0)) - x, 0.0)

        def psi(t):
            # int log((t - z)/(1 - z)) dz / L over z in [lo, hi]
            t = np.asarray(t, dtype=float)
            return (F(t - lo) - F(t - hi) - (F(1.0 - lo) - F(1.0 - hi))) / L

        def phi(t):
            t = np.asarray(t, dtype=float)
            return t * np.log1p(L / (t - hi)) / L

        m_lo = 0.0
        return TiltingContext(psi, phi, m_lo, 1.0)


class NuAB(MeasureSpec):
    """``nu_{a,b;kappa}`` on ``[0, inf)``."""

    variant = "nu_ab_kappa"

    def __init__(self, a, b, kappa):
        _check_ab(a, b, kappa)
        self.a, self.b, self.kappa = int(a), int(b), float(kappa)

    def params(self):
        return {"a": self.a, "b": self.b, "kappa": self.kappa}

    @property
    def delta(self):
        return self.a - self.b

    def alpha_interval(self):
        return max(0.0, -self.delta * self.kappa), 1.0

    def hull(self):
        """Exact for ``a == b``; otherwise only the lower edge 0 is known."""
        if self.a == self.b:
            return nu_aa_support(self.a, self.kappa)
        return 0.0, np.inf

    def mass_at_zero(self):
        return nu_ab_atom_at_zero(self.a, self.b, self.kappa)

    def s_transform(self, t):
        return nu_ab_s_transform(self.a, self.b, self.kappa, t)

    def _alpha_of(self, s):
        """Solve ``exp(-g'(alpha)) = s`` (increasing in alpha)."""
        lo0, hi0 = self.alpha_interval()
        s = np.atleast_1d(np.asarray(s, dtype=float))
        lo = np.full(s.size, lo0)
        hi = np.full(s.size, hi0)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            for _ in range(200):
                mid = 0.5 * (lo + hi)
                below = nu_ab_exp_neg_gprime(self.a, self.b, self.kappa, mid) < s
                lo = np.where(below, mid, lo)
                hi = np.where(below, hi, mid)
                if np.all(hi - lo <= 1e-15):
                    break
        return 0.5 * (lo + hi)

    def cauchy(self, t):
        """Exact for ``a == b``; otherwise only on ``t < 0`` via the profile."""
        t = np.asarray(t)
        if self.a == self.b:
            return nu_aa_cauchy(self.a, self.kappa, t)
        if np.iscomplexobj(t) or np.any(t >= 0):
            raise UnsupportedError("for a != b the Cauchy transform is only available on t < 0")
        s = -np.atleast_1d(t).astype(float).ravel()
        out = (-(self._alpha_of(s) / s)).reshape(t.shape)
        return float(out) if out.ndim == 0 else out

    def tilting(self):
        # reflected measure on [-inf, 0]: Phi(t) = alpha(t); Psi from the profile
        a, b, kappa = self.a, self.b, self.kappa
        p_star = float(self._alpha_of(np.array([1.0]))[0])
        g_star = float(nu_ab_profile(a, b, kappa, p_star))

        def phi(t):
            t = np.asarray(t, dtype=float)
            return self._alpha_of(t.ravel()).reshape(t.shape)

        def psi(t):
            t = np.asarray(t, dtype=float)
            al = phi(t)
            return nu_ab_profile(a, b, kappa, al) + al * np.log(t) - g_star

        lo, _ = self.alpha_interval()
        return TiltingContext(psi, phi, lo, 1.0)


class MuKappa(MeasureSpec):
    """The mass-``(1 - kappa)`` law with ``G = Y_kappa^{-1}`` on ``[-1, 1]``."""

    variant = "mu_kappa"

    def __init__(self, kappa):
        if not 0 < kappa < 1:
            raise ArgumentError("kappa must lie in (0, 1)")
        self.kappa = float(kappa)

    def params(self):
        return {"kappa": self.kappa}

    def hull(self):
        return mu_kappa_support(self.kappa)

    def cauchy(self, t):
        return mu_kappa_cauchy(self.kappa, t)


_VARIANTS = {
    "dirac_mixture": lambda p: DiracMixture(p["atoms"], p.get("weights")),
    "bernoulli01": lambda p: Bernoulli01(p["kappa"]),
    "uniform": lambda p: Uniform(p["lo"], p["hi"]),
    "nu_ab_kappa": lambda p: NuAB(p["a"], p["b"], p["kappa"]),
    "mu_kappa": lambda p: MuKappa(p["kappa"]),
}


def measure_from_json(obj):
    if isinstance(obj, str):
        obj = json.loads(obj)
    try:
        return _VARIANTS[obj["variant"]](obj.get("params", {}))
    except KeyError as exc:
        raise ArgumentError(f"bad measure spec: missing {exc}") from None


def parse_closed_form(text):
    """Parse ``NAME:params`` as used on the command line.

    ``mu_kappa:K``, ``nu_aa:A:K``, ``nu_ab:A:B:K``, ``bernoulli01:K``,
    ``uniform:LO:HI``, ``dirac:V1,V2,...``.
    """
    name, _, rest = text.partition(":")
    parts = [s for s in rest.split(":") if s != ""]
    try:
        if name == "mu_kappa":
            return MuKappa(float(parts[0]))
        if name == "nu_aa":
            return NuAB(int(parts[0]), int(parts[0]), float(parts[1]))
        if name == "nu_ab":
            return NuAB(int(parts[0]), int(parts[1]), float(parts[2]))
        if name == "bernoulli01":
            return Bernoulli01(float(parts[0]))
        if name == "uniform":
            return Uniform(float(parts[0]), float(parts[1]))
        if name == "dirac":
            return DiracMixture([float(v) for v in parts[0].split(",")])
    except (IndexError, ValueError) as exc:
        raise ArgumentError(f"bad closed-form spec {text!r}: {exc}") from None
    raise ArgumentError(f"unknown closed form {name!r}")

