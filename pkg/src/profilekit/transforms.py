"""Cauchy, R, psi and S transforms, and their expressions through profiles.

Normalizations (measures may carry mass at infinity)::

    G(t)      = int dmu(z) / (t - z)
    R(s)      = s G^{-1}(s) - 1                 mu on [-inf, A]
    psi(t)    = G(1/t) / t - 1                  nu on [0, +inf], t < 0
    S(t)      = (t + 1) / t * psi^{-1}(t)

This ``R`` is ``s`` times the more common R-transform; it is additive under
free additive convolution all the same. ``S`` is multiplicative under free
multiplicative convolution.

A :class:`~profilekit.logpoly.LogPoly` is handled from its coefficients on the
side of the axis where every term is positive: for stored ``P`` with roots
``<= 0`` and ``tau > 0``, ``tau G_P(tau)`` is the mean of ``k/cap`` under the
weights ``a_k tau^k``. This needs no root finding, so it works at any degree.
"""

from __future__ import annotations

import numpy as np

from .closedform import DiracMixture, MeasureSpec
from .errors import (
    ArgumentError,
    DegenerateIntervalError,
    DomainError,
    ExtrapolationError,
    RangeError,
    SingularityError,
)
from .logpoly import EmpiricalMeasure, LogPoly, empirical_measure
from .profile import Profile, _invert_increasing
from .rootspace import RootSet
from .samples import TransformSample

S_ZERO_STEP = 1e-8
_CHUNK = 2_000_000


def _out(x):
    x = np.asarray(x)
    return x.item() if x.ndim == 0 else x


# ---------------------------------------------------------------------------
# coefficient route


def _tilted_mean(p: LogPoly, tau, weights_of_k):
    tau = np.asarray(tau, dtype=float)
    if np.any(tau <= 0):
        raise DomainError("tau must be > 0")
    u = np.log(tau).ravel()
    idx = np.nonzero(np.isfinite(p.logc))[0]
    lc = p.logc[idx]
    k = idx.astype(float)
    vals = weights_of_k(k)
    out = np.empty(u.size)
    step = max(1, _CHUNK // idx.size)
    for s in range(0, u.size, step):
        L = lc[None, :] + k[None, :] * u[s : s + step, None]
        w = np.exp(L - L.max(axis=1, keepdims=True))
        out[s : s + step] = (w @ vals) / w.sum(axis=1)
    return out.reshape(tau.shape)


def poly_phi(p: LogPoly, tau):
    """``tau G_P(tau)`` for ``tau > 0``: the mean of ``k/cap`` under weights ``a_k tau^k``."""
    return _out(_tilted_mean(p, tau, lambda k: k / p.cap))


def poly_phi_complement(p: LogPoly, tau):
    """``1 - tau G_P(tau)`` computed without cancellation."""
    return _out(_tilted_mean(p, tau, lambda k: (p.cap - k) / p.cap))


def _poly_g0(p: LogPoly):
    """``G_P(0+)`` for the stored polynomial (``inf`` when 0 is a root)."""
    if not np.isfinite(p.logc[0]):
        return np.inf
    if p.logc.size < 2 or not np.isfinite(p.logc[1]):
        return 0.0
    return float(np.exp(p.logc[1] - p.logc[0])) / p.cap


# ---------------------------------------------------------------------------
# measure bookkeeping


def _as_measure(mu):
    if isinstance(mu, RootSet):
        return mu.measure()
    return mu


def _edge_masses(nu):
    """``(nu({0}), nu({+inf}))`` for a measure on ``[0, +inf]``."""
    if isinstance(nu, LogPoly):
        if not nu.reflected and nu.degree > nu.low:
            raise DomainError("psi/S need a measure on [0, +inf]: pass a reflected polynomial")
        return nu.low / nu.cap, (nu.cap - nu.degree) / nu.cap
    if isinstance(nu, EmpiricalMeasure):
        if nu.atoms.size and nu.atoms[0] < 0:
            raise DomainError("psi/S need a measure on [0, +inf]")
        at_inf = nu.infinity_mass if nu.infinity_sign == 1 else 0.0
        if nu.infinity_sign == -1 and nu.infinity_mass > 0:
            raise DomainError("mass at -inf is outside [0, +inf]")
        return float(np.sum(nu.atoms == 0)) / nu.cap, at_inf
    if isinstance(nu, MeasureSpec):
        lo, _ = nu.hull()
        if lo < 0:
            raise DomainError("psi/S need a measure on [0, +inf]")
        return nu.mass_at_zero(), nu.mass_at_infinity()
    raise ArgumentError(f"unsupported measure type {type(nu).__name__}")


# ---------------------------------------------------------------------------
# Cauchy transform


def _empirical_cauchy(mu: EmpiricalMeasure, t):
    t = np.asarray(t)
    flat = np.atleast_1d(t).ravel()
    atoms = mu.atoms
    if atoms.size == 0:
        return _out(np.zeros(t.shape, dtype=flat.dtype))
    out = np.empty(flat.size, dtype=np.result_type(flat, float))
    step = max(1, _CHUNK // atoms.size)
    for s in range(0, flat.size, step):
        d = flat[s : s + step, None] - atoms[None, :]
        if np.any(np.abs(d) < 1e-12):
            raise SingularityError("t within 1e-12 of an atom")
        out[s : s + step] = np.sum(1.0 / d, axis=1) / mu.cap
    return _out(out.reshape(t.shape))


def cauchy(mu, t):
    """``G_mu(t)``; atoms at infinity contribute nothing.

    ``mu`` may be an :class:`EmpiricalMeasure`, a :class:`RootSet`, a
    closed-form :class:`~profilekit.closedform.MeasureSpec` or a
    :class:`LogPoly`. For a polynomial, points on the stable side of the axis
    (``t > 0`` for nonpositive roots, ``t < 0`` for reflected ones) are
    evaluated from the coefficients; other points go through its roots.
    """
    mu = _as_measure(mu)
    if isinstance(mu, LogPoly):
        t = np.asarray(t)
        if not np.iscomplexobj(t):
            tt = np.asarray(t, dtype=float)
            if not mu.reflected and np.all(tt > 0):
                return _out(np.asarray(poly_phi(mu, tt)) / tt)
            if mu.reflected and np.all(tt < 0):
                return _out(np.asarray(poly_phi(mu, -tt)) / tt)
        return _empirical_cauchy(empirical_measure(mu), t)
    if isinstance(mu, EmpiricalMeasure):
        return _empirical_cauchy(mu, t)
    if isinstance(mu, MeasureSpec):
        return mu.cauchy(t)
    raise ArgumentError(f"unsupported measure type {type(mu).__name__}")


# ---------------------------------------------------------------------------
# R transform


def _right_edge(mu):
    """``(A, G, G(A+))``: right support edge, an evaluator on ``(A, inf)``, and the edge value."""
    if isinstance(mu, LogPoly):
        if not mu.reflected:
            g0 = _poly_g0(mu)
            return 0.0, lambda t: cauchy(mu, t), g0
        if mu.degree < mu.cap:
            raise DomainError("R needs a measure on [-inf, A]; this one has mass at +inf")
        mu = empirical_measure(mu)
    if isinstance(mu, EmpiricalMeasure):
        if mu.infinity_sign == 1 and mu.infinity_mass > 0:
            raise DomainError("R needs a measure on [-inf, A]; this one has mass at +inf")
        if mu.atoms.size == 0:
            raise DegenerateIntervalError("all mass at -inf")
        return float(mu.atoms[-1]), lambda t: _empirical_cauchy(mu, t), np.inf
    if isinstance(mu, MeasureSpec):
        _, A = mu.hull()
        probe = A + 1e-12 * (1.0 + abs(A))
        try:
            gA = float(mu.cauchy(probe))
        except SingularityError:
            gA = np.inf
        return A, mu.cauchy, gA
    raise ArgumentError(f"unsupported measure type {type(mu).__name__}")


def _invert_decreasing(G, s, A, rtol=1e-15, maxiter=400):
    """Solve ``G(t) = s`` on ``(A, inf)`` for decreasing ``G``, vectorized over ``s``."""
    s = np.asarray(s, dtype=float)
    flat = s.ravel()
    d = np.ones(flat.size)
    for _ in range(2000):
        high = np.asarray(G(A + d)) >= flat
        if not high.any():
            break
        d = np.where(high, 2.0 * d, d)
    lo = np.zeros(flat.size)
    hi = d
    for _ in range(maxiter):
        mid = 0.5 * (lo + hi)
        above = np.asarray(G(A + mid)) > flat
        lo = np.where(above, mid, lo)
        hi = np.where(above, hi, mid)
        if np.all(hi - lo <= rtol * (np.abs(A) + hi)):
            break
    return (A + 0.5 * (lo + hi)).reshape(s.shape)


def r_transform(mu, s):
    """``R(s) = s G^{-1}(s) - 1`` for ``s`` in ``(0, G(A+))``."""
    mu = _as_measure(mu)
    s = np.asarray(s, dtype=float)
    if np.any(s <= 0):
        raise RangeError("R needs s > 0")
    A, G, gA = _right_edge(mu)
    if np.any(s >= gA):
        if isinstance(mu, LogPoly):
            # beyond the coefficient route: the inverse lies left of 0
            return r_transform(empirical_measure(mu), s)
        raise RangeError(f"s must be below G(A+) = {gA:.6g}")
    t = _invert_decreasing(G, s, A)
    return _out(s * t - 1.0)


# ---------------------------------------------------------------------------
# psi and S transforms


def _psi_tau(nu):
    """``tau -> psi(-1/tau)`` for ``tau > 0`` (increasing in ``tau``).

    Written so that nothing cancels as ``psi`` approaches its upper end.
    """
    if isinstance(nu, LogPoly):
        if not nu.reflected:
            raise DomainError("psi/S need a reflected polynomial")
        return lambda tau: -np.asarray(poly_phi_complement(nu, tau))
    if isinstance(nu, (EmpiricalMeasure, DiracMixture)):
        if isinstance(nu, EmpiricalMeasure):
            r, w = nu.atoms, np.full(nu.atoms.size, 1.0 / nu.cap)
        else:
            r, w = nu.atoms, nu.weights
        at_inf = 1.0 - float(w.sum())

        # sum w/(1 - r t) - 1 = -sum w r/(tau + r) - nu({+inf})
        def f(tau):
            tau = np.asarray(tau, dtype=float)
            return -np.sum(w * r / (tau[..., None] + r), axis=-1) - at_inf

        return f
    if isinstance(nu, MeasureSpec):

        def f(tau):
            tau = np.asarray(tau, dtype=float)
            # G(1/t)/t with t = -1/tau is -tau G(-tau)
            return -tau * np.asarray(nu.cauchy(-tau)) - 1.0

        return f
    raise ArgumentError(f"unsupported measure type {type(nu).__name__}")


def psi_transform(nu, t):
    """``psi(t) = G(1/t)/t - 1`` for ``t < 0``; increasing onto ``(nu({0}) - 1, -nu({+inf}))``."""
    nu = _as_measure(nu)
    t = np.asarray(t, dtype=float)
    if np.any(t >= 0):
        raise DomainError("psi needs t < 0")
    _edge_masses(nu)
    return _out(np.asarray(_psi_tau(nu)(-1.0 / t)))


def psi_inverse(nu, v):
    nu = _as_measure(nu)
    v = np.asarray(v, dtype=float)
    at0, atinf = _edge_masses(nu)
    if np.any(v <= at0 - 1.0) or np.any(v >= -atinf):
        raise RangeError(f"argument must lie in ({at0 - 1.0:.6g}, {-atinf:.6g})")
    u = _invert_increasing(_psi_tau(nu), v)
    return _out(-np.exp(-u))


def s_transform(nu, t):
    """``S(t) = (t+1)/t psi^{-1}(t)`` on ``(nu({0}) - 1, -nu({+inf}))``.

    ``t = 0`` is the upper end of that interval when ``nu({+inf}) = 0``; the
    removable singularity there is filled from the left, extrapolating the
    values at ``-1e-8`` and ``-2e-8`` linearly.
    """
    nu = _as_measure(nu)
    t = np.asarray(t, dtype=float)
    flat = np.atleast_1d(t).ravel()
    out = np.empty(flat.size)
    zero = flat == 0
    nz = ~zero
    if nz.any():
        tv = flat[nz]
        out[nz] = (tv + 1.0) / tv * np.asarray(psi_inverse(nu, tv))
    if zero.any():
        h = np.array([-S_ZERO_STEP, -2.0 * S_ZERO_STEP])
        v = (h + 1.0) / h * np.asarray(psi_inverse(nu, h))
        out[zero] = 2.0 * v[0] - v[1]
    return _out(out.reshape(t.shape))


# ---------------------------------------------------------------------------
# profile routes


def _gprime(prof: Profile, alpha):
    x, s = prof.slope_samples()
    alpha = np.asarray(alpha, dtype=float)
    if np.any(alpha < x[0]) or np.any(alpha > x[-1]):
        raise ExtrapolationError(f"alpha outside sampled slopes [{x[0]:.6g}, {x[-1]:.6g}]", x[0], x[-1])
    return prof.slope_interpolant()(alpha)


def s_from_profile(prof: Profile, t):
    """``S(t) = -(t+1)/t exp(g'(t+1))`` for the reflection of the profile's measure."""
    t = np.asarray(t, dtype=float)
    alpha = t + 1.0
    if np.any(alpha <= prof.m_lo) or np.any(alpha >= prof.m_hi) or np.any(t == 0):
        raise RangeError(f"t + 1 must lie in ({prof.m_lo:.6g}, {prof.m_hi:.6g})")
    return _out(-(alpha / t) * np.exp(_gprime(prof, alpha)))


def r_from_profile(prof: Profile, s, tol=1e-12):
    """``R(s) = alpha - 1`` where ``alpha exp(g'(alpha)) = s``."""
    s = np.asarray(s, dtype=float)
    x, _ = prof.slope_samples()
    spl = prof.slope_interpolant()

    def h(a):
        return a * np.exp(spl(a))

    top, bottom = float(h(x[0])), float(h(x[-1]))
    if np.any(s <= bottom) or np.any(s >= top):
        raise RangeError(f"s must lie in ({bottom:.6g}, {top:.6g}) on the sampled grid")
    flat = s.ravel()
    lo = np.full(flat.size, x[0])
    hi = np.full(flat.size, x[-1])
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        right = h(mid) > flat  # h decreasing
        lo = np.where(right, mid, lo)
        hi = np.where(right, hi, mid)
        if np.all(hi - lo <= tol):
            break
    return _out((0.5 * (lo + hi) - 1.0).reshape(s.shape))


def s_power(S: TransformSample, p) -> TransformSample:
    """Pointwise ``S^p``: the S-transform of the ``p``-th free multiplicative power."""
    if S.kind != "S":
        raise ArgumentError("s_power needs an S sample")
    if p < 1:
        raise ArgumentError("power must be >= 1")
    if np.any(S.values <= 0):
        raise DomainError("S must be positive to take powers")
    return TransformSample("S", S.args, S.values**p, S.domain)


# ---------------------------------------------------------------------------
# sampling


def sample(kind, mu, args) -> TransformSample:
    """Tabulate a transform of ``mu`` (or of a :class:`Profile`) on ``args``."""
    args = np.asarray(args, dtype=float)
    if isinstance(mu, Profile):
        if kind == "S":
            vals = s_from_profile(mu, args)
        elif kind == "R":
            vals = r_from_profile(mu, args)
        elif kind == "G":
            from .profile import cauchy_from_profile

            vals = cauchy_from_profile(mu, args)
        else:
            raise ArgumentError(f"kind {kind!r} is not available from a profile")
        return TransformSample(kind, args, np.atleast_1d(vals), (float(args.min()), float(args.max())))
    funcs = {"G": cauchy, "R": r_transform, "psi": psi_transform, "S": s_transform}
    if kind not in funcs:
        raise ArgumentError(f"unknown transform kind {kind!r}")
    vals = np.atleast_1d(funcs[kind](mu, args))
    return TransformSample(kind, args, vals, (float(args.min()), float(args.max())))


__all__ = [
    "TransformSample",
    "cauchy",
    "poly_phi",
    "r_transform",
    "psi_transform",
    "psi_inverse",
    "s_transform",
    "s_from_profile",
    "r_from_profile",
    "s_power",
    "sample",
]
