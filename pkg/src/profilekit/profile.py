"""Coefficient profiles and their large-deviation description.

For a polynomial with roots ``-lambda_k <= 0`` the normalized coefficients
``a_k / P(1)`` are the law of ``S_n = sum Bernoulli(p_k)``, ``p_k = 1/(1+lambda_k)``.
The profile ``g(k/n) = (1/n) log(a_k / P(1))`` therefore tends to minus a rate
function, described through the measure ``M`` of the ``p_k``::

    Psi(t) = int log(1 - y + y t) dM(y),       Phi(t) = t Psi'(t),
    g(alpha) = Psi(t) - alpha log t   where Phi(t) = alpha.

For a measure ``mu`` on ``[-inf, 0]``, ``M`` is its image under
``z -> 1/(1-z)`` and ``Phi(t) = t G_mu(t)``. Consequently
``exp(-g'(alpha)) = t`` solves ``t G(t) = alpha``, which is how profiles and
Cauchy transforms determine each other.
"""

from __future__ import annotations

import contextlib
import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import (
    ArgumentError,
    DegenerateIntervalError,
    DomainError,
    ExtrapolationError,
    RangeError,
    ShapeError,
)
from .logpoly import EmpiricalMeasure, LogPoly, evaluate_log
from .samples import TransformSample

GRID_SIZE = 512
_LOG_T_BOUND = 700.0


@dataclass(frozen=True, eq=False)
class Profile:
    """A sampled profile ``g`` on an increasing grid inside ``[m_lo, m_hi]``.

    ``gprime`` carries exact slopes when the constructor knows them (profiles
    built from a measure). Otherwise slopes are centered differences; when
    ``n`` is known (profiles read off a degree-``n`` polynomial) they also get
    the local-CLT correction described in :meth:`slope_samples`.
    """

    grid: np.ndarray
    g: np.ndarray
    m_lo: float
    m_hi: float
    gprime: np.ndarray | None = None
    n: int | None = None

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        g = np.asarray(self.g, dtype=float)
        if grid.shape != g.shape or grid.ndim != 1 or grid.size < 2:
            raise ArgumentError("grid and g must be matching 1-d arrays of length >= 2")
        if np.any(np.diff(grid) <= 0):
            raise ArgumentError("grid must be strictly increasing")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "g", g)
        if self.gprime is not None:
            object.__setattr__(self, "gprime", np.asarray(self.gprime, dtype=float))

    @property
    def Mg(self):
        return float(np.max(self.g))

    def slope_samples(self, corrected=True):
        """``(alpha, g'(alpha))`` pairs used for interpolation.

        For a finite-``n`` profile, ``log a_k = n g(k/n) + (1/2) log(-g''(k/n)) + O(1/n)``
        (local CLT for the tilted Bernoulli sum), so the centered difference
        overshoots ``g'`` by ``g'''/(2 n g'')``. With ``corrected`` that term is
        estimated from the same samples and removed, taking the slope error
        from ``O(1/n)`` to ``O(1/n^2)``.
        """
        if self.gprime is not None:
            return self.grid, self.gprime
        if self.grid.size < 3:
            raise DegenerateIntervalError("need three grid points for centered slopes")
        x, g = self.grid, self.g
        s = (g[2:] - g[:-2]) / (x[2:] - x[:-2])
        if corrected and self.n is not None and x.size >= 5:
            h = 1.0 / self.n
            d2 = (g[2:] - 2.0 * g[1:-1] + g[:-2]) / (h * h)
            d3 = np.gradient(d2, h)
            with np.errstate(divide="ignore", invalid="ignore"):
                fix = np.where(d2 < 0, d3 / d2, 0.0) * (0.5 * h)
            s = s - fix
        return x[1:-1], s

    def slope_interpolant(self):
        x, s = self.slope_samples()
        return PchipInterpolator(x, s, extrapolate=False)

    def write_csv(self, path):
        x, s = self.slope_samples()
        sl = np.interp(self.grid, x, s, left=np.nan, right=np.nan)
        fh = path if hasattr(path, "write") else Path(path).open("w", newline="")
        with fh if fh is not path else contextlib.nullcontext(fh):
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["alpha", "g", "gprime_exp"])
            for a, gv, sv in zip(self.grid, self.g, sl):
                w.writerow([f"{a:.17g}", f"{gv:.17g}", f"{math.exp(sv):.17g}" if np.isfinite(sv) else "nan"])

    @classmethod
    def read_csv(cls, path, m_lo=None, m_hi=None):
        data = np.genfromtxt(path, delimiter=",", skip_header=1, ndmin=2)
        grid, g = data[:, 0], data[:, 1]
        # a uniform 1/n spacing marks a finite-n profile
        n = None
        if grid.size > 2:
            cand = round(1.0 / (grid[1] - grid[0]))
            if cand > 0 and np.allclose(np.diff(grid), 1.0 / cand, rtol=1e-9, atol=0):
                n = int(cand)
        return cls(grid, g, grid[0] if m_lo is None else m_lo, grid[-1] if m_hi is None else m_hi, n=n)


@dataclass(frozen=True, eq=False)
class TiltingContext:
    """``Psi``, ``Phi`` and the edges ``m_lo = M({1})``, ``m_hi = 1 - M({0})``."""

    psi: Callable
    phi: Callable
    m_lo: float
    m_hi: float
    atoms: np.ndarray | None = None
    weights: np.ndarray | None = None

    @classmethod
    def discrete(cls, y, w, ybar=None):
        """``M = sum w_i delta_{y_i}`` with ``y_i`` in ``[0, 1]``.

        ``ybar = 1 - y`` may be passed when it is known more accurately than
        the subtraction gives it.
        """
        y = np.asarray(y, dtype=float)
        w = np.asarray(w, dtype=float)
        if np.any((y < 0) | (y > 1)):
            raise DomainError("atoms of M must lie in [0, 1]")
        if abs(w.sum() - 1.0) > 1e-12:
            raise ArgumentError("weights of M must sum to 1")
        yb = 1.0 - y if ybar is None else np.asarray(ybar, dtype=float)
        live = (y > 0) & (w > 0)
        yl, wl, bl = y[live], w[live], yb[live]

        # 1 - y + y t written as ybar + y t: no cancellation for tiny t
        def psi(t):
            t = np.asarray(t, dtype=float)
            return np.sum(wl * np.log(bl + yl * t[..., None]), axis=-1)

        def phi(t):
            t = np.asarray(t, dtype=float)
            tt = t[..., None]
            return np.sum(wl * yl * tt / (bl + yl * tt), axis=-1)

        m_lo = float(w[y == 1].sum())
        m_hi = 1.0 - float(w[y == 0].sum())
        return cls(psi, phi, m_lo, m_hi, y, w)

    @classmethod
    def from_measure(cls, mu):
        """Context for an :class:`EmpiricalMeasure` or a closed-form measure.

        Measures carried by ``[0, +inf]`` are reflected first.
        """
        if isinstance(mu, EmpiricalMeasure):
            atoms = mu.atoms
            if mu.infinity_sign == 1:
                atoms = -atoms
            if atoms.size and atoms.max() > 0:
                raise DomainError("measure must live on one half-line")
            y = 1.0 / (1.0 - atoms)
            yb = -atoms / (1.0 - atoms)
            w = np.full(atoms.size, 1.0 / mu.cap)
            if mu.infinity_mass > 0:
                y = np.append(y, 0.0)
                yb = np.append(yb, 1.0)
                w = np.append(w, mu.infinity_mass)
            w = w / w.sum()
            return cls.discrete(y, w, yb)
        if hasattr(mu, "tilting"):
            return mu.tilting()
        raise ArgumentError(f"cannot build a tilting context from {type(mu).__name__}")


def _invert_increasing(fn, targets, lo=-_LOG_T_BOUND, hi=_LOG_T_BOUND, rtol=1e-12, maxiter=200):
    """Solve ``fn(exp(u)) = target`` for ``u`` by vectorized bisection."""
    targets = np.asarray(targets, dtype=float)
    a = np.full(targets.shape, lo)
    b = np.full(targets.shape, hi)
    for _ in range(maxiter):
        mid = 0.5 * (a + b)
        val = fn(np.exp(mid))
        below = val < targets
        a = np.where(below, mid, a)
        b = np.where(below, b, mid)
        # absolute width in log t is relative width in t
        if np.all(b - a <= rtol):
            break
    return 0.5 * (a + b)


def theta_star(ctx: TiltingContext, k, n):
    """Tilt ``theta`` with ``Phi(theta) = k/n``."""
    alpha = np.asarray(k, dtype=float) / n
    if np.any(alpha <= ctx.m_lo) or np.any(alpha >= ctx.m_hi):
        raise RangeError(f"k/n must lie in ({ctx.m_lo}, {ctx.m_hi})")
    u = _invert_increasing(ctx.phi, alpha)
    out = np.exp(u)
    return float(out) if out.ndim == 0 else out


def tilt(probs, theta):
    """Tilted success probabilities ``theta p / (1 - p + p theta)``."""
    p = np.asarray(probs, dtype=float)
    return theta * p / (1.0 - p + p * theta)


def empirical_profile(p: LogPoly, normalize=True):
    """``g(k/n) = (log a_k - log P(1)) / n`` on the coefficient support."""
    lo, hi = p.low, p.degree
    if hi == lo:
        raise DegenerateIntervalError("a single nonzero coefficient has no profile")
    k = np.arange(lo, hi + 1)
    c = p.logc[lo : hi + 1]
    shift = evaluate_log(p, 1.0) if normalize else 0.0
    return Profile(k / p.cap, (c - shift) / p.cap, lo / p.cap, hi / p.cap, n=p.cap)


def ratio_derivative(p: LogPoly) -> TransformSample:
    """Samples ``(k/n, a_{k+1}/a_k)``, the discrete stand-in for ``exp(g')``."""
    lo, hi = p.low, p.degree
    if hi == lo:
        raise DegenerateIntervalError("a single nonzero coefficient has no profile")
    k = np.arange(lo, hi)
    vals = np.exp(p.logc[lo + 1 : hi + 1] - p.logc[lo:hi])
    return TransformSample("exp_gprime", k / p.cap, vals, (lo / p.cap, hi / p.cap))


def profile_from_measure(mu, size=GRID_SIZE):
    """Limit profile of a measure on one half-line, on ``size`` interior points."""
    ctx = mu if isinstance(mu, TiltingContext) else TiltingContext.from_measure(mu)
    if not ctx.m_hi - ctx.m_lo > 1e-12:
        raise DegenerateIntervalError("mass at 0 and at infinity leave no interval")
    i = np.arange(1, size + 1)
    alpha = ctx.m_lo + (ctx.m_hi - ctx.m_lo) * i / (size + 1)
    u = _invert_increasing(ctx.phi, alpha)
    g = ctx.psi(np.exp(u)) - alpha * u
    return Profile(alpha, g, ctx.m_lo, ctx.m_hi, gprime=-u)


def _tail(prof, t, lo_t, hi_t, a_lo, a_hi):
    # the limits of t G(t) at 0 and infinity are m_lo and m_hi; approach is ~t and ~1/t
    out = np.empty_like(t)
    small = t < lo_t
    out[small] = prof.m_lo + (a_lo - prof.m_lo) * t[small] / lo_t
    big = ~small
    out[big] = prof.m_hi - (prof.m_hi - a_hi) * hi_t / t[big]
    return out


def cauchy_from_profile(prof: Profile, t, extrapolate=False):
    """``G(t) = alpha/t`` where ``exp(-g'(alpha)) = t``, for ``t > 0``.

    Outside the sampled range an :class:`ExtrapolationError` reports the
    range, unless ``extrapolate`` asks for the endpoint tail model.
    """
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0):
        raise DomainError("cauchy_from_profile needs t > 0")
    x, s = prof.slope_samples()
    spl = PchipInterpolator(x, s, extrapolate=False)
    t_lo, t_hi = math.exp(-s[0]), math.exp(-s[-1])
    flat = np.atleast_1d(t).astype(float)
    outside = (flat < t_lo) | (flat > t_hi)
    if outside.any() and not extrapolate:
        raise ExtrapolationError(f"t outside sampled range [{t_lo:.6g}, {t_hi:.6g}]", t_lo, t_hi)
    alpha = np.empty_like(flat)
    inside = ~outside
    if inside.any():
        target = -np.log(flat[inside])
        a = np.full(target.shape, x[0])
        b = np.full(target.shape, x[-1])
        for _ in range(100):
            mid = 0.5 * (a + b)
            right = spl(mid) > target  # g' decreasing: root lies to the right
            a = np.where(right, mid, a)
            b = np.where(right, b, mid)
            if np.all(b - a <= 1e-12):
                break
        alpha[inside] = 0.5 * (a + b)
    if outside.any():
        alpha[outside] = _tail(prof, flat[outside], t_lo, t_hi, x[0], x[-1])
    out = (alpha / flat).reshape(t.shape)
    return float(out) if out.ndim == 0 else out


def legendre(alpha, f, u, tol=1e-6):
    """``sup_i (f_i + alpha_i u)`` for a concave sample ``f`` on ``alpha``."""
    alpha = np.asarray(alpha, dtype=float)
    f = np.asarray(f, dtype=float)
    if alpha.size >= 3:
        slopes = np.diff(f) / np.diff(alpha)
        rise = np.diff(slopes)
        scale = 1.0 + np.abs(slopes[1:])
        if np.any(rise > tol * scale):
            raise ShapeError(f"input is not concave (max slope increase {rise.max():.3e})")
    u = np.asarray(u, dtype=float)
    flat = np.atleast_1d(u).ravel()
    out = np.empty(flat.size)
    step = max(1, 4_000_000 // max(alpha.size, 1))
    for s in range(0, flat.size, step):
        blk = flat[s : s + step]
        out[s : s + step] = np.max(f[None, :] + alpha[None, :] * blk[:, None], axis=1)
    out = out.reshape(u.shape)
    return float(out) if out.ndim == 0 else out
