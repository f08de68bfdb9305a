"""Real-rooted polynomials stored by the logs of their coefficients.

A :class:`LogPoly` with ``cap = n`` holds ``logc[k] = log a_k`` for the
polynomial ``P(x) = sum_k a_k x^k`` whose roots are all ``<= 0``, so every
stored coefficient is nonnegative (``-inf`` marks a zero coefficient). With
``reflected=True`` the same numbers describe the nonnegative-rooted
``Q(x) = (-1)^n P(-x) = sum_k (-1)^(n-k) a_k x^k``. Evaluation and root
extraction always act on the stored ``P``; the flag only decides whether the
empirical measure reads the roots as ``r`` or ``-r``.

``cap`` may exceed the degree. The missing ``cap - deg`` roots are read as
sitting at ``-inf`` (or ``+inf`` when reflected) with mass ``1/cap`` each.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.special import gammaln

from . import kernels
from ._config import MAX_DEGREE
from .errors import (
    ArgumentError,
    DegreeError,
    DomainError,
    RootIsolationError,
    ZeroPolynomialError,
)

NEG_INF = -np.inf
_EPS = np.finfo(float).eps
CLUSTER_TOL = 1e-10
BISECT_RTOL = 1e-9


@lru_cache(maxsize=8)
def _logfact_cached(n):
    arr = gammaln(np.arange(n + 1, dtype=float) + 1.0)
    arr.setflags(write=False)
    return arr


def logfact(n):
    """``log k!`` for ``k = 0..n`` (shared table, read-only)."""
    # round the table size up so nearby n share one cached array
    size = max(64, 1 << int(math.ceil(math.log2(max(n, 1) + 1))))
    return _logfact_cached(size)[: n + 1]


def lbinom(n, k):
    """``log C(n, k)``; ``-inf`` outside ``0 <= k <= n``."""
    k = np.asarray(k)
    lf = logfact(n)
    kc = np.clip(k, 0, n)
    out = lf[n] - lf[kc] - lf[n - kc]
    return np.where((k < 0) | (k > n), NEG_INF, out)


@dataclass(frozen=True, eq=False)
class LogPoly:
    """Log-coefficient representation of a real-rooted polynomial."""

    cap: int
    logc: np.ndarray
    reflected: bool = False

    def __post_init__(self):
        logc = np.array(self.logc, dtype=float)
        if logc.ndim != 1 or logc.shape[0] != self.cap + 1:
            raise ArgumentError(f"logc must have length cap+1={self.cap + 1}, got {logc.shape}")
        if self.cap < 0:
            raise ArgumentError("cap must be nonnegative")
        if np.isnan(logc).any() or np.isposinf(logc).any():
            raise ArgumentError("logc entries must be finite or -inf")
        fin = np.nonzero(np.isfinite(logc))[0]
        if fin.size == 0:
            raise ZeroPolynomialError("all coefficients are zero")
        if fin[-1] - fin[0] + 1 != fin.size:
            # real-rooted with roots <= 0 forces a gap-free support
            raise ArgumentError("coefficient support has internal zeros")
        logc.setflags(write=False)
        object.__setattr__(self, "logc", logc)
        object.__setattr__(self, "cap", int(self.cap))
        object.__setattr__(self, "reflected", bool(self.reflected))

    @property
    def degree(self) -> int:
        return int(np.nonzero(np.isfinite(self.logc))[0][-1])

    @property
    def low(self) -> int:
        """Multiplicity of the root at 0 (lowest nonzero coefficient index)."""
        return int(np.nonzero(np.isfinite(self.logc))[0][0])

    def coefficients(self):
        """Linear-scale coefficients of the stored polynomial (may overflow)."""
        with np.errstate(over="ignore"):
            return np.exp(self.logc)

    def signed_coefficients(self):
        """Coefficients of the polynomial this object represents."""
        c = self.coefficients()
        if self.reflected:
            k = np.arange(self.cap + 1)
            c = c * np.where((self.cap - k) % 2 == 0, 1.0, -1.0)
        return c

    def with_cap(self, cap):
        if cap < self.degree:
            raise ArgumentError(f"cap {cap} below degree {self.degree}")
        logc = np.full(cap + 1, NEG_INF)
        logc[: self.degree + 1] = self.logc[: self.degree + 1]
        return LogPoly(cap, logc, self.reflected)

    def same_as(self, other, atol=0.0):
        if self.cap != other.cap or self.reflected != other.reflected:
            return False
        a, b = self.logc, other.logc
        if not np.array_equal(np.isfinite(a), np.isfinite(b)):
            return False
        m = np.isfinite(a)
        return bool(np.all(np.abs(a[m] - b[m]) <= atol))

    def to_json(self):
        vals = [float(v) if np.isfinite(v) else "-inf" for v in self.logc]
        return {"cap": self.cap, "reflected": self.reflected, "logc": vals}

    def dumps(self):
        # json emits repr(float), the shortest string that round-trips
        return json.dumps(self.to_json())

    @classmethod
    def from_json(cls, obj):
        if isinstance(obj, str):
            obj = json.loads(obj)
        vals = [NEG_INF if v in ("-inf", "-Infinity") else float(v) for v in obj["logc"]]
        return cls(int(obj["cap"]), np.array(vals), bool(obj.get("reflected", False)))


@dataclass(frozen=True, eq=False)
class EmpiricalMeasure:
    """Uniform atoms of weight ``1/cap`` plus the mass pushed to infinity."""

    atoms: np.ndarray
    cap: int
    infinity_mass: float
    infinity_sign: int = -1
    _check: bool = field(default=True, repr=False)

    def __post_init__(self):
        atoms = np.sort(np.asarray(self.atoms, dtype=float))
        atoms.setflags(write=False)
        object.__setattr__(self, "atoms", atoms)
        if self.infinity_sign not in (-1, 1):
            raise ArgumentError("infinity_sign must be +1 or -1")
        if self._check and abs(atoms.size / self.cap + self.infinity_mass - 1.0) > 1e-12:
            raise ArgumentError("atom count inconsistent with infinity_mass")

    @property
    def weight(self):
        return 1.0 / self.cap

    @property
    def finite_mass(self):
        return self.atoms.size / self.cap

    @classmethod
    def from_roots(cls, roots, cap=None, infinity_sign=-1):
        roots = np.asarray(roots, dtype=float)
        cap = roots.size if cap is None else int(cap)
        if cap < roots.size:
            raise ArgumentError("cap smaller than the number of roots")
        return cls(roots, cap, (cap - roots.size) / cap, infinity_sign)


def _check_cap(cap):
    if cap > MAX_DEGREE:
        raise ArgumentError(f"cap {cap} exceeds the supported maximum {MAX_DEGREE}")


def from_roots(roots, cap=None, reflected=False):
    """Build the monic polynomial with the given roots.

    With ``reflected=False`` the roots must be ``<= 0``; with ``reflected=True``
    they must be ``>= 0`` and the result stores ``prod(x + r)``.
    """
    roots = np.asarray(roots, dtype=float).ravel()
    if np.isnan(roots).any():
        raise DomainError("NaN root")
    cap = roots.size if cap is None else int(cap)
    if cap < roots.size:
        raise ArgumentError(f"cap {cap} < number of roots {roots.size}")
    _check_cap(cap)
    if reflected:
        if (roots < 0).any():
            raise DomainError("reflected construction needs nonnegative roots")
        lam = roots
    else:
        if (roots > 0).any():
            raise DomainError(f"positive root {roots.max()!r}; roots must be <= 0")
        lam = -roots
    with np.errstate(divide="ignore"):
        loglam = np.log(lam)
    return LogPoly(cap, kernels.from_roots_log(loglam, cap), reflected)


def binomial(n, shift=1.0, reflected=True):
    """``(x + shift)^n`` built from exact log-binomials.

    ``binomial(n)`` is the reflected ``(x - 1)^n``, the unit for the
    multiplicative convolution.
    """
    _check_cap(n)
    k = np.arange(n + 1)
    logc = lbinom(n, k) + (n - k) * math.log(shift) if shift != 1.0 else lbinom(n, k)
    return LogPoly(n, np.asarray(logc, dtype=float), reflected)


def monomial(n, k=None, cap=None):
    """``x^k`` with cap ``cap`` (defaults: ``k = cap = n``)."""
    cap = n if cap is None else cap
    k = n if k is None else k
    logc = np.full(cap + 1, NEG_INF)
    logc[k] = 0.0
    return LogPoly(cap, logc)


def evaluate_log(p: LogPoly, x):
    """``log P(x)`` for ``x > 0``."""
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise DomainError("evaluate_log needs x > 0")
    lp, _ = kernels.signed_groups(p.logc, x.ravel())
    out = lp.reshape(x.shape)
    return float(out) if out.ndim == 0 else out


def _classify(lp, ln, rtol):
    big = np.maximum(lp, ln)
    small = np.minimum(lp, ln)
    # relative size of the difference; 0 when the groups cancel
    with np.errstate(invalid="ignore"):
        gap = -np.expm1(small - big)
    sign = np.where(lp >= ln, 1, -1)
    with np.errstate(divide="ignore"):
        logabs = big + np.log(np.where(gap > 0, gap, 1.0))
    zero = (gap <= rtol) | np.isneginf(big)
    sign = np.where(zero, 0, sign)
    logabs = np.where(zero, NEG_INF, logabs)
    return sign.astype(int), logabs


def evaluate_signed(p: LogPoly, x, rtol=1e-14):
    """Sign and ``log|P(x)|`` for real ``x``.

    Positive and negative terms are summed separately; a relative cancellation
    below ``rtol`` reports sign 0 and ``-inf``.
    """
    x = np.asarray(x, dtype=float)
    lp, ln = kernels.signed_groups(p.logc, x.ravel())
    s, la = _classify(lp, ln, rtol)
    if x.ndim == 0:
        return int(s[0]), float(la[0])
    return s.reshape(x.shape), la.reshape(x.shape)


def derivative(p: LogPoly, b: int = 1):
    """``(d/dx)^b P`` with the cap lowered by ``b``."""
    if b < 0:
        raise ArgumentError("derivative order must be nonnegative")
    if b == 0:
        return p
    if p.degree < b:
        raise DegreeError(f"degree {p.degree} < derivative order {b}")
    lf = logfact(p.cap)
    k = np.arange(p.cap - b + 1)
    logc = p.logc[b:] + (lf[k + b] - lf[k])
    return LogPoly(p.cap - b, logc, p.reflected)


def apply_Aab(p: LogPoly, a: int, b: int, scale_n: float, cap=None):
    """Apply ``scale_n^(-b) x^a (d/dx)^b`` coefficientwise.

    The monomial ``x^j`` (``j >= b``) maps to ``j!/(j-b)! n^(-b) x^(j+a-b)``.
    The cap moves by ``a - b`` unless an explicit ``cap`` is given.
    """
    if a < 0 or b < 0:
        raise ArgumentError("a and b must be nonnegative")
    if p.degree < b:
        raise ZeroPolynomialError(f"degree {p.degree} < b={b}: the result is zero")
    delta = a - b
    new_cap = p.cap + delta if cap is None else int(cap)
    if new_cap < p.degree + delta:
        raise ArgumentError("cap too small for the result")
    lf = logfact(p.cap)
    j = np.arange(b, p.cap + 1)
    vals = p.logc[j] + (lf[j] - lf[j - b]) - b * math.log(scale_n)
    logc = np.full(new_cap + 1, NEG_INF)
    idx = j + delta
    keep = idx <= new_cap
    logc[idx[keep]] = vals[keep]
    return LogPoly(new_cap, logc, p.reflected)


def shift(p: LogPoly, s: int, cap=None):
    """Multiply by ``x^s``; negative ``s`` divides (requires ``x^|s|`` to divide P)."""
    if s < 0 and p.low < -s:
        raise ArgumentError(f"x^{-s} does not divide the polynomial")
    new_cap = p.cap + s if cap is None else int(cap)
    if p.degree + s > new_cap:
        raise ArgumentError("cap too small for the shifted polynomial")
    logc = np.full(new_cap + 1, NEG_INF)
    lo, hi = p.low, p.degree
    logc[lo + s : hi + s + 1] = p.logc[lo : hi + 1]
    return LogPoly(new_cap, logc, p.reflected)


def is_log_concave(p: LogPoly, tol=1e-9):
    """Newton's inequalities on the support: second differences of logc <= tol."""
    lo, hi = p.low, p.degree
    c = p.logc[lo : hi + 1]
    if c.size < 3:
        return True
    return bool(np.all(c[2:] - 2 * c[1:-1] + c[:-2] <= tol))


# ---------------------------------------------------------------------------
# roots: interlacing ladder over the derivative chain


def _auto_rtol(level_logc, core_logc):
    d = level_logc.size - 1
    scale = 1.0 + np.max(np.abs(level_logc)) + math.sqrt(d + 1) * (1.0 + np.max(np.abs(core_logc)))
    return max(1e-14, 8.0 * _EPS * scale)


def _signs(c, xs, rtol):
    lp, ln = kernels.signed_groups(c, xs)
    s, _ = _classify(lp, ln, rtol)
    return s


def _bisect(c, cd, lo, hi, s_lo, rtol):
    """Refine brackets [lo, hi] with P(lo) of sign s_lo. Returns the roots."""
    lo = lo.astype(float).copy()
    hi = hi.astype(float).copy()
    x = 0.5 * (lo + hi)
    done = np.zeros(lo.size, dtype=bool)
    for _ in range(200):
        act = np.nonzero(~done)[0]
        if act.size == 0:
            break
        xm = 0.5 * (lo[act] + hi[act])
        s = _signs(c, xm, rtol)
        hit = s == 0
        left = s == s_lo[act]
        lo[act] = np.where(left & ~hit, xm, lo[act])
        hi[act] = np.where(~left & ~hit, xm, hi[act])
        x[act] = np.where(hit, xm, 0.5 * (lo[act] + hi[act]))
        width = hi[act] - lo[act]
        fin = hit | (width <= BISECT_RTOL * (1.0 + np.abs(xm)))
        done[act[fin]] = True
    # Newton polish within the final brackets (at most 8 steps)
    for _ in range(8):
        lp, ln = kernels.signed_groups(c, x)
        s, la = _classify(lp, ln, 0.0)
        dp, dn = kernels.signed_groups(cd, x)
        sd, lda = _classify(dp, dn, 0.0)
        ok = (s != 0) & (sd != 0)
        step = np.where(ok, s * sd * np.exp(np.where(ok, la - lda, 0.0)), 0.0)
        xn = x - step
        inside = (xn >= lo) & (xn <= hi)
        moved = ok & inside
        if not moved.any():
            break
        x = np.where(moved, xn, x)
        if np.all(np.abs(step[moved]) <= 4 * _EPS * (1.0 + np.abs(x[moved]))):
            break
    return x


def _merge(z, m):
    order = np.argsort(z, kind="stable")
    z, m = z[order], m[order]
    out_z, out_m = [z[0]], [m[0]]
    for zi, mi in zip(z[1:], m[1:]):
        if abs(zi - out_z[-1]) <= CLUSTER_TOL * (1.0 + abs(zi)):
            tot = out_m[-1] + mi
            out_z[-1] = (out_z[-1] * out_m[-1] + zi * mi) / tot
            out_m[-1] = tot
        else:
            out_z.append(zi)
            out_m.append(mi)
    return np.array(out_z), np.array(out_m, dtype=np.int64)


def _ladder_step(c, cd, z, mz, level, rtol):
    deg = c.size - 1
    s_neg_inf = 1 if deg % 2 == 0 else -1
    sz = _signs(c, z, rtol)
    new_z, new_m = [], []
    for zi, mi, si in zip(z, mz, sz):
        if si == 0:
            new_z.append(zi)
            new_m.append(mi + 1)
        elif mi > 1:
            raise RootIsolationError(
                f"level {level}: multiple derivative root at {zi:.17g} is not a root",
                level=level,
                interval=(zi, zi),
            )
    blo, bhi, bs = [], [], []
    # outer left bracket, grown geometrically
    if sz[0] != 0:
        if sz[0] == s_neg_inf:
            raise RootIsolationError(
                f"level {level}: no sign change on (-inf, {z[0]:.17g})",
                level=level,
                interval=(-np.inf, z[0]),
            )
        w = max(1.0, abs(z[0]))
        left = z[0] - w
        for _ in range(2100):
            sl = _signs(c, np.array([left]), rtol)[0]
            if sl == s_neg_inf:
                break
            if sl == 0:
                break
            w *= 2.0
            left = z[0] - w
        else:
            raise RootIsolationError(
                f"level {level}: left bracket did not close", level=level, interval=(-np.inf, z[0])
            )
        if sl == 0:
            new_z.append(left)
            new_m.append(1)
        else:
            blo.append(left)
            bhi.append(z[0])
            bs.append(s_neg_inf)
    for i in range(z.size - 1):
        a, b = sz[i], sz[i + 1]
        if a == 0 or b == 0:
            continue
        if a == b:
            raise RootIsolationError(
                f"level {level}: no sign change on ({z[i]:.17g}, {z[i + 1]:.17g})",
                level=level,
                interval=(z[i], z[i + 1]),
            )
        blo.append(z[i])
        bhi.append(z[i + 1])
        bs.append(a)
    if sz[-1] != 0:
        if sz[-1] == 1:
            raise RootIsolationError(
                f"level {level}: no sign change on ({z[-1]:.17g}, 0)",
                level=level,
                interval=(z[-1], 0.0),
            )
        blo.append(z[-1])
        bhi.append(0.0)
        bs.append(sz[-1])
    if blo:
        x = _bisect(c, cd, np.array(blo), np.array(bhi), np.array(bs), rtol)
        new_z.extend(x.tolist())
        new_m.extend([1] * x.size)
    zz, mm = _merge(np.array(new_z, dtype=float), np.array(new_m, dtype=np.int64))
    if mm.sum() != deg:
        raise RootIsolationError(
            f"level {level}: found {mm.sum()} roots, expected {deg}",
            level=level,
            interval=(float(zz[0]), float(zz[-1])),
        )
    return zz, mm


def root_multiset(p: LogPoly, zero_rtol=None):
    """Distinct roots of the stored polynomial and their multiplicities.

    Roots of the derivative chain are found bottom-up; each level isolates one
    root per interval between consecutive roots of the next derivative (plus
    the two outer intervals). Bisection on :func:`evaluate_signed` is followed
    by a short Newton polish. A point where the polynomial is numerically zero
    absorbs the derivative root there as a multiple root.
    """
    lo, hi = p.low, p.degree
    core = np.asarray(p.logc[lo : hi + 1])
    d = hi - lo
    zs, ms = [], []
    if d >= 1:
        lf = logfact(d)
        c1 = core[d - 1 :] + (lf[d - 1 :] - lf[: 2])
        z = np.array([-math.exp(c1[0] - c1[1])])
        mz = np.array([1], dtype=np.int64)
        below = c1
        for j in range(d - 2, -1, -1):
            k = np.arange(d - j + 1)
            c = core[j:] + (lf[k + j] - lf[k])
            rtol = _auto_rtol(c, core) if zero_rtol is None else zero_rtol
            z, mz = _ladder_step(c, below, z, mz, j, rtol)
            below = c
        zs, ms = list(z), list(mz)
    if lo > 0:
        zs.append(0.0)
        ms.append(lo)
    zs = np.array(zs, dtype=float)
    ms = np.array(ms, dtype=np.int64)
    order = np.argsort(zs)
    return zs[order], ms[order]


def roots(p: LogPoly, zero_rtol=None):
    """Sorted roots (with multiplicity) of the stored polynomial, all ``<= 0``."""
    z, m = root_multiset(p, zero_rtol)
    return np.repeat(z, m)


def empirical_measure(p: LogPoly, zero_rtol=None):
    """Atoms of weight ``1/cap``; ``(cap - deg)/cap`` goes to infinity."""
    r = roots(p, zero_rtol)
    if p.reflected:
        r = -r[::-1]
        r = np.where(r == 0, 0.0, r)
    return EmpiricalMeasure(r, p.cap, (p.cap - p.degree) / p.cap, 1 if p.reflected else -1)


def infinity_mass(p: LogPoly):
    return (p.cap - p.degree) / p.cap
