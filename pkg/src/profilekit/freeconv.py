"""Finite free convolutions in log space, with an exact rational oracle.

For degree-``n`` polynomials ``p = sum a_j x^j``, ``q = sum b_j x^j``::

    (p boxplus_n q)_k  = sum_{j1 + j2 = n + k} a_j1 b_j2 j1! j2! / (k! n!)
    (p boxtimes_n q)_k = a_k b_k / C(n, k)          (nonnegative-rooted inputs)
    (p hadamard_n q)_k = a_k b_k

``boxplus_n`` is checked against the classical-convolution identity
``p boxplus_n q = (1/n!) (d/dz)^(n+1) int_0^z p(u) q(z-u) du`` evaluated in
exact rational arithmetic by :class:`ExactPoly`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import factorial

import numpy as np

from . import kernels
from .errors import (
    ArgumentError,
    ConsistencyError,
    DegreeError,
    PreconditionError,
    ZeroPolynomialError,
)
from .logpoly import NEG_INF, LogPoly, apply_Aab, lbinom, logfact, shift

EXACT_MAX_DEGREE = 12


def _same_cap(p, q, n):
    n = p.cap if n is None else int(n)
    if p.cap != n or q.cap != n:
        raise ArgumentError(f"both caps must equal n={n} (got {p.cap}, {q.cap})")
    return n


def boxplus_n(p: LogPoly, q: LogPoly, n=None) -> LogPoly:
    """Finite free additive convolution.

    The result has degree ``deg p + deg q - n``; the remaining mass of the
    empirical measure sits at infinity.
    """
    n = _same_cap(p, q, n)
    if p.reflected != q.reflected:
        raise PreconditionError("mixed sign conventions")
    if p.degree + q.degree < n:
        raise DegreeError(f"deg p + deg q = {p.degree + q.degree} < n = {n}: result is zero")
    out = kernels.boxplus_log(p.logc, q.logc, n, logfact(n))
    return LogPoly(n, out, p.reflected)


def _boxtimes_raw(p, q, n):
    lb = lbinom(n, np.arange(n + 1))
    out = np.full(n + 1, NEG_INF)
    both = np.isfinite(p.logc) & np.isfinite(q.logc)
    for k in np.nonzero(both)[0]:
        # correctly rounded three-term sum: the unit (x-1)^n cancels exactly
        out[k] = math.fsum((p.logc[k], q.logc[k], -lb[k]))
    if not np.isfinite(out).any():
        raise ZeroPolynomialError("coefficient supports do not intersect")
    return LogPoly(n, out, True)


def boxtimes_n(p: LogPoly, q: LogPoly, n=None) -> LogPoly:
    """Finite free multiplicative convolution of nonnegative-rooted polynomials.

    Both inputs must be reflected. Neither may be divisible by
    ``x^min(deg p, deg q)``.
    """
    n = _same_cap(p, q, n)
    if not (p.reflected and q.reflected):
        raise PreconditionError("boxtimes_n needs two reflected (nonnegative-rooted) inputs")
    m = min(p.degree, q.degree)
    if p.low >= m or q.low >= m:
        raise PreconditionError(f"an input is divisible by x^{m}")
    return _boxtimes_raw(p, q, n)


def hadamard_n(p: LogPoly, q: LogPoly, n=None) -> LogPoly:
    """Coefficientwise product of the stored coefficients (flags must agree)."""
    n = _same_cap(p, q, n)
    if p.reflected != q.reflected:
        raise PreconditionError("mixed sign conventions")
    out = p.logc + q.logc
    if not np.isfinite(out).any():
        raise ZeroPolynomialError("coefficient supports do not intersect")
    return LogPoly(n, out, p.reflected)


# ---------------------------------------------------------------------------
# exact oracle


@dataclass(frozen=True)
class ExactPoly:
    """Polynomial with Fraction coefficients, lowest degree first."""

    coeffs: tuple

    def __post_init__(self):
        c = tuple(Fraction(v) for v in self.coeffs)
        while len(c) > 1 and c[-1] == 0:
            c = c[:-1]
        if not c:
            c = (Fraction(0),)
        if len(c) - 1 > EXACT_MAX_DEGREE:
            raise ArgumentError(f"ExactPoly degree {len(c) - 1} > {EXACT_MAX_DEGREE}")
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self):
        if len(self.coeffs) == 1 and self.coeffs[0] == 0:
            return -1
        return len(self.coeffs) - 1

    @classmethod
    def from_roots(cls, roots):
        c = [Fraction(1)]
        for r in roots:
            r = Fraction(r)
            new = [Fraction(0)] * (len(c) + 1)
            for k, a in enumerate(c):
                new[k + 1] += a
                new[k] -= r * a
            c = new
        return cls(tuple(c))

    @classmethod
    def from_logpoly(cls, p: LogPoly):
        """Exact rational image of the stored (positive) coefficients."""
        return cls(tuple(Fraction(float(v)) if np.isfinite(v) else Fraction(0) for v in np.exp(p.logc)))

    def derivative(self, times=1):
        c = list(self.coeffs)
        for _ in range(times):
            c = [k * c[k] for k in range(1, len(c))] or [Fraction(0)]
        return ExactPoly(tuple(c))

    def to_float(self, length=None):
        vals = [float(v) for v in self.coeffs]
        if length is not None:
            vals = vals + [0.0] * (length - len(vals))
        return np.array(vals)


def _padded(p: ExactPoly, n):
    c = list(p.coeffs)
    return c + [Fraction(0)] * (n + 1 - len(c))


def boxplus_exact(p: ExactPoly, q: ExactPoly, n: int) -> ExactPoly:
    """The defining sum, evaluated in rationals."""
    a, b = _padded(p, n), _padded(q, n)
    out = []
    for k in range(n + 1):
        s = Fraction(0)
        for j1 in range(k, n + 1):
            j2 = n + k - j1
            s += a[j1] * b[j2] * factorial(j1) * factorial(j2)
        out.append(s / (factorial(k) * factorial(n)))
    return ExactPoly(tuple(out))


def boxplus_oracle(p: ExactPoly, q: ExactPoly, n: int) -> ExactPoly:
    """``(1/n!) (d/dz)^(n+1) int_0^z p(u) q(z-u) du``, exactly."""
    # int_0^z u^j (z-u)^k du = j! k! / (j+k+1)! z^(j+k+1)
    conv = [Fraction(0)] * (len(p.coeffs) + len(q.coeffs) + 1)
    for j, a in enumerate(p.coeffs):
        for k, b in enumerate(q.coeffs):
            if a and b:
                conv[j + k + 1] += a * b * Fraction(factorial(j) * factorial(k), factorial(j + k + 1))
    # the integral may exceed the ExactPoly degree bound, so differentiate the raw list
    c = conv
    for _ in range(n + 1):
        c = [k * c[k] for k in range(1, len(c))] or [Fraction(0)]
    return ExactPoly(tuple(v / factorial(n) for v in c))


def boxtimes_exact(p: ExactPoly, q: ExactPoly, n: int) -> ExactPoly:
    """Multiplicative convolution of nonnegative-rooted polynomials, exactly.

    Writing ``p = sum (-1)^(n-k) a_k x^k`` the result has
    ``(-1)^(n-k) a_k b_k / C(n,k)``; in signed coefficients that is
    ``(-1)^(n-k) p_k q_k / C(n,k)``.
    """
    a, b = _padded(p, n), _padded(q, n)
    out = []
    for k in range(n + 1):
        sk = -1 if (n - k) % 2 else 1
        out.append(sk * a[k] * b[k] / math.comb(n, k))
    return ExactPoly(tuple(out))


# ---------------------------------------------------------------------------
# T-polynomials and the repeated action


def t_poly(n: int, ell: int, a: int, b: int) -> LogPoly:
    """Reflected log coefficients of ``x^(-ell*(a-b)) A_{a,b}^ell (x - 1)^n``.

    ``A_{a,b} = n^(-b) x^a (d/dx)^b``. Coefficient ``j`` is
    ``C(n,j) n^(-ell*b) prod_{i<ell} (j+i*D)! / (j-b+i*D)!`` with ``D = a-b``,
    over the indices where every factorial argument is nonnegative.
    """
    if n < 1 or ell < 0 or a < 0 or b < 0:
        raise ArgumentError("need n >= 1 and ell, a, b >= 0")
    delta = a - b
    if 1 + delta * ell / n <= 0:
        raise ArgumentError("need 1 + (a-b)*ell/n > 0")
    j = np.arange(n + 1)
    lo = b if delta >= 0 else a - ell * delta
    valid = j >= lo
    if ell == 0:
        valid = np.ones(n + 1, dtype=bool)
    lf = logfact(n + max(0, ell * delta) + 1)
    acc = np.zeros(n + 1)
    jj = j[valid]
    if delta == 0:
        acc[valid] = ell * (lf[jj] - lf[jj - b])
    else:
        for i in range(ell):
            acc[valid] += lf[jj + i * delta] - lf[jj - b + i * delta]
    logc = np.where(valid, lbinom(n, j) - ell * b * math.log(n) + acc, NEG_INF)
    return LogPoly(n, logc, True)


def t_poly_zero_multiplicity(n, ell, a, b):
    """Multiplicity of the root 0: ``b`` if ``a >= b`` else ``a - ell*(a-b)``."""
    delta = a - b
    return b if delta >= 0 else a - ell * delta


def repeated_action(q: LogPoly, a: int, b: int, ell: int, n=None, atol=1e-9, check=True) -> LogPoly:
    """``x^(-ell*(a-b)) A_{a,b}^ell q`` with ``A_{a,b} = n^(-b) x^a (d/dx)^b``.

    Computed by iterating :func:`~profilekit.logpoly.apply_Aab`. With
    ``check`` the result is compared against ``q boxtimes_n T`` and a
    :class:`ConsistencyError` is raised past ``atol`` in log space.
    """
    n = q.cap if n is None else int(n)
    delta = a - b
    cur = q
    for _ in range(ell):
        cur = apply_Aab(cur, a, b, n)
    out = shift(cur, -ell * delta, cap=n)
    if check:
        if not q.reflected:
            raise PreconditionError("the multiplicative route needs a reflected input")
        other = _boxtimes_raw(q, t_poly(n, ell, a, b), n)
        fa, fb = np.isfinite(out.logc), np.isfinite(other.logc)
        if not np.array_equal(fa, fb):
            raise ConsistencyError("supports differ between the two routes")
        err = float(np.max(np.abs(out.logc[fa] - other.logc[fa]))) if fa.any() else 0.0
        if err > atol:
            raise ConsistencyError(f"routes disagree by {err:.3e} in log space")
    return out


def aab_exact(p: ExactPoly, a: int, b: int, n: int) -> ExactPoly:
    """``n^(-b) x^a (d/dx)^b p`` in rationals."""
    d = p.derivative(b)
    c = [Fraction(0)] * a + [v / Fraction(n) ** b for v in d.coeffs]
    return ExactPoly(tuple(c))


def _xshift_exact(p: ExactPoly, s: int) -> ExactPoly:
    c = list(p.coeffs)
    if s >= 0:
        return ExactPoly(tuple([Fraction(0)] * s + c))
    if any(c[: -s]):
        raise PreconditionError(f"not divisible by x^{-s}")
    return ExactPoly(tuple(c[-s:]))


def repeated_action_exact(q: ExactPoly, a: int, b: int, ell: int, n: int) -> ExactPoly:
    """``x^(-ell*(a-b)) A_{a,b}^ell q`` in rationals."""
    cur = q
    for _ in range(ell):
        cur = aab_exact(cur, a, b, n)
    return _xshift_exact(cur, -ell * (a - b))


def t_poly_exact(n: int, ell: int, a: int, b: int) -> ExactPoly:
    """``x^(-ell*(a-b)) A_{a,b}^ell (x - 1)^n`` with its true signs."""
    return repeated_action_exact(ExactPoly.from_roots([1] * n), a, b, ell, n)
