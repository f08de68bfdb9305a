"""Derivative chains tracked through the roots themselves.

Coefficients in double precision pin down the roots of a spread-out
real-rooted polynomial only up to an error that grows exponentially in the
degree, so root extraction from a :class:`~profilekit.logpoly.LogPoly` fails
long before the degrees of interest. When the roots of the input are known,
the roots of every derivative follow from them directly: between consecutive
distinct roots ``r_i < r_{i+1}`` the derivative has exactly one simple zero,
the zero of ``sum_k m_k / (x - r_k)``, and each root of multiplicity ``m``
survives with multiplicity ``m - 1``. A zero found this way moves by a convex
combination of the input perturbations, so errors do not amplify from level
to level.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ArgumentError, DegreeError, DomainError
from .logpoly import EmpiricalMeasure

MERGE_ULPS = 4.0
_EPS = np.finfo(float).eps


@dataclass(frozen=True, eq=False)
class RootSet:
    """Distinct sorted roots with multiplicities, plus the normalizing cap.

    ``reflected`` records that the roots are those of a nonnegative-rooted
    polynomial (so the mass beyond the degree sits at ``+inf``).
    """

    z: np.ndarray
    m: np.ndarray
    cap: int
    reflected: bool = False

    def __post_init__(self):
        z = np.asarray(self.z, dtype=float)
        m = np.asarray(self.m, dtype=np.int64)
        if z.shape != m.shape or z.ndim != 1:
            raise ArgumentError("z and m must be matching 1-d arrays")
        if (m < 1).any():
            raise ArgumentError("multiplicities must be positive")
        if z.size > 1 and np.any(np.diff(z) <= 0):
            raise ArgumentError("roots must be strictly increasing")
        if int(m.sum()) > self.cap:
            raise ArgumentError("more roots than cap")
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "m", m)

    @property
    def degree(self):
        return int(self.m.sum())

    def expand(self):
        return np.repeat(self.z, self.m)

    def multiplicity_at(self, x, tol=0.0):
        hit = np.abs(self.z - x) <= tol
        return int(self.m[hit].sum())

    def measure(self):
        sign = 1 if self.reflected else -1
        return EmpiricalMeasure(self.expand(), self.cap, (self.cap - self.degree) / self.cap, sign)

    def to_json(self):
        return {
            "cap": self.cap,
            "reflected": self.reflected,
            "roots": [float(v) for v in self.z],
            "multiplicity": [int(v) for v in self.m],
        }

    def dumps(self):
        return json.dumps(self.to_json())

    @classmethod
    def from_json(cls, obj):
        if isinstance(obj, str):
            obj = json.loads(obj)
        z = np.asarray(obj["roots"], dtype=float)
        m = obj.get("multiplicity")
        if m is None:
            return cls.from_values(z, int(obj["cap"]), bool(obj.get("reflected", False)))
        return cls(z, np.asarray(m), int(obj["cap"]), bool(obj.get("reflected", False)))

    @classmethod
    def from_values(cls, roots, cap=None, reflected=False):
        roots = np.sort(np.asarray(roots, dtype=float).ravel())
        if np.isnan(roots).any():
            raise DomainError("NaN root")
        cap = roots.size if cap is None else int(cap)
        z, m = np.unique(roots, return_counts=True)
        return cls(z, m, cap, reflected)


def _merge(z, m):
    """Merge neighbours that coincide to a few ulps (a gap below resolution)."""
    if z.size < 2:
        return z, m
    out_z, out_m = [z[0]], [int(m[0])]
    for zi, mi in zip(z[1:], m[1:]):
        if zi - out_z[-1] <= MERGE_ULPS * _EPS * max(abs(zi), abs(out_z[-1])):
            tot = out_m[-1] + int(mi)
            # keep the heavier point in place; a multiple root is exact data
            if mi > out_m[-1]:
                out_z[-1] = zi
            out_m[-1] = tot
        else:
            out_z.append(zi)
            out_m.append(int(mi))
    return np.array(out_z), np.array(out_m, dtype=np.int64)


def critical_roots(z, m):
    """Roots (distinct, multiplicities) of the derivative of prod (x - z_i)^m_i."""
    z = np.asarray(z, dtype=float)
    m = np.asarray(m, dtype=np.int64)
    if int(m.sum()) < 1:
        raise DegreeError("derivative of a constant")
    gaps = kernels.critical_points(z, m)
    keep = m > 1
    zz = np.concatenate([z[keep], gaps])
    mm = np.concatenate([m[keep] - 1, np.ones(gaps.size, dtype=np.int64)])
    order = np.argsort(zz, kind="stable")
    return _merge(zz[order], mm[order])


def _add_zero(z, m, count):
    if count == 0:
        return z, m
    hit = np.nonzero(z == 0.0)[0]
    if hit.size:
        m = m.copy()
        m[hit[0]] += count
        return z, m
    zz = np.concatenate([z, [0.0]])
    mm = np.concatenate([m, [count]])
    order = np.argsort(zz, kind="stable")
    return _merge(zz[order], mm[order])


def _drop_zero(z, m, count):
    if count == 0:
        return z, m
    hit = np.nonzero(z == 0.0)[0]
    if hit.size == 0 or m[hit[0]] < count:
        raise ArgumentError(f"x^{count} does not divide the polynomial")
    m = m.copy()
    m[hit[0]] -= count
    keep = m > 0
    return z[keep], m[keep]


def derivative(rs: RootSet, b: int = 1) -> RootSet:
    """Roots of ``(d/dx)^b`` of the polynomial; cap lowered by ``b``."""
    if rs.degree < b:
        raise DegreeError(f"degree {rs.degree} < derivative order {b}")
    z, m = rs.z, rs.m
    for _ in range(b):
        if int(m.sum()) == 1:
            z, m = np.empty(0), np.empty(0, dtype=np.int64)
            continue
        z, m = critical_roots(z, m)
    return RootSet(z, m, rs.cap - b, rs.reflected)


def apply_Aab(rs: RootSet, a: int, b: int, cap=None) -> RootSet:
    """Roots of ``x^a (d/dx)^b`` applied to the polynomial (scaling is irrelevant)."""
    d = derivative(rs, b)
    z, m = _add_zero(d.z, d.m, a)
    new_cap = rs.cap + a - b if cap is None else int(cap)
    return RootSet(z, m, new_cap, rs.reflected)


def repeated_action(rs: RootSet, a: int, b: int, ell: int, n=None) -> RootSet:
    """Roots of ``x^(-ell*(a-b)) A_{a,b}^ell`` applied to the polynomial.

    The shift restores the original cap.
    """
    delta = a - b
    cur = rs
    for _ in range(ell):
        cur = apply_Aab(cur, a, b)
    z, m = cur.z, cur.m
    if delta > 0:
        z, m = _drop_zero(z, m, ell * delta)
    elif delta < 0:
        z, m = _add_zero(z, m, -ell * delta)
    cap = rs.cap if n is None else int(n)
    return RootSet(z, m, cap, rs.reflected)


def t_poly_roots(n: int, ell: int, a: int, b: int) -> RootSet:
    """Roots of ``x^(-ell*(a-b)) A_{a,b}^ell (x - 1)^n`` (nonnegative)."""
    if 1 + (a - b) * ell / n <= 0:
        raise ArgumentError("need 1 + (a-b)*ell/n > 0")
    start = RootSet(np.array([1.0]), np.array([n]), n, reflected=True)
    return repeated_action(start, a, b, ell)
