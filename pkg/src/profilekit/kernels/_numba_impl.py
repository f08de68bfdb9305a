"""numba kernels. Loop formulations of the numpy versions in ``_numpy_impl``."""

import math

import numpy as np
from numba import njit

NEG_INF = -np.inf
_EPS = np.finfo(np.float64).eps

_JIT = dict(cache=True, nogil=True)


@njit(**_JIT)
def _lae(a, b):
    m = a if a > b else b
    if m == NEG_INF:
        return NEG_INF
    return m + math.log1p(math.exp(-abs(a - b)))


@njit(**_JIT)
def from_roots_log(loglam, cap):
    out = np.full(cap + 1, NEG_INF)
    out[0] = 0.0
    deg = 0
    for ll in loglam:
        for k in range(deg + 1, 0, -1):
            out[k] = _lae(out[k - 1], out[k] + ll)
        out[0] = out[0] + ll
        deg += 1
    return out


@njit(**_JIT)
def signed_groups(logc, xs):
    n = logc.shape[0]
    nx = xs.shape[0]
    lp = np.full(nx, NEG_INF)
    ln = np.full(nx, NEG_INF)
    t = np.empty(n)
    for i in range(nx):
        x = xs[i]
        ax = abs(x)
        lx = math.log(ax) if ax > 0 else NEG_INF
        m = NEG_INF
        for k in range(n):
            if k == 0:
                t[k] = logc[0]
            elif logc[k] == NEG_INF or lx == NEG_INF:
                t[k] = NEG_INF
            else:
                t[k] = logc[k] + k * lx
            if t[k] > m:
                m = t[k]
        if m == NEG_INF:
            continue
        sp = 0.0
        sn = 0.0
        for k in range(n):
            if t[k] == NEG_INF:
                continue
            e = math.exp(t[k] - m)
            if x < 0 and (k % 2 == 1):
                sn += e
            else:
                sp += e
        if sp > 0:
            lp[i] = m + math.log(sp)
        if sn > 0:
            ln[i] = m + math.log(sn)
    return lp, ln


@njit(**_JIT)
def boxplus_log(l1, l2, n, lf):
    out = np.full(n + 1, NEG_INF)
    buf = np.empty(n + 1)
    for k in range(n + 1):
        cnt = 0
        for j1 in range(k, n + 1):
            j2 = n + k - j1
            a = l1[j1]
            b = l2[j2]
            if a == NEG_INF or b == NEG_INF:
                continue
            buf[cnt] = a + b + ((lf[j1] - lf[k]) + (lf[j2] - lf[n]))
            cnt += 1
        if cnt == 0:
            continue
        t = np.sort(buf[:cnt])
        m = t[cnt - 1]
        acc = 0.0
        for i in range(cnt):
            acc += math.exp(t[i] - m)
        out[k] = m + math.log(acc)
    return out


@njit(**_JIT)
def critical_points(r, m, maxiter=200):
    s = r.shape[0]
    if s < 2:
        return np.empty(0)
    out = np.empty(s - 1)
    for i in range(s - 1):
        lo = r[i]
        hi = r[i + 1]
        x = 0.5 * (lo + hi)
        for _ in range(maxiter):
            f = 0.0
            fp = 0.0
            for k in range(s):
                d = x - r[k]
                inv = m[k] / d
                f += inv
                fp -= inv / d
            if f > 0:
                lo = x
            elif f < 0:
                hi = x
            else:
                break
            xn = x - f / fp
            if not (xn > lo and xn < hi):
                xn = 0.5 * (lo + hi)
            tol = 2.0 * _EPS * max(abs(lo), abs(hi))
            if abs(xn - x) <= tol or hi - lo <= tol:
                x = xn
                break
            x = xn
        out[i] = x
    return out
