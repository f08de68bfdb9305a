"""Pure-numpy kernels. Same contracts as the numba versions, vectorized."""

import numpy as np

NEG_INF = -np.inf
_EPS = np.finfo(float).eps


def _lae(a, b):
    m = np.maximum(a, b)
    with np.errstate(invalid="ignore"):
        d = -np.abs(a - b)
        out = m + np.log1p(np.exp(d))
    return np.where(np.isneginf(m), NEG_INF, out)


def from_roots_log(loglam, cap):
    """Log coefficients of prod(x + lam) for ``lam = exp(loglam)``."""
    out = np.full(cap + 1, NEG_INF)
    out[0] = 0.0
    deg = 0
    for ll in loglam:
        head = out[: deg + 2].copy()
        shifted = np.empty(deg + 2)
        shifted[0] = NEG_INF
        shifted[1:] = head[: deg + 1]
        out[: deg + 2] = _lae(shifted, head + ll)
        deg += 1
    return out


def signed_groups(logc, xs):
    """Logs of the positive and negative parts of sum c_k x^k, per x."""
    xs = np.asarray(xs, dtype=float)
    n = logc.shape[0]
    k = np.arange(n)
    lp = np.full(xs.shape[0], NEG_INF)
    ln = np.full(xs.shape[0], NEG_INF)
    finite = np.isfinite(logc)
    if not finite.any():
        return lp, ln
    kk = k[finite]
    lc = logc[finite]
    for s in range(0, xs.shape[0], 256):
        x = xs[s : s + 256]
        ax = np.abs(x)
        with np.errstate(divide="ignore", invalid="ignore"):
            lx = np.log(ax)
            t = lc[None, :] + kk[None, :] * lx[:, None]
        # 0 * log(0) -> the constant term survives at x == 0
        t = np.where((kk[None, :] == 0), lc[None, :], t)
        neg = (x[:, None] < 0) & (kk[None, :] % 2 == 1)
        m = np.max(t, axis=1)
        m = np.where(np.isfinite(m), m, 0.0)
        e = np.exp(t - m[:, None])
        sp = np.where(neg, 0.0, e).sum(axis=1)
        sn = np.where(neg, e, 0.0).sum(axis=1)
        with np.errstate(divide="ignore"):
            lp[s : s + 256] = np.where(sp > 0, m + np.log(sp), NEG_INF)
            ln[s : s + 256] = np.where(sn > 0, m + np.log(sn), NEG_INF)
    return lp, ln


def boxplus_log(l1, l2, n, lf):
    out = np.full(n + 1, NEG_INF)
    for k in range(n + 1):
        j1 = np.arange(k, n + 1)
        j2 = n + k - j1
        t = l1[j1] + l2[j2] + ((lf[j1] - lf[k]) + (lf[j2] - lf[n]))
        t = t[np.isfinite(t)]
        if t.size == 0:
            continue
        t = np.sort(t)
        m = t[-1]
        # cumsum is sequential, so the order of accumulation is ascending
        out[k] = m + np.log(np.cumsum(np.exp(t - m))[-1])
    return out


def critical_points(r, m, maxiter=200):
    """Zeros of sum_k m_k / (x - r_k) strictly between consecutive r."""
    s = r.shape[0]
    if s < 2:
        return np.empty(0)
    lo = r[:-1].copy()
    hi = r[1:].copy()
    x = 0.5 * (lo + hi)
    active = np.ones(s - 1, dtype=bool)
    mf = m.astype(float)
    for _ in range(maxiter):
        idx = np.nonzero(active)[0]
        if idx.size == 0:
            break
        xa = x[idx]
        d = xa[:, None] - r[None, :]
        inv = mf[None, :] / d
        f = inv.sum(axis=1)
        fp = -(inv / d).sum(axis=1)
        lo_a, hi_a = lo[idx], hi[idx]
        lo_a = np.where(f > 0, xa, lo_a)
        hi_a = np.where(f < 0, xa, hi_a)
        with np.errstate(divide="ignore", invalid="ignore"):
            xn = xa - f / fp
        bad = ~((xn > lo_a) & (xn < hi_a))
        xn = np.where(bad, 0.5 * (lo_a + hi_a), xn)
        tol = 2.0 * _EPS * np.maximum(np.abs(lo_a), np.abs(hi_a))
        done = (f == 0) | (np.abs(xn - xa) <= tol) | (hi_a - lo_a <= tol)
        xn = np.where(f == 0, xa, xn)
        x[idx] = xn
        lo[idx], hi[idx] = lo_a, hi_a
        active[idx[done]] = False
    return x
