"""Time the numba kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--sizes 200 1000 2000] [--repeat 5]

Each kernel is run once per backend to warm up (numba compiles on first call),
then timed as the best of ``--repeat`` runs. Outputs of the two backends are
compared so a speedup never hides a wrong answer.
"""

import argparse
import time

import numpy as np

from profilekit import kernels
from profilekit.logpoly import logfact


def _best(fn, repeat):
    fn()
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def cases(n, rng):
    roots = np.sort(rng.uniform(0.05, 3.0, n))
    loglam = np.log(roots)
    logc = kernels.from_roots_log(loglam, n)
    xs = -np.linspace(0.01, 3.0, 64)
    lf = logfact(n)
    z = np.unique(np.round(-roots, 12))
    m = np.ones_like(z)
    return {
        "from_roots_log": lambda: kernels.from_roots_log(loglam, n),
        "signed_groups": lambda: kernels.signed_groups(logc, xs),
        "boxplus_log": lambda: kernels.boxplus_log(logc, logc, n, lf),
        "critical_points": lambda: kernels.critical_points(z, m),
    }


def _flat(out):
    if isinstance(out, tuple):
        return np.concatenate([np.ravel(np.asarray(o, dtype=float)) for o in out])
    return np.ravel(np.asarray(out, dtype=float))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[200, 1000, 2000])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    have = kernels.available_backends()
    if "numba" not in have:
        print("numba is not importable; only the numpy backend can be timed")
    print(f"{'kernel':<16} {'n':>6} {'numpy [s]':>11} {'numba [s]':>11} {'speedup':>8} {'max diff':>10}")
    for n in args.sizes:
        rng = np.random.default_rng(n)
        with kernels.use_backend("numpy"):
            fns = cases(n, rng)
            ref = {k: _flat(f()) for k, f in fns.items()}
            t_np = {k: _best(f, args.repeat) for k, f in fns.items()}
        if "numba" in have:
            with kernels.use_backend("numba"):
                got = {k: _flat(f()) for k, f in fns.items()}
                t_nb = {k: _best(f, args.repeat) for k, f in fns.items()}
        for k in fns:
            if "numba" in have:
                finite = np.isfinite(ref[k]) & np.isfinite(got[k])
                diff = float(np.max(np.abs(ref[k][finite] - got[k][finite]), initial=0.0))
                print(f"{k:<16} {n:>6} {t_np[k]:>11.2e} {t_nb[k]:>11.2e} {t_np[k] / t_nb[k]:>8.1f} {diff:>10.1e}")
            else:
                print(f"{k:<16} {n:>6} {t_np[k]:>11.2e} {'-':>11} {'-':>8} {'-':>10}")


if __name__ == "__main__":
    main()
