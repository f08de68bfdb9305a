"""``profilekit`` command line.

Exit codes: 0 success, 1 operation or tolerance failure, 2 usage error.
Polynomials travel as JSON (:class:`LogPoly` with ``logc``, or a root set with
``roots``/``multiplicity``); tables are CSV with 17 significant digits.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from . import closedform as cf
from . import experiments as ex
from . import freeconv as fc
from . import logpoly as lp
from . import profile as pr
from . import rootspace as rsp
from . import transforms as tr
from ._config import MAX_DEGREE
from .errors import ProfileKitError, RootIsolationError

log = logging.getLogger("profilekit")


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# input specs


def _check_n(n):
    if n is None:
        return None
    if n < 1 or n > MAX_DEGREE:
        raise UsageError(f"--n must lie in [1, {MAX_DEGREE}] (got {n})")
    return n


def parse_roots(spec, n=None, seed=0):
    """Root generator spec -> (roots array, default cap or None)."""
    name, _, rest = spec.partition(":")
    parts = rest.split(":") if rest else []
    try:
        if name == "uniform_grid":
            if n is None:
                raise UsageError("uniform_grid needs --n")
            return np.linspace(float(parts[0]), float(parts[1]), n)
        if name == "random_uniform":
            if n is None:
                raise UsageError("random_uniform needs --n")
            rng = np.random.default_rng(seed)
            return np.sort(rng.uniform(float(parts[0]), float(parts[1]), n))
        if name == "dirac":
            count = int(parts[1]) if len(parts) > 1 else n
            if count is None:
                raise UsageError("dirac needs a count or --n")
            return np.full(count, float(parts[0]))
        if name == "stirling":
            if n is None:
                raise UsageError("stirling needs --n")
            return -np.arange(n) / n
        if name == "binomial":
            if n is None:
                raise UsageError("binomial needs --n")
            return np.full(n, -1.0)
        if name == "file":
            path = rest
            vals = np.loadtxt(path, delimiter=",", ndmin=1, comments="#")
            return np.asarray(vals, dtype=float).ravel()
    except (IndexError, ValueError, OSError) as exc:
        raise UsageError(f"bad root spec {spec!r}: {exc}") from None
    raise UsageError(f"unknown root generator {name!r}")


def load_object(path):
    if str(path).endswith(".csv"):
        try:
            return pr.Profile.read_csv(path)
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read {path}: {exc}") from None
    try:
        obj = json.loads(Path(path).read_text())
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None
    if "logc" in obj:
        return lp.LogPoly.from_json(obj)
    if "roots" in obj:
        return rsp.RootSet.from_json(obj)
    if "variant" in obj:
        return cf.measure_from_json(obj)
    raise UsageError(f"{path}: not a polynomial, root set or measure")


def write_json(obj, path):
    text = json.dumps(obj.to_json(), sort_keys=True) + "\n"
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def parse_grid(spec):
    try:
        lo, hi, count = spec.split(":")
        return np.linspace(float(lo), float(hi), int(count))
    except ValueError:
        raise UsageError(f"bad grid {spec!r}; expected LO:HI:COUNT") from None


def parse_closed(spec):
    try:
        return cf.parse_closed_form(spec)
    except ProfileKitError as exc:
        raise UsageError(str(exc)) from None


def _fmt(v):
    return f"{v:.17g}"


# ---------------------------------------------------------------------------
# commands


def cmd_make(args):
    n = _check_n(args.n)
    if args.tpoly:
        try:
            a, b, ell = (int(v) for v in args.tpoly.split(":"))
        except ValueError:
            raise UsageError("--tpoly expects A:B:ELL") from None
        if n is None:
            raise UsageError("--tpoly needs --n")
        obj = rsp.t_poly_roots(n, ell, a, b) if args.format == "roots" else fc.t_poly(n, ell, a, b)
        write_json(obj, args.out)
        return 0
    if not args.roots:
        raise UsageError("make needs --roots or --tpoly")
    r = parse_roots(args.roots, n, args.seed)
    cap = args.cap if args.cap is not None else (n if n is not None and n >= r.size else r.size)
    _check_n(cap)
    if cap < r.size:
        raise UsageError(f"cap {cap} is below the number of roots {r.size}")
    reflected = bool(r.size and r.min() >= 0 and r.max() > 0)
    if not reflected and r.size and r.max() > 0:
        raise UsageError("roots must all be <= 0 or all be >= 0")
    if args.format == "roots":
        obj = rsp.RootSet.from_values(r, cap, reflected)
    else:
        obj = lp.from_roots(r, cap=cap, reflected=reflected)
    write_json(obj, args.out)
    return 0


def _measure_of(obj):
    if isinstance(obj, rsp.RootSet):
        return obj.measure()
    return obj


def cmd_profile(args):
    if args.closed_form:
        prof = pr.profile_from_measure(parse_closed(args.closed_form), size=args.size)
    else:
        obj = load_object(args.input)
        if isinstance(obj, lp.LogPoly):
            prof = pr.empirical_profile(obj)
        else:
            prof = pr.profile_from_measure(_measure_of(obj), size=args.size)
    prof.write_csv(sys.stdout if args.out in (None, "-") else args.out)
    return 0


def cmd_roots(args):
    obj = load_object(args.input)
    if isinstance(obj, lp.LogPoly):
        z, m = lp.root_multiset(obj)
        if obj.reflected:
            z, m = -z[::-1], m[::-1]
            z = np.where(z == 0, 0.0, z)
        rs = rsp.RootSet(z, m, obj.cap, obj.reflected)
    elif isinstance(obj, rsp.RootSet):
        rs = obj
    else:
        raise UsageError("roots needs a polynomial or root set")
    if args.out and args.out.endswith(".csv"):
        with open(args.out, "w") as fh:
            fh.write("root,multiplicity\n")
            for zv, mv in zip(rs.z, rs.m):
                fh.write(f"{_fmt(zv)},{int(mv)}\n")
    else:
        write_json(rs, args.out)
    return 0


def cmd_conv(args):
    p, q = load_object(args.a), load_object(args.b)
    if not (isinstance(p, lp.LogPoly) and isinstance(q, lp.LogPoly)):
        raise UsageError("conv needs two polynomial files")
    n = _check_n(args.n) if args.n is not None else p.cap
    op = {"boxplus": fc.boxplus_n, "boxtimes": fc.boxtimes_n, "hadamard": fc.hadamard_n}[args.op]
    out = op(p, q, n)
    if args.op == "boxplus":
        expect = p.degree + q.degree - n
        if out.degree != expect:
            print(f"degree law violated: {out.degree} != {expect}", file=sys.stderr)
            return 1
    write_json(out, args.out)
    return 0


def cmd_diff(args):
    obj = load_object(args.input)
    a, b, ell = args.a, args.b, args.ell
    if a < 0 or b < 0 or ell < 0:
        raise UsageError("--a, --b, --ell must be nonnegative")
    if isinstance(obj, rsp.RootSet):
        n = _check_n(args.n) if args.n is not None else obj.cap
        if args.shift:
            out = rsp.repeated_action(obj, a, b, ell, n)
        else:
            out = obj
            for _ in range(ell):
                out = rsp.apply_Aab(out, a, b, cap=n)
    elif isinstance(obj, lp.LogPoly):
        n = _check_n(args.n) if args.n is not None else obj.cap
        if args.shift:
            out = fc.repeated_action(obj, a, b, ell, n, check=obj.reflected)
        else:
            out = obj
            for _ in range(ell):
                out = lp.apply_Aab(out, a, b, n, cap=n)
    else:
        raise UsageError("diff needs a polynomial or root set")
    write_json(out, args.out)
    return 0


def _transform(kind, obj, grid):
    if isinstance(obj, pr.Profile):
        return tr.sample(kind, obj, grid)
    return tr.sample(kind, _measure_of(obj), grid)


def cmd_transform(args):
    obj = parse_closed(args.closed_form) if args.closed_form else load_object(args.input)
    grid = parse_grid(args.grid)
    smp = _transform(args.kind, obj, grid)
    if args.out in (None, "-"):
        sys.stdout.write("arg,value\n")
        for a, v in zip(smp.args, smp.values):
            sys.stdout.write(f"{_fmt(a)},{_fmt(v)}\n")
    else:
        smp.write(args.out)
    return 0


def _default_grid(kind, spec):
    if kind == "G":
        lo, hi = spec.hull()
        width = hi - lo if np.isfinite(hi - lo) and hi > lo else 1.0
        return hi + width * np.linspace(0.5, 2.0, 16)
    if kind == "S":
        if isinstance(spec, cf.NuAB):
            lo, _ = cf.nu_ab_s_domain(spec.a, spec.b, spec.kappa)
            # stay clear of the pole at the left end and the atom at the right
            return lo - 1.0 + (1.0 - lo) * np.linspace(0.2, 0.9, 15)
        return np.linspace(-0.9, -0.1, 17)
    raise UsageError(f"no default grid for kind {kind}; pass --grid")


def _closed_values(kind, spec, grid):
    if kind == "G":
        return np.atleast_1d(spec.cauchy(grid))
    if kind == "S" and isinstance(spec, cf.NuAB):
        return np.atleast_1d(spec.s_transform(grid))
    return np.atleast_1d(tr.sample(kind, spec, grid).values)


def _unit_to_symmetric(obj):
    """Map a measure on [0, 1] to [-1, 1] by y = 2x - 1 (the frame of mu_kappa)."""
    mu = _measure_of(obj)
    if not isinstance(mu, lp.EmpiricalMeasure):
        raise UsageError("mu_kappa comparisons need a root set or polynomial")
    return lp.EmpiricalMeasure(2.0 * mu.atoms - 1.0, mu.cap, mu.infinity_mass, mu.infinity_sign)


def cmd_compare(args):
    spec = parse_closed(args.closed_form)
    obj = load_object(args.input)
    if isinstance(spec, cf.MuKappa):
        if isinstance(obj, lp.LogPoly):
            obj = lp.empirical_measure(obj)
        obj = _unit_to_symmetric(obj)
    t0 = time.perf_counter()
    grid = parse_grid(args.grid) if args.grid else _default_grid(args.kind, spec)
    emp = _transform(args.kind, obj, grid).values
    ref = _closed_values(args.kind, spec, grid)
    err = np.abs(emp - ref)
    elapsed = time.perf_counter() - t0
    sup, mean = float(err.max()), float(err.mean())
    n = getattr(obj, "cap", None) or getattr(obj, "n", None)
    lines = ["arg,empirical,closed_form,abs_err"]
    lines += [f"{_fmt(a)},{_fmt(e)},{_fmt(r)},{_fmt(d)}" for a, e, r, d in zip(grid, emp, ref, err)]
    summary = f"# summary sup_err={_fmt(sup)} mean_err={_fmt(mean)} n={n} tol={_fmt(args.tol)}"
    if args.runtime:
        summary += f" runtime_s={elapsed:.3f}"
    lines.append(summary)
    text = "\n".join(lines) + "\n"
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(args.out).write_text(text)
    status = "pass" if sup <= args.tol else "FAIL"
    print(f"{status}: sup_err={sup:.3e} (tol {args.tol:g})", file=sys.stderr)
    return 0 if sup <= args.tol else 1


def cmd_suite(args):
    keys = None
    if args.only:
        keys = [k.strip() for k in args.only.split(",") if k.strip()]
        bad = [k for k in keys if k not in ex.CRITERIA]
        if bad:
            raise UsageError(f"unknown criteria {bad}; known: {sorted(ex.CRITERIA)}")
    results = []
    for key in keys or list(ex.CRITERIA):
        out = ex.CRITERIA[key]()
        print(out.line(), flush=True)
        results.append(out)
    if args.out:
        rows = [
            {"key": r.key, "title": r.title, "passed": r.passed, "measured": r.measured, "seconds": r.seconds}
            for r in results
        ]
        Path(args.out).write_text(json.dumps(rows, indent=2, default=str) + "\n")
    return 0 if all(r.passed for r in results) else 1


# ---------------------------------------------------------------------------


def build_parser():
    ap = argparse.ArgumentParser(prog="profilekit", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("make", help="build a polynomial from a root generator")
    p.add_argument("--roots", help="uniform_grid:LO:HI | random_uniform:LO:HI | dirac:V[:COUNT] | stirling | binomial | file:PATH")
    p.add_argument("--tpoly", help="A:B:ELL, the repeated-action polynomial of (x-1)^n")
    p.add_argument("--n", type=int)
    p.add_argument("--cap", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=["logpoly", "roots"], default="logpoly")
    p.add_argument("--out")
    p.set_defaults(func=cmd_make)

    p = sub.add_parser("profile", help="coefficient profile as CSV (alpha,g,gprime_exp)")
    p.add_argument("input", nargs="?")
    p.add_argument("--closed-form")
    p.add_argument("--size", type=int, default=pr.GRID_SIZE)
    p.add_argument("--out")
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("roots", help="roots of a polynomial (JSON, or CSV when --out ends in .csv)")
    p.add_argument("input")
    p.add_argument("--out")
    p.set_defaults(func=cmd_roots)

    p = sub.add_parser("conv", help="finite free convolution of two polynomials")
    p.add_argument("--op", choices=["boxplus", "boxtimes", "hadamard"], required=True)
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--n", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_conv)

    p = sub.add_parser("diff", help="apply A_{a,b} = n^-b x^a (d/dx)^b ell times")
    p.add_argument("input")
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--b", type=int, required=True)
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--n", type=int)
    p.add_argument("--shift", action="store_true", help="also divide by x^(ell*(a-b))")
    p.add_argument("--out")
    p.set_defaults(func=cmd_diff)

    p = sub.add_parser("transform", help="tabulate G, R, S or psi")
    p.add_argument("input", nargs="?")
    p.add_argument("--closed-form")
    p.add_argument("--kind", choices=["G", "R", "S", "psi"], required=True)
    p.add_argument("--grid", required=True, help="LO:HI:COUNT")
    p.add_argument("--out")
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("compare", help="compare an empirical transform with a closed form")
    p.add_argument("input")
    p.add_argument("--closed-form", required=True)
    p.add_argument("--kind", choices=["G", "S"], default="G")
    p.add_argument("--grid")
    p.add_argument("--tol", type=float, default=1e-2)
    p.add_argument("--runtime", action="store_true", help="add wall time to the summary row")
    p.add_argument("--out")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("suite", help="run the acceptance experiments")
    p.add_argument("--only", help="comma-separated criterion keys, e.g. c01,c07")
    p.add_argument("--out", help="write results as JSON")
    p.set_defaults(func=cmd_suite)
    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(message)s")
    if getattr(args, "input", "x") is None and not getattr(args, "closed_form", None):
        ap.error(f"{args.command} needs an input file or --closed-form")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"profilekit: usage error: {exc}", file=sys.stderr)
        return 2
    except ProfileKitError as exc:
        hint = ""
        if isinstance(exc, RootIsolationError):
            hint = " (coefficients cannot resolve these roots; build the input with --format roots)"
        print(f"profilekit: {type(exc).__name__}: {exc}{hint}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
