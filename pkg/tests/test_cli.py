import json

import numpy as np
import pytest

from profilekit import cli
from profilekit.logpoly import LogPoly, roots
from profilekit.rootspace import RootSet


def run(argv, capsys):
    rc = cli.main([str(a) for a in argv])
    cap = capsys.readouterr()
    return rc, cap.out, cap.err


def load(path):
    return cli.load_object(str(path))


# --- exit codes -------------------------------------------------------------


def test_mixed_sign_roots_is_usage_error(tmp_path, capsys):
    f = tmp_path / "r.txt"
    np.savetxt(f, [-1.0, 2.0])
    rc, _, err = run(["make", "--roots", f"file:{f}"], capsys)
    assert rc == 2
    assert "usage error" in err


def test_degree_above_limit_is_usage_error(capsys):
    rc, _, _ = run(["make", "--roots", "binomial", "--n", cli.MAX_DEGREE + 1], capsys)
    assert rc == 2


def test_unknown_criterion_is_usage_error(capsys):
    rc, _, err = run(["suite", "--only", "c99"], capsys)
    assert rc == 2
    assert "c99" in err


def test_range_error_exit_1(capsys):
    rc, _, err = run(["transform", "--closed-form", "uniform:0:1", "--kind", "S", "--grid", "0.2:0.5:3"], capsys)
    assert rc == 1
    assert err.startswith("profilekit: RangeError")
    assert err.count("\n") == 1


def test_argparse_error_exit_2(capsys):
    with pytest.raises(SystemExit) as ei:
        cli.main(["conv", "--op", "nope", "a", "b"])
    assert ei.value.code == 2


def test_missing_input_exit_2(capsys):
    with pytest.raises(SystemExit) as ei:
        cli.main(["profile"])
    assert ei.value.code == 2


# --- make -------------------------------------------------------------------


def test_make_dirac_is_binomial_power(tmp_path, capsys):
    out = tmp_path / "p.json"
    rc, _, _ = run(["make", "--roots", "dirac:-1:50", "--out", out], capsys)
    assert rc == 0
    p = load(out)
    assert isinstance(p, LogPoly) and p.degree == 50
    from scipy.special import gammaln

    k = np.arange(51)
    want = gammaln(51) - gammaln(k + 1) - gammaln(51 - k)
    np.testing.assert_allclose(p.logc, want, atol=1e-10)


def test_make_seeded_is_deterministic(tmp_path, capsys):
    outs = []
    for i in range(2):
        out = tmp_path / f"p{i}.json"
        run(["make", "--roots", "random_uniform:-2:0", "--n", 30, "--seed", 7, "--out", out], capsys)
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]
    other = tmp_path / "q.json"
    run(["make", "--roots", "random_uniform:-2:0", "--n", 30, "--seed", 8, "--out", other], capsys)
    assert other.read_bytes() != outs[0]


def test_make_from_file_and_reflected(tmp_path, capsys):
    f = tmp_path / "roots.csv"
    np.savetxt(f, [0.5, 1.0, 2.0])
    out = tmp_path / "p.json"
    assert run(["make", "--roots", f"file:{f}", "--out", out], capsys)[0] == 0
    p = load(out)
    assert p.reflected and p.degree == 3
    rc, stdout, _ = run(["roots", out], capsys)
    assert rc == 0
    got = json.loads(stdout)
    np.testing.assert_allclose(sorted(got["roots"]), [0.5, 1.0, 2.0], rtol=1e-9)


def test_make_tpoly_both_formats(tmp_path, capsys):
    a, b = tmp_path / "t.json", tmp_path / "t_roots.json"
    run(["make", "--tpoly", "1:1:3", "--n", 8, "--out", a], capsys)
    run(["make", "--tpoly", "1:1:3", "--n", 8, "--format", "roots", "--out", b], capsys)
    p, rs = load(a), load(b)
    assert isinstance(p, LogPoly) and isinstance(rs, RootSet)
    assert p.degree == int(np.sum(rs.m))


def test_make_cap_below_roots(capsys):
    rc, _, _ = run(["make", "--roots", "binomial", "--n", 5, "--cap", 3], capsys)
    assert rc == 2


def test_roots_csv_output(tmp_path, capsys):
    p, out = tmp_path / "p.json", tmp_path / "r.csv"
    run(["make", "--roots", "dirac:-2:4", "--out", p], capsys)
    run(["roots", p, "--out", out], capsys)
    lines = out.read_text().splitlines()
    assert lines[0] == "root,multiplicity"
    z, m = lines[1].split(",")
    assert float(z) == pytest.approx(-2.0, rel=1e-8) and int(m) == 4


# --- conv / diff ------------------------------------------------------------


@pytest.mark.parametrize("op", ["boxplus", "hadamard"])
def test_conv_degree(tmp_path, capsys, op):
    p, q, out = tmp_path / "p.json", tmp_path / "q.json", tmp_path / "o.json"
    run(["make", "--roots", "uniform_grid:-1:-0.1", "--n", 6, "--out", p], capsys)
    run(["make", "--roots", "dirac:-1:4", "--n", 6, "--out", q], capsys)
    rc, _, _ = run(["conv", "--op", op, p, q, "--out", out], capsys)
    assert rc == 0
    r = load(out)
    if op == "boxplus":
        assert r.degree == 6 + 4 - 6
    else:
        assert r.degree == 4


def test_conv_boxtimes(tmp_path, capsys):
    p, q, out = tmp_path / "p.json", tmp_path / "q.json", tmp_path / "o.json"
    run(["make", "--roots", "uniform_grid:0.1:1", "--n", 6, "--out", p], capsys)
    run(["make", "--roots", "dirac:2:6", "--out", q], capsys)
    assert run(["conv", "--op", "boxtimes", p, q, "--out", out], capsys)[0] == 0
    r = load(out)
    assert r.reflected and r.degree == 6
    # multiplying by the Dirac mass at 2 doubles every root
    rs = np.sort(np.abs(roots(r)))
    np.testing.assert_allclose(rs, 2 * np.linspace(0.1, 1, 6), rtol=1e-7)


def test_conv_boxtimes_needs_reflected(tmp_path, capsys):
    p = tmp_path / "p.json"
    run(["make", "--roots", "dirac:-1:3", "--out", p], capsys)
    rc, _, err = run(["conv", "--op", "boxtimes", p, p], capsys)
    assert rc == 1 and "PreconditionError" in err


def test_diff_then_compare_mu_kappa(tmp_path, capsys):
    base, d, res = tmp_path / "u.json", tmp_path / "d.json", tmp_path / "cmp.csv"
    run(["make", "--roots", "uniform_grid:0:1", "--n", 400, "--format", "roots", "--out", base], capsys)
    assert run(["diff", base, "--a", 0, "--b", 1, "--ell", 200, "--n", 400, "--out", d], capsys)[0] == 0
    assert int(np.sum(load(d).m)) == 200
    rc, _, err = run(["compare", d, "--closed-form", "mu_kappa:0.5", "--out", res], capsys)
    assert rc == 0, err
    summary = res.read_text().splitlines()[-1]
    assert summary.startswith("# summary")
    sup = float(summary.split("sup_err=")[1].split()[0])
    assert sup <= 1e-2
    assert "runtime_s" not in summary


def test_compare_nu_aa_on_tpoly_roots(tmp_path, capsys):
    t = tmp_path / "t.json"
    run(["make", "--tpoly", "1:1:200", "--n", 400, "--format", "roots", "--out", t], capsys)
    rc, out, err = run(["compare", t, "--closed-form", "nu_aa:1:0.5"], capsys)
    assert rc == 0, err
    assert out.splitlines()[0] == "arg,empirical,closed_form,abs_err"


def test_compare_is_deterministic_and_fails_on_tight_tol(tmp_path, capsys):
    t = tmp_path / "t.json"
    run(["make", "--tpoly", "1:1:50", "--n", 100, "--format", "roots", "--out", t], capsys)
    first = run(["compare", t, "--closed-form", "nu_aa:1:0.5"], capsys)
    second = run(["compare", t, "--closed-form", "nu_aa:1:0.5"], capsys)
    assert first[1] == second[1]
    rc, _, err = run(["compare", t, "--closed-form", "nu_aa:1:0.5", "--tol", 1e-12], capsys)
    assert rc == 1 and "FAIL" in err
    rc, out, _ = run(["compare", t, "--closed-form", "nu_aa:1:0.5", "--runtime"], capsys)
    assert "runtime_s=" in out.splitlines()[-1]


# --- profile / transform / suite -------------------------------------------


def test_profile_csv(tmp_path, capsys):
    p = tmp_path / "p.json"
    run(["make", "--roots", "binomial", "--n", 20, "--out", p], capsys)
    rc, out, _ = run(["profile", p], capsys)
    assert rc == 0
    lines = out.splitlines()
    assert lines[0].split(",")[0] == "alpha"
    assert len(lines) == 22


def test_profile_closed_form(capsys):
    rc, out, _ = run(["profile", "--closed-form", "bernoulli01:0.3", "--size", 50], capsys)
    assert rc == 0
    assert len(out.splitlines()) == 51


@pytest.mark.parametrize(
    "kind,grid,form,expect",
    [
        ("G", "2:3:2", "dirac:-1", lambda x: 1 / (x + 1)),
        ("R", "0.1:0.3:3", "dirac:-1", lambda s: -np.ones_like(s) * s),
        ("S", "-0.9:-0.1:3", "dirac:2", lambda s: np.full_like(s, 0.5)),
        ("psi", "-3:-2:2", "dirac:2", None),
    ],
)
def test_transform_kinds(capsys, kind, grid, form, expect):
    rc, out, err = run(["transform", "--closed-form", form, "--kind", kind, f"--grid={grid}"], capsys)
    assert rc == 0, err
    rows = np.array([[float(v) for v in ln.split(",")] for ln in out.splitlines()[1:]])
    assert rows.shape[1] == 2 and np.all(np.isfinite(rows[:, 1]))
    if expect is not None:
        np.testing.assert_allclose(rows[:, 1], expect(rows[:, 0]), rtol=1e-12)


def test_suite_single(tmp_path, capsys):
    out = tmp_path / "s.json"
    rc, stdout, _ = run(["suite", "--only", "c05", "--out", out], capsys)
    assert rc == 0
    assert stdout.startswith("[PASS] c05")
    data = json.loads(out.read_text())
    assert data[0]["key"] == "c05" and data[0]["passed"]
