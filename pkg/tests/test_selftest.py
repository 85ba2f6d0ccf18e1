import functools
import re

from cwtss import cli
from cwtss.cwexpr import parse_expr
from cwtss.dp import solve
from cwtss.formats import parse_tss
from cwtss.selftest import run_selftest


def corrupted(expr, thr):
    return solve(expr, thr) + 1


def test_selftest_is_deterministic():
    a = run_selftest(seed=7, cases=10)
    b = run_selftest(seed=7, cases=10)
    assert a.ok and (a.cases, a.checks) == (b.cases, b.checks) == (10, 30)


def test_corrupted_solver_is_caught():
    res = run_selftest(seed=1, cases=5, solver=corrupted)
    assert not res.ok
    assert all(f.kind == "dp != oracle" for f in res.failures)
    assert len(res.failures) == 5


def test_counterexample_replays_through_the_cli(tmp_path, capsys):
    failure = run_selftest(seed=1, cases=3, solver=corrupted).failures[0]
    (tmp_path / "f.tss").write_text(failure.tss)
    (tmp_path / "f.cwe").write_text(failure.cwe)
    dp_reported, oracle_reported = map(int, re.findall(r"\d+", failure.detail))

    assert cli.main(["oracle", str(tmp_path / "f.tss"), "--json"]) == 0
    assert f'"min_target_size": {oracle_reported}' in capsys.readouterr().out
    g, thr = parse_tss(failure.tss)
    expr = parse_expr(failure.cwe)
    assert corrupted(expr, thr) == dp_reported != oracle_reported
    assert cli.main(["solve", str(tmp_path / "f.tss"), str(tmp_path / "f.cwe"), "--json"]) == 0


def test_cli_exit_code_with_corrupted_solver(monkeypatch, capsys):
    monkeypatch.setattr(cli, "run_selftest", functools.partial(run_selftest, solver=corrupted))
    code = cli.main(["selftest", "--seed", "1", "--cases", "3"])
    out = capsys.readouterr().out
    assert code == 1
    assert "--- instance.tss" in out and "--- instance.cwe" in out
    assert out.rstrip().splitlines()[-1].startswith("FAIL")
