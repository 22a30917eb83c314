import csv
import json

import pytest

from boxview import cli, propagators
from boxview.cli import (
    RECORD_FIELDS,
    BenchOptions,
    RatioSummary,
    load_suite,
    parse_brancher,
    parse_variants,
    run_bench,
    static_dynamic_ratios,
    summarize,
    views_vars_ratios,
)
from boxview.engine import ValueSelect, VarSelect
from boxview.propagators import ModelVariant
from boxview.views import mul_support_ge


def solve(capsys, *argv) -> tuple[int, dict, str]:
    code = cli.main(["solve", *argv])
    out, err = capsys.readouterr()
    return code, (json.loads(out) if out.strip() else {}), err


def test_solve_examples(capsys):
    code, rec, _ = solve(capsys, "golomb", "--m", "5", "--length", "11", "--variant", "views-static")
    assert code == 0 and rec["status"] == "sat"
    _, rec, _ = solve(capsys, "golomb", "--m", "5", "--length", "10", "--variant", "vars")
    assert rec["status"] == "unsat"
    _, rec, _ = solve(capsys, "labs", "--n", "5", "--variant", "views-static")
    assert (rec["status"], rec["objective"]) == ("optimal", 2)


def test_record_schema(capsys):
    _, rec, _ = solve(capsys, "nonlinear", "--n", "5", "--d", "3", "--c", "2", "--a1", "2", "--a2", "2")
    assert tuple(rec) == RECORD_FIELDS
    for key in ("propagations", "fails", "domain_updates", "view_calls", "arith_ops", "solutions"):
        assert isinstance(rec[key], int) and rec[key] >= 0
    assert isinstance(rec["time_ms"], float)


def test_all_solutions_and_brancher(capsys):
    _, rec, _ = solve(capsys, "ecc", "--a", "2", "--n", "2", "--l", "3", "--d", "2", "--all-solutions",
                      "--brancher", "first-fail:bisect")
    assert rec["solutions"] == 32


def test_timeout_is_a_status(capsys):
    code, rec, _ = solve(capsys, "golomb", "--m", "11", "--length", "70", "--time-limit", "0.05")
    assert code == 0 and rec["status"] == "timeout"


def test_dumps_go_to_stderr(capsys):
    code, rec, err = solve(capsys, "golomb", "--m", "4", "--length", "6", "--dump-views", "--dump-model")
    assert code == 0 and rec["status"] == "sat"
    assert "var x4 1 6" in err
    assert "DistinctBounds: (sub (var x2) (var x1))" in err


def test_seed_from_environment(capsys, monkeypatch):
    args = ("linear", "--n", "6", "--d", "3", "--c", "2", "--a", "3", "--dump-model")
    monkeypatch.setenv("BOXVIEW_SEED", "5")
    _, _, env_dump = solve(capsys, *args)
    _, _, flag_dump = solve(capsys, *args, "--seed", "5")
    monkeypatch.delenv("BOXVIEW_SEED")
    _, _, default_dump = solve(capsys, *args)
    assert env_dump == flag_dump and "s5" in env_dump
    assert "s1" in default_dump
    monkeypatch.setenv("BOXVIEW_SEED", "five")
    assert cli.main(["solve", *args]) == 1


@pytest.mark.parametrize("argv", [
    ["solve", "golomb", "--m", "2", "--length", "5"],
    ["solve", "golomb", "--m", "5", "--length", "11", "--variant", "fast"],
    ["solve", "golomb", "--m", "five"],
    ["solve", "chess"],
    ["solve", "labs", "--n", "5", "--brancher", "random"],
    ["bench", "--threshold", "2"],
    ["bench", "--variants", "vars,quick"],
    ["verify", "--exhaustive-bound", "99"],
    ["verify", "--only", "nothing"],
    [],
])
def test_invalid_arguments_exit_1(argv, capsys):
    with pytest.raises(SystemExit) as e:
        code = cli.main(argv)
        raise SystemExit(code)
    assert e.value.code == 1


def test_internal_error_exits_2(monkeypatch, capsys):
    def boom(*a, **k):
        raise RuntimeError("kaput")

    monkeypatch.setattr(cli, "solve_model", boom)
    assert cli.main(["solve", "labs", "--n", "4"]) == 2
    assert "internal error" in capsys.readouterr().err


def test_parsers():
    b = parse_brancher("first-fail:bisect")
    assert (b.var_select, b.value_select) == (VarSelect.FIRST_FAIL, ValueSelect.BISECT)
    assert parse_brancher("input-order").value_select is ValueSelect.MIN_VALUE
    assert parse_variants("all") == list(ModelVariant)
    assert parse_variants("reported") is None
    assert parse_variants("vars, views-static") == [ModelVariant.VARS, ModelVariant.VIEWS_STATIC]


def test_shipped_suites_load():
    for full in (False, True):
        suite = load_suite(None, full)
        assert {e["problem"] for e in suite} == {"nonlinear", "golomb", "labs", "golfers", "ecc"}


def test_bad_suite_file(tmp_path):
    p = tmp_path / "s.json"
    p.write_text(json.dumps({"problem": "labs"}))
    with pytest.raises(cli.UsageError):
        load_suite(str(p))


def test_ratio_summary():
    r = RatioSummary.of("g", [0.5, 2.0, float("inf")])
    assert r.count == 2 and r.geometric_mean == pytest.approx(1.0)
    assert (r.min, r.max) == (0.5, 2.0)
    assert RatioSummary.of("g", []) is None


def _rows(variant_times: dict, status="sat"):
    return [{"problem": "p", "instance": "i", "variant": v, "status": status, "time_ms": t}
            for v, t in variant_times.items()]


def test_two_variants_one_instance_give_one_ratio_row():
    rows = _rows({"views-static": 2.0, "views-dynamic": 4.0})
    assert static_dynamic_ratios(rows) == [("p", "i", 0.5)]
    table = summarize(static_dynamic_ratios(rows))
    assert [t.group for t in table] == ["p", "All"]


def test_timeouts_are_excluded_from_ratios():
    rows = _rows({"views-static": 2.0}) + _rows({"views-dynamic": 4.0}, status="timeout")
    assert static_dynamic_ratios(rows) == []
    rows = _rows({"vars": 10.0, "vars-global": 4.0, "views-static": 3.0, "views-dynamic": 6.0})
    assert views_vars_ratios(rows) == [("p", "i", 0.75)]


def test_bench_end_to_end(tmp_path, capsys):
    suite = tmp_path / "suite.json"
    suite.write_text(json.dumps([
        {"problem": "golomb", "params": {"m": 5, "length": 11}},
        {"problem": "golomb", "params": {"m": 2, "length": 11}},
    ]))
    prefix = tmp_path / "out" / "run"
    code = cli.main(["bench", "--suite", str(suite), "--variants", "views-static,views-dynamic",
                     "--repeats", "2", "--max-repeats", "3", "--out", str(prefix), "--quiet"])
    out = capsys.readouterr().out
    assert code == 0 and "views-static / views-dynamic" in out
    lines = [json.loads(x) for x in (tmp_path / "out" / "run.jsonl").read_text().splitlines()]
    assert len(lines) == 3 and lines[-1]["status"].startswith("error")
    with open(tmp_path / "out" / "run.csv") as fh:
        assert tuple(next(csv.reader(fh))) == RECORD_FIELDS
    summary = json.loads((tmp_path / "out" / "run.summary.json").read_text())
    assert summary["static_vs_dynamic"][-1]["count"] == 1


def test_bench_counts_are_deterministic():
    suite = [{"problem": "nonlinear", "params": {"n": 6, "d": 3, "c": 2, "a1": 3, "a2": 2, "seed": 4}},
             {"problem": "labs", "params": {"n": 7}}]
    opts = BenchOptions(min_repeats=1, max_repeats=1)
    strip = lambda recs: [{k: v for k, v in r.items() if k != "time_ms"} for r in recs]  # noqa: E731
    assert strip(run_bench(suite, None, opts)) == strip(run_bench(suite, None, opts))


def test_verify_single_suite(capsys):
    assert cli.main(["verify", "--only", "taxonomy"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("PASS taxonomy")
    assert out.count("kept by") == 7


def test_injected_faulty_mul_inverse_is_caught(monkeypatch, capsys):
    def faulty(i, yl, yh):
        lo, hi = mul_support_ge(i, yl, yh)
        return (None if lo is None else lo + 1), hi

    monkeypatch.setattr(propagators, "mul_support_ge", faulty)
    code = cli.main(["verify", "--only", "propagator-completeness"])
    out = capsys.readouterr().out
    assert code == 1
    assert "mul_eq" in out and "sound=False" in out
    assert "counterexample" in out and "'property': 'sound'" in out
