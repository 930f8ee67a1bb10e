import csv
import io
import json

import pytest

from critnode.bench import (
    ROW_FIELDS,
    BenchItem,
    generated_items,
    ratio_histogram,
    run_bench,
    run_pipeline,
    summarize,
)
from critnode.cascade import severity
from critnode.errors import CritnodeError, InvalidInputError
from critnode.oracle import oracle_solve
from support import BROKEN_SOLVER, three_node_system, random_system


def test_pipeline_three_node():
    rep = run_pipeline(three_node_system(), 1)
    assert (rep.l_max, rep.critical_set, rep.f) == (2, (3,), 1)
    assert rep.sat_calls >= 2
    assert set(rep.to_dict()) >= {"l_max", "critical_set", "f", "phase1_seconds", "phase2_seconds"}


@pytest.mark.parametrize("seed", range(4))
def test_pipeline_matches_oracle(seed):
    s = random_system(8, seed)
    rep = run_pipeline(s, 2)
    assert rep.f == oracle_solve(s, 2).optimal_f == severity(s, rep.critical_set)


def test_pipeline_k_n_minus_one():
    s = random_system(7, 3)
    assert run_pipeline(s, 6).f == 1


def test_pipeline_bad_k():
    with pytest.raises(InvalidInputError):
        run_pipeline(three_node_system(), 3)


def _row(name, exact, greedy, maxcas):
    return {"instance": name, "f_exact": exact, "f_greedy": greedy, "f_maxcas": maxcas, "error": ""}


def test_histogram_left_closed():
    rows = [_row("a", 4, 5, 4), _row("b", 4, 4, 6), _row("c", 3, 3, 3)]
    h = ratio_histogram(rows)
    assert h["bin_width"] == 0.25 and h["closed"] == "left"
    assert [(b["lo"], b["hi"], b["greedy"], b["maxcas"]) for b in h["bins"]] == [
        (1.0, 1.25, 2, 2), (1.25, 1.5, 1, 0), (1.5, 1.75, 0, 1)]


def test_histogram_all_optimal_and_skip_errors():
    rows = [_row("a", 2, 2, 2), {**_row("b", "", "", ""), "error": "BackendError: x"}]
    assert ratio_histogram(rows)["bins"] == [{"lo": 1.0, "hi": 1.25, "greedy": 1, "maxcas": 1}]
    assert ratio_histogram([])["bins"] == []


def test_histogram_rejects_beaten_optimum():
    with pytest.raises(CritnodeError):
        ratio_histogram([_row("a", 3, 2, 3)])


@pytest.fixture(scope="module")
def small_bench():
    return run_bench(generated_items([7, 8], 3, seed=5))


def test_bench_rows(small_bench):
    rows = small_bench.rows
    assert [r["instance"] for r in rows] == [f"gen-n{n}-s{s}" for n in (7, 8) for s in (5, 6, 7)]
    for r in rows:
        assert r["error"] == "" and r["matching"] == "cas-approx"
        assert r["f_exact"] <= r["f_greedy"] and r["f_exact"] <= r["f_maxcas"]
    mean = lambda col: sum(r[col] for r in rows) / len(rows)
    assert mean("f_exact") <= min(mean("f_greedy"), mean("f_maxcas"))


def test_bench_csv_deterministic(small_bench):
    again = run_bench(generated_items([7, 8], 3, seed=5))
    assert small_bench.rows_csv(timings=False) == again.rows_csv(timings=False)
    assert small_bench.histogram_json() == again.histogram_json()
    parsed = list(csv.DictReader(io.StringIO(small_bench.rows_csv())))
    assert list(parsed[0]) == ROW_FIELDS and len(parsed) == 6
    assert all(float(r["t_phase1"]) >= 0 for r in parsed)
    assert json.loads(small_bench.histogram_json()) == small_bench.histogram


def test_summary(small_bench):
    summ = small_bench.summary
    assert [s["n"] for s in summ] == [7, 8] and all(s["count"] == 3 for s in summ)
    f = [r["f_exact"] for r in small_bench.rows[:3]]
    m = sum(f) / 3
    var = sum((x - m) ** 2 for x in f) / 2
    assert summ[0]["mean_f_exact"] == f"{m:.4f}" and summ[0]["var_f_exact"] == f"{var:.4f}"
    assert small_bench.summary_csv().splitlines()[0].startswith("n,count,mean_f_exact")


def test_single_row_variance_zero():
    rows = run_bench([BenchItem("three_node_system", three_node_system(), 1)]).rows
    assert summarize(rows)[0]["var_f_exact"] == "0.0000"


def test_failures_become_rows():
    items = [BenchItem("three_node_system", three_node_system(), 1), BenchItem("bad-k", three_node_system(), 5)]
    res = run_bench(items, sat=f"dimacs-exec:{BROKEN_SOLVER}")
    assert res.rows[0]["error"].startswith("BackendError")
    assert res.rows[1]["error"].startswith("InvalidInputError")
    assert res.histogram["bins"] == [] and res.summary == []
    res = run_bench(items)
    assert res.rows[0]["error"] == "" and res.rows[1]["error"]


def test_parallel_same_rows():
    items = generated_items([7], 4, seed=1)
    a = run_bench(items).rows_csv(timings=False)
    b = run_bench(items, workers=2).rows_csv(timings=False)
    assert a == b
