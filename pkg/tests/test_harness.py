import json
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ptrie.cli import main
from ptrie.core import Layer, ListNode, PTrie
from ptrie.harness.bench import BinaryHeapQueue, IncompatibleWorkload, bench, k_sweep, rows_to_csv
from ptrie.harness.exhaustive import exhaustive_check
from ptrie.harness.oracle import StableMultiset
from ptrie.harness.runner import diff_run, make_structure, oracle_run, run_matrix
from ptrie.harness.workload import (
    Workload,
    WorkloadError,
    format_key,
    format_workload,
    gen_workload,
    parse_key,
    parse_workload,
)

# ---------------------------------------------------------------- oracle


def test_oracle_min():
    w = Workload("u8", 4, [("i", 5, None), ("i", 3, None), ("m",)])
    assert oracle_run(w)[-1] == 3


def test_oracle_removes_oldest():
    w = Workload("u8", 4, [("i", 5, "A"), ("i", 5, "B"), ("r", 5)])
    assert oracle_run(w)[-1] == (5, "A")


def test_oracle_empty_queries():
    o = StableMultiset()
    assert (o.minimum(), o.maximum(), o.delete_min(), o.remove(1), o.search(1)) == (None,) * 4 + (False,)


def test_heap_baseline_is_stable():
    h = BinaryHeapQueue()
    for i, v in enumerate((2, 1, 2, 1)):
        h.insert(v, i)
    assert [h.delete_min() for _ in range(4)] == [(1, 1), (1, 3), (2, 0), (2, 2)]
    assert h.delete_min() is None


# ---------------------------------------------------------------- workload format


@pytest.mark.parametrize(
    "mode, key",
    [("u16", 0xFF), ("u2", 3), ("i64", -5), ("i64", 2**63 - 1), ("f64", -0.1), ("f64", math.inf), ("str", b'a "q"\x00\xff\\')],
)
def test_key_syntax_round_trip(mode, key):
    assert parse_key(mode, format_key(mode, key)) == key


def test_decimal_floats_accepted():
    assert parse_key("f64", "f64:2.5") == 2.5


@pytest.mark.parametrize("mode, token", [("u8", "u8:100"), ("u8", "i64:1"), ("i64", "i64:x"), ("str", "str:abc")])
def test_bad_keys_rejected(mode, token):
    with pytest.raises(WorkloadError):
        parse_key(mode, token)


@pytest.mark.parametrize("mode", ["u16", "i64", "f64", "str"])
@pytest.mark.parametrize("dist", ["uniform", "clustered", "ascending", "duplicate-heavy"])
def test_format_round_trip(mode, dist):
    w = gen_workload(mode, 300, dist, seed=3)
    back = parse_workload(format_workload(w))
    assert (back.mode, back.k, back.seed, back.name) == (w.mode, w.k, w.seed, w.name)
    assert back.ops == w.ops
    assert format_workload(back) == format_workload(w)


def test_generation_is_deterministic():
    a = format_workload(gen_workload("f64", 2000, "duplicate-heavy", seed=11))
    b = format_workload(gen_workload("f64", 2000, "duplicate-heavy", seed=11))
    assert a == b
    assert a != format_workload(gen_workload("f64", 2000, "duplicate-heavy", seed=12))


def test_zero_ops():
    assert gen_workload("u16", 0).ops == []


def test_malformed_file_rejected():
    with pytest.raises(WorkloadError):
        parse_workload("mode=u8 k=4\nq u8:01\n")
    with pytest.raises(WorkloadError):
        parse_workload("i u8:01\n")


def _mean_node_level(t: PTrie) -> float:
    total = count = 0
    stack = [t.root]
    while stack:
        layer = stack.pop()
        for slot in layer.slots:
            if isinstance(slot, Layer):
                stack.append(slot)
            elif isinstance(slot, ListNode):
                total += layer.level
                count += 1
    return total / count


def test_clustered_keys_sit_deeper_than_uniform():
    depth = {}
    for dist in ("uniform", "clustered"):
        w = gen_workload("u32", 4000, dist, seed=0, k=4, mix="drain")
        t = make_structure("u32", 4)
        for op in w.ops:
            if op[0] == "i":
                t.insert(op[1], op[2])
        depth[dist] = _mean_node_level(t.core)
    assert depth["clustered"] > depth["uniform"]


# ---------------------------------------------------------------- diff_run


def test_empty_workload_passes():
    r = diff_run(Workload("u16", 4))
    assert r.passed and r.n_ops == 0


def test_uniform_run_matches():
    r = diff_run(gen_workload("u16", 100_000, "uniform", seed=42, k=4))
    assert r.passed, (r.mismatches, r.violations[:5])
    assert r.max_link_reads == 1


@pytest.mark.parametrize("mode", ["u8", "i64", "f64", "str"])
def test_paranoid_runs_match(mode):
    r = diff_run(gen_workload(mode, 1500, "duplicate-heavy", seed=1, k=2), paranoid=True)
    assert r.passed, (r.mismatches, r.violations[:5])


def test_skipped_min_update_is_caught(monkeypatch):
    def widen_without_min(self, path, node):
        for layer in path:
            if layer.min_node is None:
                layer.min_node = layer.max_node = node
            elif layer.max_node is node.prev:
                layer.max_node = node
        return len(path)

    monkeypatch.setattr(PTrie, "_widen_spans", widen_without_min)
    r = diff_run(gen_workload("u16", 5000, "uniform", seed=42, k=4))
    assert not r.passed and r.mismatches
    assert r.minimized and len(r.minimized) <= r.mismatches[0]["index"] + 1


def test_replay_is_deterministic():
    w = gen_workload("i64", 3000, "clustered", seed=5, k=8)
    a = diff_run(w, keep_outputs=True)
    b = diff_run(parse_workload(format_workload(w)), keep_outputs=True)
    assert a.to_json(timings=False) == b.to_json(timings=False)
    json.loads(a.to_json())


def test_crash_counts_as_mismatch(monkeypatch):
    def boom(self, key):
        raise RuntimeError("injected")

    monkeypatch.setattr(PTrie, "search", boom)
    r = diff_run(Workload("u8", 4, [("i", 1, None), ("s", 1)]), minimize=False)
    assert r.mismatches[0]["ptrie"].startswith("error: RuntimeError")


def test_matrix_cells_in_order():
    out = run_matrix(["u8"], ["uniform", "clustered"], [1, 4], n_ops=300, workers=1)
    assert [cell for cell, _, _ in out] == [("u8", d, k) for d in ("uniform", "clustered") for k in (1, 4)]
    assert all(r.passed for _, r, _ in out)


@settings(max_examples=150, deadline=None)
@given(
    st.sampled_from(["u4", "i8"]),
    st.integers(1, 4),
    st.lists(
        st.one_of(
            st.tuples(st.sampled_from("irs"), st.integers(-8, 15)),
            st.tuples(st.sampled_from("mxdav")),
        ),
        max_size=80,
    ),
)
def test_any_script_matches_oracle(mode, k, raw):
    lo, hi = (0, 15) if mode == "u4" else (-8, 7)
    ops = []
    for i, op in enumerate(raw):
        if len(op) == 2:
            v = min(max(op[1], lo), hi)
            op = ("i", v, i) if op[0] == "i" else (op[0], v)
        ops.append(op)
    r = diff_run(Workload(mode, k, ops), paranoid=True, minimize=False)
    assert r.passed, (r.mismatches, r.violations)


# ---------------------------------------------------------------- exhaustive


def test_exhaustive_memo_agrees_with_plain_replay():
    plain = exhaustive_check(4, memo=False)
    memo = exhaustive_check(4, memo=True)
    assert plain.passed and memo.passed
    assert plain.prefixes == sum(9**i for i in range(5))
    assert memo.prefixes < plain.prefixes


# ---------------------------------------------------------------- bench


def test_bench_backends_drain_identically():
    w = gen_workload("u32", 20_000, "uniform", seed=0, mix="drain")
    rows = [bench(w, b) for b in ("ptrie", "binheap")]
    assert rows[0].drain == rows[1].drain and len(rows[0].drain) == 10_000
    csv_text = rows_to_csv(rows)
    assert csv_text.splitlines()[0].startswith("backend,mode,k,n_ops,seconds")
    assert len(csv_text.splitlines()) == 3


def test_bench_empty_workload():
    for b in ("ptrie", "binheap"):
        row = bench(Workload("u16", 4), b)
        assert (row.seconds, row.us_per_op, row.drain) == (0.0, 0.0, [])


def test_bench_rejects_non_queue_ops():
    with pytest.raises(IncompatibleWorkload):
        bench(Workload("u16", 4, [("s", 1)]), "binheap")


def test_k_sweep_reports_bound():
    rows = k_sweep(ks=(1, 4), m=32, n=500)
    assert [r.bound_steps for r in rows] == [33, 12]
    assert all(r.max_bst_comparisons <= 1 << r.k for r in rows)


# ---------------------------------------------------------------- cli


def test_cli_round_trip(tmp_path, capsys):
    wl = tmp_path / "w.txt"
    assert main(["gen", "--mode", "u16", "--ops", "2000", "--seed", "4", "--out", str(wl)]) == 0
    assert main(["diff", "--workload", str(wl), "--paranoid"]) == 0
    assert capsys.readouterr().out.startswith("PASS")
    assert main(["diff", "--workload", str(wl), "--json"]) == 0
    assert json.loads(capsys.readouterr().out)["passed"] is True


def test_cli_bench(tmp_path, capsys):
    wl = tmp_path / "w.txt"
    main(["gen", "--mode", "u32", "--ops", "1000", "--mix", "drain", "--out", str(wl)])
    out = tmp_path / "b.csv"
    assert main(["bench", "--workload", str(wl), "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert [line.split(",")[0] for line in lines[1:]] == ["ptrie", "binheap"]
    mixed = tmp_path / "m.txt"
    main(["gen", "--mode", "u32", "--ops", "100", "--out", str(mixed)])
    assert main(["bench", "--workload", str(mixed), "--backend", "binheap"]) == 2


def test_cli_analyze(capsys):
    assert main(["analyze", "--n", "30", "--p", "4", "--m", "8", "--trials", "3"]) == 0
    assert capsys.readouterr().out.startswith("level,formula,finite_formula")
    assert main(["analyze", "--n", "30", "--p", "3"]) == 2


def test_cli_usage_errors(tmp_path, capsys):
    assert main(["diff", "--workload", str(tmp_path / "missing.txt")]) == 2
    bad = tmp_path / "bad.txt"
    bad.write_text("mode=u8 k=9\n")
    assert main(["diff", "--workload", str(bad)]) == 2
    with pytest.raises(SystemExit):
        main(["gen", "--mode", "u8"])


def test_cli_reports_mismatch(tmp_path, monkeypatch, capsys):
    monkeypatch.setattr(PTrie, "search", lambda self, key: False)
    wl = tmp_path / "w.txt"
    wl.write_text("mode=u8 k=4\ni u8:01\ns u8:01\n")
    assert main(["diff", "--workload", str(wl)]) == 1
    assert "mismatch at op 1" in capsys.readouterr().out
