"""Lockstep execution of a workload against the trie and the reference multiset."""
from __future__ import annotations

import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

from ptrie.adapters import FloatPTrie, SignedPTrie, StringPTrie, UnsignedPTrie
from ptrie.codec import PatternConfig
from ptrie.core import Peaks
from ptrie.harness.oracle import StableMultiset
from ptrie.harness.workload import Workload, gen_workload, parse_mode

MUTATING = frozenset("ird")
UPDATE_OPS = ("insert", "remove")
CURSOR_OPS = ("minimum", "maximum", "next", "prev")
MAX_LINK_READS = 3
DEFAULT_CHECK_EVERY = 20000
MINIMIZE_BUDGET = 400


def make_structure(mode: str, k: int, peaks: Peaks | None = None):
    kind, width = parse_mode(mode)
    if kind == "unsigned":
        return UnsignedPTrie(k, width, peaks=peaks)
    if kind == "signed":
        return SignedPTrie(k, width, peaks=peaks)
    if kind == "float":
        return FloatPTrie(k, peaks=peaks)
    return StringPTrie(k, peaks=peaks)


def apply(target, op):
    """Run one op on either backend; both expose the same method names."""
    code = op[0]
    if code == "i":
        target.insert(op[1], op[2])
        return None
    if code == "r":
        return target.remove(op[1])
    if code == "s":
        return target.search(op[1])
    if code == "m":
        return target.minimum()
    if code == "x":
        return target.maximum()
    if code == "d":
        return target.delete_min()
    if code == "a":
        return list(target.items())
    if code == "v":
        return target.validate() if hasattr(target, "validate") else []
    raise ValueError(f"unknown op {code!r}")


def oracle_run(w: Workload) -> list:
    oracle = StableMultiset()
    return [apply(oracle, op) for op in w.ops]


def step_bound_violations(peaks: Peaks) -> list:
    """Check recorded per-op peaks against the cost bounds of each core config."""
    out = []
    for (op, k, m), c in sorted(peaks.by_op.items(), key=lambda kv: tuple(map(str, kv[0]))):
        cfg = PatternConfig(k, m)
        depth = cfg.digit_count
        where = f"{op} k={k} m={m}"
        if op in UPDATE_OPS:
            if depth is not None and c.layer_visits > 2 * depth + 1:
                out.append(f"{where}: layer_visits {c.layer_visits} > {2 * depth + 1}")
            if c.bst_comparisons > cfg.p:
                out.append(f"{where}: bst_comparisons {c.bst_comparisons} > {cfg.p}")
        elif op == "search":
            if depth is not None and c.layer_visits > depth:
                out.append(f"{where}: layer_visits {c.layer_visits} > {depth}")
        elif op in CURSOR_OPS and c.link_reads > MAX_LINK_READS:
            out.append(f"{where}: link_reads {c.link_reads} > {MAX_LINK_READS}")
    return out


@dataclass
class RunReport:
    name: str
    mode: str
    k: int
    n_ops: int
    mismatches: list = field(default_factory=list)  # dicts: index, op, ptrie, oracle
    violations: list = field(default_factory=list)  # validate() and bound failures
    max_layer_visits: int = 0
    max_bst_comparisons: int = 0
    max_link_reads: int = 0
    depth_max: int = 0
    depth_bound_ok: bool = True
    depth_at_bound: bool = False  # some core reached ceil(m/k)
    layers_per_level: list = field(default_factory=list)
    counter_peaks: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)
    outputs: list | None = None
    minimized: list | None = None

    @property
    def passed(self) -> bool:
        return not self.mismatches and not self.violations

    def to_dict(self, timings: bool = True) -> dict:
        d = asdict(self)
        if not timings:
            d.pop("timings")
        d["passed"] = self.passed
        return d

    def to_json(self, timings: bool = True, **kw) -> str:
        return json.dumps(self.to_dict(timings), default=_jsonable, **kw)


def _jsonable(obj):
    if isinstance(obj, bytes):
        return obj.decode("latin-1")
    if isinstance(obj, tuple):
        return list(obj)
    return repr(obj)


def _same(a, b) -> bool:
    # float keys compare by value, so -0.0 == 0.0
    return a == b


def _structure_checks(target, report: RunReport):
    report.violations.extend(target.validate())
    merged = []
    for core in target.cores():
        s = core.stats()
        bound = core.cfg.digit_count
        for i, n in enumerate(s.layers_per_level):
            if i == len(merged):
                merged.append(0)
            merged[i] += n
        report.depth_max = max(report.depth_max, s.depth_max)
        if bound is not None:
            if s.depth_max > bound:
                report.depth_bound_ok = False
                report.violations.append(f"depth {s.depth_max} exceeds ceil(m/k)={bound}")
            if s.depth_max == bound:
                report.depth_at_bound = True
    report.layers_per_level = merged


def diff_run(
    w: Workload,
    *,
    paranoid: bool = False,
    check_every: int = DEFAULT_CHECK_EVERY,
    keep_outputs: bool = False,
    minimize: bool = True,
) -> RunReport:
    """Run ``w`` on the trie and the oracle side by side.

    Stops at the first divergence. ``validate()`` runs after every mutating op
    when ``paranoid``, otherwise every ``check_every`` ops and at the end.
    """
    peaks = Peaks()
    target = make_structure(w.mode, w.k, peaks)
    oracle = StableMultiset()
    report = RunReport(name=w.name, mode=w.mode, k=w.k, n_ops=len(w.ops))
    outputs = [] if keep_outputs else None
    t_trie: dict = {}
    t_oracle: dict = {}
    clock = time.perf_counter
    for index, op in enumerate(w.ops):
        code = op[0]
        t0 = clock()
        try:
            got = apply(target, op)
        except Exception as exc:  # a crash is a mismatch, not a harness failure
            got = f"error: {type(exc).__name__}: {exc}"
        t1 = clock()
        want = apply(oracle, op)
        t2 = clock()
        t_trie[code] = t_trie.get(code, 0.0) + (t1 - t0)
        t_oracle[code] = t_oracle.get(code, 0.0) + (t2 - t1)
        if outputs is not None:
            outputs.append(got)
        if not _same(got, want):
            report.mismatches.append({"index": index, "op": op, "ptrie": got, "oracle": want})
            break
        if (paranoid and code in MUTATING) or (check_every and (index + 1) % check_every == 0):
            _structure_checks(target, report)
            if report.violations:
                report.violations.insert(0, f"after op {index}: {op!r}")
                break
    if not report.mismatches and not report.violations:
        _structure_checks(target, report)
    report.violations.extend(step_bound_violations(peaks))
    report.max_layer_visits = peaks.max_of("layer_visits", UPDATE_OPS)
    report.max_bst_comparisons = peaks.max_of("bst_comparisons", UPDATE_OPS)
    report.max_link_reads = peaks.max_of("link_reads", CURSOR_OPS)
    report.counter_peaks = {
        f"{op}/k={k}/m={m}": asdict(c)
        for (op, k, m), c in sorted(peaks.by_op.items(), key=lambda kv: tuple(map(str, kv[0])))
    }
    report.timings = {"ptrie": t_trie, "oracle": t_oracle}
    report.outputs = outputs
    if report.mismatches and minimize:
        report.minimized = minimize_failure(w, report.mismatches[0]["index"])
    return report


def _fails(w: Workload, ops) -> bool:
    trial = Workload(mode=w.mode, k=w.k, ops=list(ops), seed=w.seed, name=w.name)
    return bool(diff_run(trial, minimize=False, check_every=0).mismatches)


def minimize_failure(w: Workload, index: int, budget: int = MINIMIZE_BUDGET) -> list:
    """Shrink the failing prefix ``ops[:index + 1]`` by chunk deletion."""
    ops = list(w.ops[: index + 1])
    chunk = max(1, len(ops) // 2)
    runs = 0
    while chunk >= 1 and runs < budget:
        i = 0
        while i < len(ops) and runs < budget:
            candidate = ops[:i] + ops[i + chunk :]
            runs += 1
            if candidate and _fails(w, candidate):
                ops = candidate
            else:
                i += chunk
        if chunk == 1:
            break
        chunk //= 2
    return ops


def _matrix_cell(args):
    mode, dist, k, n_ops, seed = args
    w = gen_workload(mode, n_ops, dist, seed=seed, k=k)
    t0 = time.perf_counter()
    report = diff_run(w)
    return args, report, time.perf_counter() - t0


def run_matrix(modes, dists, ks, n_ops: int, seed: int = 42, workers: int | None = None) -> list:
    """Differential runs over every (mode, dist, k); shards run in parallel.

    Returns ``[(mode, dist, k), report, seconds]`` in matrix order.
    """
    cells = [(mode, dist, k, n_ops, seed) for mode in modes for dist in dists for k in ks]
    workers = workers or os.cpu_count() or 1
    if workers == 1:
        results = [_matrix_cell(c) for c in cells]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_matrix_cell, cells))
    return [(args[:3], report, secs) for args, report, secs in results]
