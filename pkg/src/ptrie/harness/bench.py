"""Priority-queue benchmarks: PTrie against a binary heap, and K sweeps."""
from __future__ import annotations

import csv
import heapq
import io
import math
import random
import time
from dataclasses import asdict, dataclass, field

from ptrie.adapters import UnsignedPTrie
from ptrie.core import Peaks
from ptrie.harness.runner import UPDATE_OPS, apply, make_structure
from ptrie.harness.workload import Workload

BACKENDS = ("ptrie", "binheap")
PQ_OPS = frozenset("idm")


class IncompatibleWorkload(ValueError):
    pass


class BinaryHeapQueue:
    """heapq with an insertion counter for stable ties."""

    def __init__(self):
        self._heap = []
        self._seq = 0

    def __len__(self):
        return len(self._heap)

    def insert(self, key, payload=None):
        heapq.heappush(self._heap, (key, self._seq, payload))
        self._seq += 1

    def minimum(self):
        return self._heap[0][0] if self._heap else None

    def delete_min(self):
        if not self._heap:
            return None
        key, _, payload = heapq.heappop(self._heap)
        return key, payload


@dataclass
class BenchRow:
    backend: str
    mode: str
    k: int
    n_ops: int
    seconds: float = 0.0
    us_per_op: float = 0.0
    max_layer_visits: int = 0
    max_bst_comparisons: int = 0
    drain: list = field(default_factory=list, repr=False)  # outputs of every delete-min


def check_pq_workload(w: Workload):
    bad = sorted({op[0] for op in w.ops} - PQ_OPS)
    if bad:
        raise IncompatibleWorkload(f"binheap backend supports only i/d/m ops, workload has {bad}")


def bench(w: Workload, backend: str = "ptrie", repeat: int = 1) -> BenchRow:
    """Best-of-``repeat`` wall time for ``w``; no correctness claims beyond the drain record."""
    if backend not in BACKENDS:
        raise ValueError(f"unknown backend {backend!r}")
    check_pq_workload(w)
    row = BenchRow(backend=backend, mode=w.mode, k=w.k, n_ops=len(w.ops))
    best = math.inf
    for _ in range(max(1, repeat)):
        peaks = Peaks()
        target = make_structure(w.mode, w.k, peaks) if backend == "ptrie" else BinaryHeapQueue()
        drain = []
        t0 = time.perf_counter()
        for op in w.ops:
            out = apply(target, op)
            if op[0] == "d":
                drain.append(out)
        elapsed = time.perf_counter() - t0
        if elapsed < best:
            best = elapsed
            row.drain = drain
            if backend == "ptrie":
                row.max_layer_visits = peaks.max_of("layer_visits", UPDATE_OPS)
                row.max_bst_comparisons = peaks.max_of("bst_comparisons", UPDATE_OPS)
    row.seconds = 0.0 if not w.ops else best
    row.us_per_op = 1e6 * row.seconds / len(w.ops) if w.ops else 0.0
    return row


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    names = [n for n in BenchRow.__dataclass_fields__ if n != "drain"]
    writer = csv.DictWriter(buf, fieldnames=names)
    writer.writeheader()
    for row in rows:
        d = asdict(row)
        d.pop("drain")
        writer.writerow(d)
    return buf.getvalue()


@dataclass
class SweepRow:
    k: int
    m: int
    n: int
    bound_steps: int  # ceil(m/k) + k
    max_steps: int  # worst layer_visits + bst_comparisons of one insert/remove
    max_layer_visits: int
    max_bst_comparisons: int
    bst_height_max: int
    worst_case: float  # max layer_visits / 2 + max BST height
    slot_memory: int
    layers: int


def k_sweep(ks=(1, 2, 4, 8), m: int = 32, n: int = 20000, seed: int = 0) -> list:
    """Fill with ``n`` uniform keys then drain, per ``k``; report instrumented worst cases.

    Memory and BST height are taken when the trie is full.
    """
    rng = random.Random(seed)
    keys = [rng.getrandbits(m) for _ in range(n)]
    rows = []
    for k in ks:
        t = UnsignedPTrie(k, m)
        core = t.core
        worst_steps = worst_visits = worst_cmp = 0

        def note():
            nonlocal worst_steps, worst_visits, worst_cmp
            c = core.counters
            worst_steps = max(worst_steps, c.layer_visits + c.bst_comparisons)
            worst_visits = max(worst_visits, c.layer_visits)
            worst_cmp = max(worst_cmp, c.bst_comparisons)

        for i, key in enumerate(keys):
            t.insert(key, i)
            note()
        full = core.stats()
        while t.delete_min() is not None:
            note()
        depth = -(-m // k)
        rows.append(
            SweepRow(
                k=k,
                m=m,
                n=n,
                bound_steps=depth + k,
                max_steps=worst_steps,
                max_layer_visits=worst_visits,
                max_bst_comparisons=worst_cmp,
                bst_height_max=full.bst_height_max,
                worst_case=worst_visits / 2 + full.bst_height_max,
                slot_memory=full.slot_memory,
                layers=full.layers,
            )
        )
    return rows


def sweep_to_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(SweepRow.__dataclass_fields__))
    writer.writeheader()
    for row in rows:
        writer.writerow(asdict(row))
    return buf.getvalue()
