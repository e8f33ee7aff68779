"""Exhaustive comparison against the oracle over a tiny key space.

Every sequence of up to ``max_len`` operations over keys ``0 .. 2**m - 1`` is
covered. Observations (search, min, max, iterate, validate) do not change
state, so it is enough to run all of them at every state reachable by
mutations (insert, remove, delete-min).

Both structures are deterministic, and payloads only matter through their
order within one key. Two prefixes that leave the same trie shape, the same
queue lengths and the same oracle contents therefore behave identically from
then on. The search is memoized on that fingerprint; ``memo=False`` replays
every prefix for cross-checking.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from ptrie.core import Layer, Peaks
from ptrie.harness.oracle import StableMultiset
from ptrie.harness.runner import apply, make_structure, step_bound_violations


@dataclass
class ExhaustiveResult:
    max_len: int
    states: int = 0  # distinct (fingerprint, remaining length) pairs expanded
    prefixes: int = 0  # mutation prefixes actually replayed
    sequences: int = 0  # op sequences of length <= max_len represented
    mismatches: list = field(default_factory=list)
    bound_violations: list = field(default_factory=list)

    @property
    def passed(self):
        return not self.mismatches and not self.bound_violations


def _bst_shape(node):
    if node is None:
        return None
    return (node.key, _bst_shape(node.left), _bst_shape(node.right))


def _layer_shape(layer):
    slots = []
    for slot in layer.slots:
        if slot is None:
            slots.append(None)
        elif slot.__class__ is Layer:
            slots.append(_layer_shape(slot))
        else:
            slots.append((slot.key.digits, len(slot.entries)))
    ends = tuple(None if n is None else n.key.digits for n in (layer.min_node, layer.max_node))
    return (tuple(slots), _bst_shape(layer.occ.root), ends)


def fingerprint(target, oracle) -> tuple:
    cores = tuple(
        (_layer_shape(core.root), tuple(n.key.digits for n in core.nodes())) for core in target.cores()
    )
    return cores, tuple(sorted(Counter(k for k, _ in oracle.items()).items()))


def exhaustive_check(max_len: int = 8, mode: str = "u2", k: int = 1, memo: bool = True) -> ExhaustiveResult:
    keys = list(range(1 << int(mode[1:])))
    mutations = [("i", v) for v in keys] + [("r", v) for v in keys] + [("d",)]
    observations = [("s", v) for v in keys] + [("m",), ("x",), ("a",), ("v",)]
    n_ops = len(mutations) + len(observations)
    result = ExhaustiveResult(max_len=max_len)
    result.sequences = sum(n_ops**i for i in range(max_len + 1))
    peaks = Peaks()
    seen: dict = {}

    def replay(prefix):
        target = make_structure(mode, k, peaks)
        oracle = StableMultiset()
        got = want = None
        for i, op in enumerate(prefix):
            if op[0] == "i":
                op = ("i", op[1], f"p{i}")
            got, want = apply(target, op), apply(oracle, op)
        return target, oracle, got, want

    def explore(prefix):
        result.prefixes += 1
        target, oracle, got, want = replay(prefix)
        if got != want:
            result.mismatches.append((tuple(prefix), got, want))
            return
        before = fingerprint(target, oracle)
        for op in observations:
            got, want = apply(target, op), apply(oracle, op)
            if got != want:
                result.mismatches.append((tuple(prefix) + (op,), got, want))
        if fingerprint(target, oracle) != before:
            result.mismatches.append((tuple(prefix), "observation changed state", None))
        remaining = max_len - len(prefix)
        if memo:
            if seen.get(before, -1) >= remaining:
                return
            seen[before] = remaining
        result.states += 1
        if remaining == 0:
            return
        for op in mutations:
            explore(prefix + [op])

    explore([])
    result.bound_violations = step_bound_violations(peaks)
    return result
