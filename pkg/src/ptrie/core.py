"""The PTrie core.

Structure
---------
* A trie of :class:`Layer` objects. Each layer has a table of ``2**k`` slots;
  a slot is empty, a child layer, or a leaf :class:`ListNode`.
* Every layer keeps a plain (unbalanced) binary search tree over its occupied
  slot indices, plus links to the smallest and largest list node below it.
* All list nodes form one doubly linked list between two sentinels, in key
  order. A node holds a FIFO queue of entries that share its key.

A leaf sits as high in the trie as its key allows: a new key that collides
with a resident leaf pushes the resident one level down into a fresh layer.
Removal deletes layers that become empty but never merges a layer that is
left with a single occupant.

Costs per operation are recorded in :class:`OpCounters`; a shared
:class:`Peaks` object keeps the per-operation maxima across many tries.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Any, Iterator

from ptrie.codec import DigitString, InvalidKeyError, PatternConfig


class StaleHandleError(RuntimeError):
    """A node handle was used after its node left the list."""


class Entry:
    __slots__ = ("key", "payload", "seq")

    def __init__(self, key: DigitString, payload: Any, seq: int):
        self.key = key
        self.payload = payload
        self.seq = seq

    def __repr__(self):
        return f"Entry({self.key.key!r}, {self.payload!r}, seq={self.seq})"


class ListNode:
    """A leaf of the trie and a link of the sorted list."""

    __slots__ = ("key", "entries", "prev", "next")

    def __init__(self, key, entry=None):
        self.key = key
        self.entries = deque() if entry is None else deque((entry,))
        self.prev = None
        self.next = None

    @property
    def live(self) -> bool:
        return bool(self.entries)

    def __repr__(self):
        key = None if self.key is None else self.key.key
        return f"ListNode({key!r}, n={len(self.entries)})"


class _BSTNode:
    __slots__ = ("key", "left", "right")

    def __init__(self, key):
        self.key = key
        self.left = None
        self.right = None


class OccupancyBST:
    """Plain unbalanced BST of the used slot indices of one layer.

    ``insert`` and ``delete`` return the number of key comparisons made.
    """

    __slots__ = ("root", "size")

    def __init__(self):
        self.root = None
        self.size = 0

    def insert(self, key: int):
        """Insert ``key``; return ``(parent_key, is_right_child, comparisons)``.

        ``parent_key`` is None when the tree was empty.
        """
        node = self.root
        self.size += 1
        if node is None:
            self.root = _BSTNode(key)
            return None, False, 0
        comparisons = 0
        while True:
            comparisons += 1
            if key > node.key:
                if node.right is None:
                    node.right = _BSTNode(key)
                    return node.key, True, comparisons
                node = node.right
            elif key < node.key:
                if node.left is None:
                    node.left = _BSTNode(key)
                    return node.key, False, comparisons
                node = node.left
            else:
                self.size -= 1
                raise KeyError(f"index {key} already occupied")

    def delete(self, key: int) -> int:
        if self.size == 1:
            # occupancy invariant guarantees the lone node is `key`
            if self.root.key != key:
                raise KeyError(key)
            self.root = None
            self.size = 0
            return 0
        parent = None
        node = self.root
        comparisons = 0
        while node is not None:
            comparisons += 1
            if key == node.key:
                break
            parent = node
            node = node.right if key > node.key else node.left
        if node is None:
            raise KeyError(key)
        if node.left is not None and node.right is not None:
            succ_parent = node
            succ = node.right
            while succ.left is not None:
                succ_parent = succ
                succ = succ.left
            node.key = succ.key
            parent, node = succ_parent, succ
        child = node.left if node.left is not None else node.right
        if parent is None:
            self.root = child
        elif parent.left is node:
            parent.left = child
        else:
            parent.right = child
        self.size -= 1
        return comparisons

    def min(self):
        node = self.root
        if node is None:
            return None
        while node.left is not None:
            node = node.left
        return node.key

    def max(self):
        node = self.root
        if node is None:
            return None
        while node.right is not None:
            node = node.right
        return node.key

    def height(self) -> int:
        """Number of nodes on the longest root-to-leaf path."""
        best = 0
        stack = [(self.root, 1)] if self.root is not None else []
        while stack:
            node, h = stack.pop()
            best = max(best, h)
            if node.left is not None:
                stack.append((node.left, h + 1))
            if node.right is not None:
                stack.append((node.right, h + 1))
        return best

    def inorder(self) -> list:
        out, stack, node = [], [], self.root
        while stack or node is not None:
            while node is not None:
                stack.append(node)
                node = node.left
            node = stack.pop()
            out.append(node.key)
            node = node.right
        return out

    def is_search_tree(self) -> bool:
        keys = self.inorder()
        return len(keys) == self.size and all(a < b for a, b in zip(keys, keys[1:]))


class Layer:
    __slots__ = ("slots", "occ", "min_node", "max_node", "parent", "parent_index", "level")

    def __init__(self, p: int, parent=None, parent_index=None, level=1):
        self.slots = [None] * p
        self.occ = OccupancyBST()
        self.min_node = None
        self.max_node = None
        self.parent = parent
        self.parent_index = parent_index
        self.level = level

    def __repr__(self):
        return f"Layer(level={self.level}, used={self.occ.size})"


@dataclass
class OpCounters:
    layer_visits: int = 0
    bst_comparisons: int = 0
    list_splices: int = 0
    pushdowns: int = 0
    cascade_deletes: int = 0
    link_reads: int = 0


_ONE_READ = OpCounters(link_reads=1)


class Peaks:
    """Per-operation maxima of :class:`OpCounters`, keyed by ``(op, k, m)``."""

    def __init__(self):
        self.by_op: dict = {}

    def record(self, key: tuple, c: OpCounters):
        peak = self.by_op.get(key)
        if peak is None:
            self.by_op[key] = OpCounters(
                c.layer_visits, c.bst_comparisons, c.list_splices, c.pushdowns, c.cascade_deletes, c.link_reads
            )
            return
        if c.layer_visits > peak.layer_visits:
            peak.layer_visits = c.layer_visits
        if c.bst_comparisons > peak.bst_comparisons:
            peak.bst_comparisons = c.bst_comparisons
        if c.list_splices > peak.list_splices:
            peak.list_splices = c.list_splices
        if c.pushdowns > peak.pushdowns:
            peak.pushdowns = c.pushdowns
        if c.cascade_deletes > peak.cascade_deletes:
            peak.cascade_deletes = c.cascade_deletes
        if c.link_reads > peak.link_reads:
            peak.link_reads = c.link_reads

    def merge(self, other: "Peaks"):
        for key, c in other.by_op.items():
            self.record(key, c)

    def max_of(self, name: str, ops=None) -> int:
        vals = [getattr(c, name) for key, c in self.by_op.items() if ops is None or key[0] in ops]
        return max(vals, default=0)


@dataclass
class LayerStats:
    layers_per_level: list = field(default_factory=list)  # index 0 is the root level
    layers: int = 0
    nodes: int = 0
    entries: int = 0
    depth_max: int = 0  # deepest level holding a list node
    slot_memory: int = 0  # layers * 2**k
    bst_nodes: int = 0
    bst_height_max: int = 0


class PTrie:
    """Priority trie over :class:`DigitString` keys.

    >>> from ptrie.codec import PatternConfig, digits
    >>> cfg = PatternConfig(k=4, m=8)
    >>> t = PTrie(cfg)
    >>> for v in (5, 3, 5):
    ...     _ = t.insert(digits(v, cfg), payload=v)
    >>> [e.key.key for e in t]
    [3, 5, 5]
    """

    def __init__(self, cfg: PatternConfig, *, peaks: Peaks | None = None, debug: bool = False):
        if not isinstance(cfg, PatternConfig):
            raise TypeError("cfg must be a PatternConfig")
        self.cfg = cfg
        self.p = cfg.p
        self.root = Layer(self.p)
        self.head = ListNode(None)
        self.tail = ListNode(None)
        self.head.next = self.tail
        self.tail.prev = self.head
        self.count = 0
        self.distinct = 0
        self.counters = OpCounters()
        self.peaks = peaks
        self.debug = debug
        self._seq = 0
        self._expected_len = cfg.digit_count
        self._unrecorded_reads = {"minimum", "maximum", "next", "prev"}

    def __len__(self):
        return self.count

    def __bool__(self):
        return self.count > 0

    def __iter__(self) -> Iterator[Entry]:
        for node in self.nodes():
            yield from node.entries

    def __repr__(self):
        return f"PTrie(k={self.cfg.k}, m={self.cfg.m}, count={self.count}, distinct={self.distinct})"

    # ------------------------------------------------------------------ plumbing

    def _check_key(self, key):
        if not isinstance(key, DigitString):
            raise InvalidKeyError(f"expected a DigitString, got {type(key).__name__}")
        n = self._expected_len
        if n is None:
            if not key.digits or key.digits[-1] != 0:
                raise InvalidKeyError("string key is not terminated")
        elif len(key.digits) != n:
            raise InvalidKeyError(f"key has {len(key.digits)} digits, expected {n}")

    def _record(self, op, visits=0, comparisons=0, splices=0, pushdowns=0, cascades=0):
        c = self.counters = OpCounters(visits, comparisons, splices, pushdowns, cascades, 0)
        if self.peaks is not None:
            self.peaks.record((op, self.cfg.k, self.cfg.m), c)

    def _record_read(self, op):
        # cursor ops always cost one link read; record each kind once
        self._unrecorded_reads.discard(op)
        if self.peaks is not None:
            self.peaks.record((op, self.cfg.k, self.cfg.m), _ONE_READ)

    @staticmethod
    def _descendant(slot, want_max):
        if slot.__class__ is ListNode:
            return slot
        return slot.max_node if want_max else slot.min_node

    def _widen_spans(self, path, node) -> int:
        """Extend min/max links of every layer on ``path`` to cover ``node``.

        A layer's descendants are contiguous in the list, so the new node is
        the layer's new minimum exactly when it was spliced just before the
        old one.
        """
        for layer in path:
            if layer.min_node is None:
                layer.min_node = layer.max_node = node
                continue
            if layer.min_node is node.next:
                layer.min_node = node
            if layer.max_node is node.prev:
                layer.max_node = node
        return len(path)

    # ------------------------------------------------------------------ operations

    def insert(self, key: DigitString, payload: Any = None) -> ListNode:
        self._check_key(key)
        kd = key.digits
        entry = Entry(key, payload, self._seq)
        self._seq += 1
        layer = self.root
        path = [layer]
        depth = 0
        visits = 1
        pushdowns = 0
        while True:
            d = kd[depth]
            slot = layer.slots[d]
            if slot is None:
                break
            if slot.__class__ is Layer:
                layer = slot
            elif slot.key.digits == kd:
                slot.entries.append(entry)
                self.count += 1
                self._record("insert", visits)
                return slot
            else:
                # push the resident node down into a new layer
                child = Layer(self.p, layer, d, layer.level + 1)
                rd = slot.key.digits[depth + 1]
                child.slots[rd] = slot
                child.occ.insert(rd)
                child.min_node = child.max_node = slot
                layer.slots[d] = child
                layer = child
                pushdowns += 1
            path.append(layer)
            depth += 1
            visits += 1

        node = ListNode(key, entry)
        parent_index, right, comparisons = layer.occ.insert(d)
        if parent_index is None:
            before, after = self.head, self.head.next
        elif right:
            before = self._descendant(layer.slots[parent_index], True)
            after = before.next
        else:
            after = self._descendant(layer.slots[parent_index], False)
            before = after.prev
        node.prev, node.next = before, after
        before.next = node
        after.prev = node
        layer.slots[d] = node
        visits += self._widen_spans(path, node)
        self.count += 1
        self.distinct += 1
        self._record("insert", visits, comparisons, 1, pushdowns)
        return node

    def find(self, key: DigitString) -> ListNode | None:
        """Return the node holding ``key``, or None."""
        self._check_key(key)
        kd = key.digits
        layer = self.root
        depth = 0
        visits = 1
        while True:
            slot = layer.slots[kd[depth]]
            if slot is None:
                break
            if slot.__class__ is Layer:
                layer = slot
                depth += 1
                visits += 1
                continue
            if slot.key.digits != kd:
                slot = None
            break
        self._record("search", visits)
        return slot

    def search(self, key: DigitString) -> bool:
        return self.find(key) is not None

    def remove(self, key: DigitString) -> Entry | None:
        """Remove and return the oldest entry with ``key``; None if absent."""
        self._check_key(key)
        kd = key.digits
        layer = self.root
        depth = 0
        visits = 1
        while True:
            d = kd[depth]
            slot = layer.slots[d]
            if slot is None:
                self._record("remove", visits)
                return None
            if slot.__class__ is not Layer:
                break
            layer = slot
            depth += 1
            visits += 1
        if slot.key.digits != kd:
            self._record("remove", visits)
            return None

        entry = slot.entries.popleft()
        self.count -= 1
        if slot.entries:
            self._record("remove", visits)
            return entry

        before, after = slot.prev, slot.next
        before.next = after
        after.prev = before
        self.distinct -= 1
        layer.slots[d] = None
        comparisons = layer.occ.delete(d)
        cascades = 0
        while layer.occ.size == 0 and layer.parent is not None:
            parent = layer.parent
            parent.slots[layer.parent_index] = None
            comparisons += parent.occ.delete(layer.parent_index)
            cascades += 1
            layer = parent
            visits += 1
        # the removed node can only be an extreme of a contiguous chain of ancestors
        empty = layer.occ.size == 0
        while layer is not None:
            touched = False
            if layer.min_node is slot:
                layer.min_node = None if empty else after
                touched = True
            if layer.max_node is slot:
                layer.max_node = None if empty else before
                touched = True
            if not touched:
                break
            layer = layer.parent
            if layer is not None:
                visits += 1
        self._record("remove", visits, comparisons, 1, 0, cascades)
        return entry

    def minimum(self) -> ListNode | None:
        node = self.head.next
        self.counters = _ONE_READ
        if "minimum" in self._unrecorded_reads:
            self._record_read("minimum")
        return None if node is self.tail else node

    def maximum(self) -> ListNode | None:
        node = self.tail.prev
        self.counters = _ONE_READ
        if "maximum" in self._unrecorded_reads:
            self._record_read("maximum")
        return None if node is self.head else node

    def next(self, node: ListNode) -> ListNode | None:
        if self.debug and not node.entries:
            raise StaleHandleError("node was removed")
        nxt = node.next
        self.counters = _ONE_READ
        if "next" in self._unrecorded_reads:
            self._record_read("next")
        return None if nxt is self.tail else nxt

    def prev(self, node: ListNode) -> ListNode | None:
        if self.debug and not node.entries:
            raise StaleHandleError("node was removed")
        prv = node.prev
        self.counters = _ONE_READ
        if "prev" in self._unrecorded_reads:
            self._record_read("prev")
        return None if prv is self.head else prv

    def delete_min(self) -> Entry | None:
        node = self.minimum()
        if node is None:
            return None
        return self.remove(node.key)

    def delete_max(self) -> Entry | None:
        node = self.maximum()
        if node is None:
            return None
        return self.remove(node.key)

    def nodes(self, reverse: bool = False) -> Iterator[ListNode]:
        if reverse:
            node, end = self.tail.prev, self.head
            while node is not end:
                yield node
                node = node.prev
        else:
            node, end = self.head.next, self.tail
            while node is not end:
                yield node
                node = node.next

    # ------------------------------------------------------------------ inspection

    def _layers(self) -> Iterator[Layer]:
        stack = [self.root]
        while stack:
            layer = stack.pop()
            yield layer
            for slot in layer.slots:
                if slot.__class__ is Layer:
                    stack.append(slot)

    def stats(self) -> LayerStats:
        s = LayerStats()
        for layer in self._layers():
            while len(s.layers_per_level) < layer.level:
                s.layers_per_level.append(0)
            s.layers_per_level[layer.level - 1] += 1
            s.layers += 1
            s.bst_nodes += layer.occ.size
            s.bst_height_max = max(s.bst_height_max, layer.occ.height())
            for slot in layer.slots:
                if slot.__class__ is ListNode:
                    s.nodes += 1
                    s.entries += len(slot.entries)
                    s.depth_max = max(s.depth_max, layer.level)
        s.slot_memory = s.layers * self.p
        return s

    def validate(self) -> list:
        """Check every structural invariant; return a list of violation messages."""
        errors = []
        cfg = self.cfg
        bound = cfg.digit_count

        # the list, head to tail
        list_nodes = []
        node, guard = self.head, self.count + 2
        if self.head.prev is not None or self.tail.next is not None:
            errors.append("sentinel has an outer link")
        while node.next is not None and node.next is not self.tail and guard > 0:
            nxt = node.next
            if nxt.prev is not node:
                errors.append(f"broken back link at {nxt!r}")
            list_nodes.append(nxt)
            node = nxt
            guard -= 1
        if node.next is not self.tail or self.tail.prev is not node:
            errors.append("list does not end at the tail sentinel")
        for a, b in zip(list_nodes, list_nodes[1:]):
            if not a.key.digits < b.key.digits:
                errors.append(f"list order violated between {a!r} and {b!r}")
        total = 0
        for n in list_nodes:
            if not n.entries:
                errors.append(f"empty queue in {n!r}")
            for e in n.entries:
                if e.key.digits != n.key.digits:
                    errors.append(f"entry {e!r} filed under {n!r}")
            seqs = [e.seq for e in n.entries]
            if any(a >= b for a, b in zip(seqs, seqs[1:])):
                errors.append(f"queue of {n!r} is not FIFO")
            total += len(n.entries)
        if total != self.count:
            errors.append(f"count {self.count} != {total} queued entries")
        if len(list_nodes) != self.distinct:
            errors.append(f"distinct {self.distinct} != {len(list_nodes)} list nodes")

        # the trie, in slot order; must reproduce the list
        trie_nodes = []

        def walk(layer, prefix):
            start = len(trie_nodes)
            used = []
            for i, slot in enumerate(layer.slots):
                if slot is None:
                    continue
                used.append(i)
                if slot.__class__ is Layer:
                    if slot.parent is not layer or slot.parent_index != i:
                        errors.append(f"bad parent link in {slot!r}")
                    if slot.level != layer.level + 1:
                        errors.append(f"bad level in {slot!r}")
                    walk(slot, prefix + (i,))
                else:
                    kd = slot.key.digits
                    if kd[: len(prefix) + 1] != prefix + (i,):
                        errors.append(f"{slot!r} filed under the wrong path")
                    if bound is not None and layer.level > bound:
                        errors.append(f"{slot!r} at level {layer.level} exceeds height bound {bound}")
                    trie_nodes.append(slot)
            if layer.occ.inorder() != used:
                errors.append(f"occupancy BST of {layer!r} disagrees with its slots")
            if not layer.occ.is_search_tree():
                errors.append(f"occupancy BST of {layer!r} is malformed")
            if layer.occ.size > self.p:
                errors.append(f"occupancy BST of {layer!r} exceeds {self.p} nodes")
            if layer.parent is not None and not used:
                errors.append(f"empty non-root {layer!r}")
            below = trie_nodes[start:]
            want_min = below[0] if below else None
            want_max = below[-1] if below else None
            if layer.min_node is not want_min:
                errors.append(f"min link of {layer!r} is {layer.min_node!r}, expected {want_min!r}")
            if layer.max_node is not want_max:
                errors.append(f"max link of {layer!r} is {layer.max_node!r}, expected {want_max!r}")

        walk(self.root, ())
        if self.root.parent is not None:
            errors.append("root has a parent")
        if len(trie_nodes) != len(list_nodes) or any(a is not b for a, b in zip(trie_nodes, list_nodes)):
            errors.append("trie leaves and list nodes differ")
        return errors
