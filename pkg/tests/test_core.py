import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ptrie.codec import InvalidConfigError, InvalidKeyError, PatternConfig, digits
from ptrie.core import Layer, ListNode, OccupancyBST, Peaks, PTrie, StaleHandleError
from ptrie.harness.oracle import StableMultiset

K4M8 = PatternConfig(4, 8)


def make(values=(), cfg=K4M8, **kw):
    t = PTrie(cfg, **kw)
    for i, v in enumerate(values):
        t.insert(digits(v, cfg), payload=i)
    return t


def key(v, cfg=K4M8):
    return digits(v, cfg)


def keys_of(t):
    return [e.key.key for e in t]


def level_of(t, v):
    """Level of the layer whose slot holds the node for ``v``."""
    layer, kd = t.root, key(v, t.cfg).digits
    for d in kd:
        slot = layer.slots[d]
        if isinstance(slot, ListNode):
            return layer.level
        layer = slot
    raise AssertionError("unreachable")


# ---------------------------------------------------------------- create


def test_create_empty():
    t = PTrie(PatternConfig(4, 32))
    assert len(t) == 0 and t.minimum() is None and t.maximum() is None


def test_binary_trie_is_legal():
    t = make([2, 1], PatternConfig(1, 8))
    assert keys_of(t) == [1, 2]


def test_create_rejects_digit_wider_than_key():
    with pytest.raises(InvalidConfigError):
        PTrie(PatternConfig(9, 8))


def test_wrong_length_key_rejected():
    with pytest.raises(InvalidKeyError):
        make().insert(digits(3, PatternConfig(4, 12)))


# ---------------------------------------------------------------- insert / search


def test_insert_into_empty():
    t = make([3])
    assert t.minimum() is t.maximum()
    assert t.minimum().key.key == 3 and len(t) == 1


def test_duplicates_share_a_node_in_insertion_order():
    t = make([5, 3, 5])
    assert keys_of(t) == [3, 5, 5]
    node = t.maximum()
    assert [e.payload for e in node.entries] == [0, 2]
    assert t.distinct == 2


def test_shared_first_digit_pushes_resident_down():
    t = make([0x31, 0x32])
    assert t.counters.pushdowns == 1
    assert level_of(t, 0x31) == level_of(t, 0x32) == 2
    assert keys_of(t) == [0x31, 0x32]
    s = t.stats()
    assert s.layers_per_level == [1, 1] and s.nodes == 2


def test_search():
    t = make()
    assert not t.search(key(7))
    t.insert(key(7))
    assert t.search(key(7))
    t = make([0x31])
    assert not t.search(key(0x32))


# ---------------------------------------------------------------- remove


def test_remove_from_empty():
    assert make().remove(key(5)) is None


def test_remove_is_fifo():
    t = make()
    t.insert(key(5), "A")
    t.insert(key(5), "B")
    assert t.remove(key(5)).payload == "A"
    assert t.search(key(5)) and len(t) == 1


def test_single_survivor_keeps_its_layer_then_cascade_empties():
    t = make([0x31, 0x32])
    t.remove(key(0x32))
    assert level_of(t, 0x31) == 2
    assert t.stats().layers_per_level == [1, 1]
    assert t.validate() == []
    t.remove(key(0x31))
    assert t.counters.cascade_deletes == 1
    s = t.stats()
    assert (s.layers, s.nodes, len(t)) == (1, 0, 0)
    assert t.root.min_node is None and t.validate() == []


def test_remove_missing_key_sharing_a_prefix():
    t = make([0x31, 0x32])
    assert t.remove(key(0x33)) is None
    assert len(t) == 2


# ---------------------------------------------------------------- min / max / cursors


def test_min_max():
    t = make([7])
    assert t.minimum() is t.maximum()
    t = make([3, 9, 5])
    assert (t.minimum().key.key, t.maximum().key.key) == (3, 9)


def test_next_prev():
    t = make([3, 5, 5])
    assert t.next(t.maximum()) is None
    assert t.prev(t.minimum()) is None
    n = t.next(t.minimum())
    assert n.key.key == 5 and len(n.entries) == 2
    assert t.prev(n) is t.minimum()


def test_stale_handle_detected_in_debug_mode():
    t = make([3, 5], debug=True)
    node = t.minimum()
    t.remove(key(3))
    with pytest.raises(StaleHandleError):
        t.next(node)


def test_cursor_ops_cost_one_link_read():
    t = make([3, 5, 9])
    for op in (t.minimum, t.maximum, lambda: t.next(t.minimum()), lambda: t.prev(t.maximum())):
        op()
        assert t.counters.link_reads == 1


def test_delete_min():
    assert make().delete_min() is None
    e = make([5, 3, 5]).delete_min()
    assert e.key.key == 3


def test_delete_max_takes_oldest_of_largest():
    t = make([5, 3, 5])
    assert t.delete_max().payload == 0


def test_reverse_iteration():
    t = make([4, 1, 9, 1])
    assert [n.key.key for n in t.nodes(reverse=True)] == [9, 4, 1]


# ---------------------------------------------------------------- stats / validate


def test_stats_empty():
    s = make().stats()
    assert s.layers_per_level == [1] and s.nodes == 0 and s.slot_memory == 16


def test_depth_bounded_by_digit_count():
    cfg = PatternConfig(3, 16)
    rng = random.Random(1)
    t = make([rng.getrandbits(16) for _ in range(3000)], cfg)
    assert t.stats().depth_max <= cfg.digit_count


def test_fresh_trie_is_valid():
    assert make().validate() == []


def test_random_ops_stay_valid():
    rng = random.Random(7)
    cfg = PatternConfig(4, 16)
    t = PTrie(cfg)
    live = []
    for i in range(10_000):
        r = rng.random()
        if r < 0.5 or not live:
            v = rng.choice(live) if live and rng.random() < 0.3 else rng.getrandbits(16)
            t.insert(key(v, cfg), i)
            live.append(v)
        elif r < 0.8:
            v = live.pop(rng.randrange(len(live)))
            assert t.remove(key(v, cfg)) is not None
        else:
            e = t.delete_min()
            live.remove(e.key.key)
    assert t.validate() == []
    assert len(t) == len(live)


def test_corrupted_min_link_is_exactly_one_violation():
    t = make([0x31, 0x32, 0x80])
    child = t.root.slots[3]
    assert isinstance(child, Layer)
    child.min_node = child.max_node
    assert len(t.validate()) == 1


def test_broken_list_link_is_reported():
    t = make([1, 2, 3])
    t.minimum().next = t.maximum()
    assert t.validate()


# ---------------------------------------------------------------- occupancy BST


def test_bst_insert_reports_parent_and_side():
    bst = OccupancyBST()
    assert bst.insert(8) == (None, False, 0)
    assert bst.insert(3) == (8, False, 1)
    assert bst.insert(5) == (3, True, 2)
    assert bst.inorder() == [3, 5, 8]
    assert (bst.min(), bst.max(), bst.height()) == (3, 8, 3)


def test_bst_lone_node_delete_is_free():
    bst = OccupancyBST()
    bst.insert(4)
    assert bst.delete(4) == 0 and bst.size == 0


@given(st.lists(st.integers(0, 15), unique=True), st.randoms(use_true_random=False))
def test_bst_stays_a_search_tree(xs, rnd):
    bst = OccupancyBST()
    for x in xs:
        bst.insert(x)
    order = list(xs)
    rnd.shuffle(order)
    for i, x in enumerate(order):
        assert bst.delete(x) <= 16
        rest = sorted(order[i + 1 :])
        assert bst.inorder() == rest and bst.is_search_tree()


# ---------------------------------------------------------------- properties

ops_strategy = st.lists(
    st.one_of(
        st.tuples(st.just("i"), st.integers(0, 255)),
        st.tuples(st.just("r"), st.integers(0, 255)),
        st.tuples(st.just("d")),
    ),
    max_size=60,
)


@settings(max_examples=300, deadline=None)
@given(st.sampled_from([1, 2, 3, 4, 8]), ops_strategy)
def test_matches_stable_multiset(k, ops):
    cfg = PatternConfig(k, 8)
    peaks = Peaks()
    t, oracle = PTrie(cfg, peaks=peaks), StableMultiset()
    for i, op in enumerate(ops):
        if op[0] == "i":
            t.insert(key(op[1], cfg), i)
            oracle.insert(op[1], i)
            got = want = None
        elif op[0] == "r":
            e = t.remove(key(op[1], cfg))
            got = None if e is None else (e.key.key, e.payload)
            want = oracle.remove(op[1])
        else:
            e = t.delete_min()
            got = None if e is None else (e.key.key, e.payload)
            want = oracle.delete_min()
        assert got == want
        c = t.counters
        if op[0] != "d" or got is not None:
            assert c.layer_visits <= 2 * cfg.digit_count + 1
            assert c.bst_comparisons <= cfg.p
    assert [(e.key.key, e.payload) for e in t] == list(oracle.items())
    assert t.validate() == []
    assert t.stats().depth_max <= cfg.digit_count
    assert len(t) == sum(len(n.entries) for n in t.nodes())
