"""Reference stable ordered multiset.

A flat list kept sorted by key, equal keys in insertion order. Slow on
purpose: every operation is obviously right.
"""
from __future__ import annotations

from bisect import bisect_left, bisect_right


class StableMultiset:
    def __init__(self):
        self._keys = []  # sort keys, parallel to _items
        self._items = []  # (key, payload)

    def __len__(self):
        return len(self._items)

    def insert(self, key, payload=None):
        i = bisect_right(self._keys, key)
        self._keys.insert(i, key)
        self._items.insert(i, (key, payload))

    def remove(self, key):
        i = bisect_left(self._keys, key)
        if i < len(self._keys) and self._keys[i] == key:
            del self._keys[i]
            return self._items.pop(i)
        return None

    def search(self, key) -> bool:
        i = bisect_left(self._keys, key)
        return i < len(self._keys) and self._keys[i] == key

    def minimum(self):
        return self._items[0][0] if self._items else None

    def maximum(self):
        return self._items[-1][0] if self._items else None

    def delete_min(self):
        if not self._items:
            return None
        del self._keys[0]
        return self._items.pop(0)

    def items(self):
        return iter(self._items)
