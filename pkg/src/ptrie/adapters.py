"""Order-correct front ends for the core trie.

All adapters share one surface: ``insert(value, payload)``, ``remove(value)``,
``search(value)``, ``minimum()``, ``maximum()``, ``delete_min()``, ``items()``,
``len()``, plus ``cores()`` and ``validate()`` for inspection. ``remove`` and
``delete_min`` return ``(value, payload)`` of the oldest matching entry.

Negative integers live in a second trie keyed by magnitude; its maximum is
the overall minimum. Floats are split into a trie of exponents whose single
entry per exponent carries a trie of mantissas, again one pair per sign.
"""
from __future__ import annotations

import math
import struct
from typing import Any, Iterator

from ptrie.codec import InvalidKeyError, PatternConfig, digits, digits_string
from ptrie.core import Peaks, PTrie


class _Adapter:
    def cores(self) -> list:
        raise NotImplementedError

    def validate(self) -> list:
        return [msg for core in self.cores() for msg in core.validate()]

    def __len__(self):
        return self.count


class UnsignedPTrie(_Adapter):
    def __init__(self, k: int = 4, m: int = 32, *, peaks: Peaks | None = None):
        self.cfg = PatternConfig(k, m)
        self.peaks = peaks if peaks is not None else Peaks()
        self.core = PTrie(self.cfg, peaks=self.peaks)

    @property
    def count(self):
        return self.core.count

    def cores(self):
        return [self.core]

    def _key(self, v):
        return digits(v, self.cfg)

    def insert(self, v: int, payload: Any = None):
        return self.core.insert(self._key(v), payload)

    def remove(self, v: int):
        e = self.core.remove(self._key(v))
        return None if e is None else (e.key.key, e.payload)

    def search(self, v: int) -> bool:
        return self.core.search(self._key(v))

    def minimum(self):
        n = self.core.minimum()
        return None if n is None else n.key.key

    def maximum(self):
        n = self.core.maximum()
        return None if n is None else n.key.key

    def delete_min(self):
        e = self.core.delete_min()
        return None if e is None else (e.key.key, e.payload)

    def items(self) -> Iterator[tuple]:
        core = self.core
        node = core.minimum()
        while node is not None:
            for e in node.entries:
                yield e.key.key, e.payload
            node = core.next(node)


class StringPTrie(UnsignedPTrie):
    """Byte-string keys, zero-terminated; shorter prefixes sort first."""

    def __init__(self, k: int = 8, *, peaks: Peaks | None = None):
        self.cfg = PatternConfig(k, "variable")
        self.peaks = peaks if peaks is not None else Peaks()
        self.core = PTrie(self.cfg, peaks=self.peaks)

    def _key(self, v):
        if isinstance(v, str):
            v = v.encode()
        return digits_string(v, self.cfg)


class SignedPTrie(_Adapter):
    """Two cores over magnitudes: ``pos`` holds values >= 0, ``neg`` the rest."""

    def __init__(self, k: int = 4, m: int = 64, *, peaks: Peaks | None = None):
        self.m = m
        self.cfg = PatternConfig(k, m)
        self.peaks = peaks if peaks is not None else Peaks()
        self.pos = PTrie(self.cfg, peaks=self.peaks)
        self.neg = PTrie(self.cfg, peaks=self.peaks)

    @property
    def count(self):
        return self.pos.count + self.neg.count

    def cores(self):
        return [self.pos, self.neg]

    def _route(self, v: int):
        if not isinstance(v, int) or not -(1 << (self.m - 1)) <= v < (1 << (self.m - 1)):
            raise InvalidKeyError(f"{v!r} does not fit a signed {self.m}-bit integer")
        if v < 0:
            return self.neg, digits(-v, self.cfg)
        return self.pos, digits(v, self.cfg)

    def insert(self, v: int, payload: Any = None):
        core, key = self._route(v)
        return core.insert(key, payload)

    def remove(self, v: int):
        core, key = self._route(v)
        e = core.remove(key)
        return None if e is None else (v, e.payload)

    def search(self, v: int) -> bool:
        core, key = self._route(v)
        return core.search(key)

    def minimum(self):
        if self.neg:
            return -self.neg.maximum().key.key
        n = self.pos.minimum()
        return None if n is None else n.key.key

    def maximum(self):
        if self.pos:
            return self.pos.maximum().key.key
        n = self.neg.minimum()
        return None if n is None else -n.key.key

    def delete_min(self):
        if self.neg:
            e = self.neg.delete_max()
            return -e.key.key, e.payload
        e = self.pos.delete_min()
        return None if e is None else (e.key.key, e.payload)

    def items(self):
        node = self.neg.maximum()
        while node is not None:
            for e in node.entries:
                yield -e.key.key, e.payload
            node = self.neg.prev(node)
        node = self.pos.minimum()
        while node is not None:
            for e in node.entries:
                yield e.key.key, e.payload
            node = self.pos.next(node)


_EXP_BITS = 11
_MANT_BITS = 52
_MANT_MASK = (1 << _MANT_BITS) - 1


def float_bits(v: float) -> tuple:
    """Split a double into ``(sign, biased_exponent, mantissa)``; -0.0 becomes +0.0."""
    if v == 0.0:
        v = 0.0
    (bits,) = struct.unpack("<Q", struct.pack("<d", v))
    return bits >> 63, (bits >> _MANT_BITS) & 0x7FF, bits & _MANT_MASK


def float_from_bits(sign: int, exp: int, mant: int) -> float:
    return struct.unpack("<d", struct.pack("<Q", (sign << 63) | (exp << _MANT_BITS) | mant))[0]


class FloatPTrie(_Adapter):
    """IEEE-754 doubles: exponent tries whose entries carry mantissa tries.

    Negative values use the same reversed reading as :class:`SignedPTrie`:
    the largest exponent, then the largest mantissa, is the smallest value.
    NaN is rejected; infinities are kept unless ``allow_infinity`` is False.
    """

    def __init__(self, k: int = 4, *, allow_infinity: bool = True, peaks: Peaks | None = None):
        self.k = k
        self.allow_infinity = allow_infinity
        self.exp_cfg = PatternConfig(min(k, _EXP_BITS), _EXP_BITS)
        self.mant_cfg = PatternConfig(k, _MANT_BITS)
        self.peaks = peaks if peaks is not None else Peaks()
        self.pos = PTrie(self.exp_cfg, peaks=self.peaks)
        self.neg = PTrie(self.exp_cfg, peaks=self.peaks)
        self.count = 0

    def cores(self):
        out = [self.pos, self.neg]
        for outer in (self.pos, self.neg):
            out.extend(node.entries[0].payload for node in outer.nodes())
        return out

    def validate(self):
        errors = super().validate()
        for outer in (self.pos, self.neg):
            for node in outer.nodes():
                if len(node.entries) != 1:
                    errors.append(f"exponent node {node!r} must carry exactly one mantissa trie")
                elif not node.entries[0].payload:
                    errors.append(f"exponent node {node!r} carries an empty mantissa trie")
        inner_total = sum(len(c) for c in self.cores()[2:])
        if inner_total != self.count:
            errors.append(f"count {self.count} != {inner_total} stored in mantissa tries")
        return errors

    def _split(self, v: float):
        v = float(v)
        if math.isnan(v):
            raise InvalidKeyError("NaN cannot be stored")
        if math.isinf(v) and not self.allow_infinity:
            raise InvalidKeyError("infinities are disabled")
        sign, exp, mant = float_bits(v)
        outer = self.neg if sign else self.pos
        return outer, digits(exp, self.exp_cfg), digits(mant, self.mant_cfg), sign

    def insert(self, v: float, payload: Any = None):
        outer, ek, mk, _ = self._split(v)
        node = outer.find(ek)
        if node is None:
            inner = PTrie(self.mant_cfg, peaks=self.peaks)
            outer.insert(ek, inner)
        else:
            inner = node.entries[0].payload
        self.count += 1
        return inner.insert(mk, payload)

    def search(self, v: float) -> bool:
        outer, ek, mk, _ = self._split(v)
        node = outer.find(ek)
        return node is not None and node.entries[0].payload.search(mk)

    def _take(self, outer, ek, inner, mk):
        e = inner.remove(mk)
        if e is None:
            return None
        if not inner:
            outer.remove(ek)
        self.count -= 1
        return e

    def remove(self, v: float):
        outer, ek, mk, sign = self._split(v)
        node = outer.find(ek)
        if node is None:
            return None
        e = self._take(outer, ek, node.entries[0].payload, mk)
        return None if e is None else (float_from_bits(sign, ek.key, mk.key), e.payload)

    def _extreme(self, smallest: bool):
        """Return ``(outer, exp_node, inner, mant_node, sign)`` of the min or max value."""
        first, second = (self.neg, self.pos) if smallest else (self.pos, self.neg)
        if first:
            # largest magnitude on this side is the extreme
            node = first.maximum()
            inner = node.entries[0].payload
            return first, node, inner, inner.maximum(), int(first is self.neg)
        if second:
            node = second.minimum()
            inner = node.entries[0].payload
            return second, node, inner, inner.minimum(), int(second is self.neg)
        return None

    def _value_of(self, ext):
        _, node, _, mnode, sign = ext
        return float_from_bits(sign, node.key.key, mnode.key.key)

    def minimum(self):
        ext = self._extreme(True)
        return None if ext is None else self._value_of(ext)

    def maximum(self):
        ext = self._extreme(False)
        return None if ext is None else self._value_of(ext)

    def delete_min(self):
        ext = self._extreme(True)
        if ext is None:
            return None
        outer, node, inner, mnode, _ = ext
        value = self._value_of(ext)
        e = self._take(outer, node.key, inner, mnode.key)
        return value, e.payload

    remove_min = delete_min

    def items(self):
        for node in self.neg.nodes(reverse=True):
            inner = node.entries[0].payload
            for mnode in inner.nodes(reverse=True):
                v = float_from_bits(1, node.key.key, mnode.key.key)
                for e in mnode.entries:
                    yield v, e.payload
        for node in self.pos.nodes():
            inner = node.entries[0].payload
            for mnode in inner.nodes():
                v = float_from_bits(0, node.key.key, mnode.key.key)
                for e in mnode.entries:
                    yield v, e.payload
