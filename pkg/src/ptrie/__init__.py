"""Priority Trie: a 2^K-ary trie over digit strings whose leaves form a sorted,
doubly linked list of FIFO queues.

The core works on :class:`DigitString` keys; :mod:`ptrie.adapters` layers
unsigned, signed, byte-string and float keys on top of it.
"""

from ptrie.codec import (
    DigitString,
    InvalidConfigError,
    InvalidKeyError,
    PatternConfig,
    compare,
    digits,
    digits_string,
    undigits,
    undigits_string,
)
from ptrie.core import Entry, LayerStats, ListNode, OpCounters, Peaks, PTrie, StaleHandleError
from ptrie.adapters import FloatPTrie, SignedPTrie, StringPTrie, UnsignedPTrie

__all__ = [
    "DigitString",
    "Entry",
    "FloatPTrie",
    "InvalidConfigError",
    "InvalidKeyError",
    "LayerStats",
    "ListNode",
    "OpCounters",
    "PTrie",
    "PatternConfig",
    "Peaks",
    "SignedPTrie",
    "StaleHandleError",
    "StringPTrie",
    "UnsignedPTrie",
    "compare",
    "digits",
    "digits_string",
    "undigits",
    "undigits_string",
]
