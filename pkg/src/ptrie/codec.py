"""Key codec: split keys into K-bit digits, most significant first.

Two modes are supported. Fixed-width keys are unsigned integers of exactly
``m`` bits; when ``k`` does not divide ``m`` the last digit is zero-padded on
the right, which is the same for every key and therefore keeps order.
Variable-width keys are byte strings terminated by a zero byte, which makes
the digit strings prefix-free and sorts shorter strings first.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Union

VARIABLE = "variable"
MAX_FIXED_WIDTH = 128
STRING_DIGIT_WIDTHS = (1, 2, 4, 8)


class InvalidConfigError(ValueError):
    pass


class InvalidKeyError(ValueError):
    pass


@dataclass(frozen=True)
class PatternConfig:
    """Digit width ``k`` and key width ``m`` (an int, or ``"variable"`` for strings)."""

    k: int
    m: Union[int, str] = 32
    _shifts: tuple = field(init=False, repr=False, compare=False, default=())

    def __post_init__(self):
        if not isinstance(self.k, int) or self.k < 1:
            raise InvalidConfigError(f"k must be a positive integer, got {self.k!r}")
        if self.m == VARIABLE:
            if self.k not in STRING_DIGIT_WIDTHS:
                raise InvalidConfigError(f"string keys need k in {STRING_DIGIT_WIDTHS}, got {self.k}")
            return
        if not isinstance(self.m, int) or not 1 <= self.m <= MAX_FIXED_WIDTH:
            raise InvalidConfigError(f"m must be in [1, {MAX_FIXED_WIDTH}] or 'variable', got {self.m!r}")
        if self.k > self.m:
            raise InvalidConfigError(f"k={self.k} exceeds m={self.m}")
        full = self.m // self.k
        shifts = tuple(self.m - self.k * (i + 1) for i in range(full))
        object.__setattr__(self, "_shifts", (shifts, self.k - self.m % self.k if self.m % self.k else 0))

    @property
    def p(self) -> int:
        return 1 << self.k

    @property
    def variable(self) -> bool:
        return self.m == VARIABLE

    @property
    def digit_count(self) -> int | None:
        """ceil(m / k), or None for variable-width keys."""
        if self.variable:
            return None
        return -(-self.m // self.k)


class DigitString(NamedTuple):
    """A key's trie path plus the key it came from.

    Digits determine the key and vice versa, so tuple order and equality are
    the digit order and equality.
    """

    digits: tuple
    key: Union[int, bytes] = 0


def digits(key_bits: int, cfg: PatternConfig) -> DigitString:
    if cfg.variable:
        raise InvalidKeyError("config is in string mode; use digits_string")
    if key_bits.__class__ is not int or key_bits < 0 or key_bits >> cfg.m:
        raise InvalidKeyError(f"key {key_bits!r} is not an unsigned {cfg.m}-bit value")
    mask = cfg.p - 1
    shifts, pad = cfg._shifts
    ds = [(key_bits >> s) & mask for s in shifts]
    if pad:
        # the last digit holds the low m mod k bits, left-aligned
        ds.append((key_bits << pad) & mask)
    return DigitString(tuple(ds), key_bits)


def undigits(ds: DigitString, cfg: PatternConfig) -> int:
    value = 0
    for d in ds.digits:
        value = (value << cfg.k) | d
    return value >> (cfg.k * len(ds.digits) - cfg.m)


def digits_string(data: bytes, cfg: PatternConfig) -> DigitString:
    if not cfg.variable:
        raise InvalidKeyError("config is in fixed-width mode; use digits")
    data = bytes(data)
    if 0 in data:
        raise InvalidKeyError("string keys may not contain a zero byte")
    k = cfg.k
    stream = data + b"\x00"
    if k == 8:
        ds = tuple(stream)
    else:
        mask = (1 << k) - 1
        shifts = range(8 - k, -1, -k)
        ds = tuple((b >> s) & mask for b in stream for s in shifts)
    return DigitString(ds, data)


def undigits_string(ds: DigitString, cfg: PatternConfig) -> bytes:
    k = cfg.k
    per_byte = 8 // k
    out = bytearray()
    for i in range(0, len(ds.digits), per_byte):
        b = 0
        for d in ds.digits[i : i + per_byte]:
            b = (b << k) | d
        out.append(b)
    if not out or out[-1] != 0:
        raise InvalidKeyError("digit string is missing its terminator")
    return bytes(out[:-1])


def compare(a: DigitString, b: DigitString) -> int:
    """Three-way lexicographic comparison: -1, 0 or 1."""
    if a.digits == b.digits:
        return 0
    return -1 if a.digits < b.digits else 1
