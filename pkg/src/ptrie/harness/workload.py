"""Workloads: typed key syntax, the line-oriented file format, and generators.

File format::

    # seed=42 dist=uniform
    mode=u16 k=4
    i u16:00ff p0        insert key with payload
    r u16:00ff           remove (oldest entry)
    s u16:0001           search
    m | x | d | a | v    min, max, delete-min, iterate all, validate
"""
from __future__ import annotations

import math
import random
import re
import struct
from dataclasses import dataclass, field

MODES = ("u8", "u16", "u32", "i64", "f64", "str")
DISTRIBUTIONS = ("uniform", "clustered", "ascending", "duplicate-heavy")
KEYED_OPS = frozenset("irs")
BARE_OPS = frozenset("mxdav")

# op -> weight for the mixed profile; min/max/iterate share 10%
OP_MIX = {"i": 40, "r": 25, "s": 15, "d": 10, "m": 4.95, "x": 4.95, "a": 0.1}
HEAP_MIX = {"i": 50, "d": 40, "m": 10}
MIXES = ("mixed", "heap", "drain")


class WorkloadError(ValueError):
    pass


def parse_mode(mode: str) -> tuple:
    """Return ``(kind, width)``; kind is unsigned, signed, float or string."""
    if mode == "str":
        return "string", None
    if mode == "f64":
        return "float", 64
    m = re.fullmatch(r"([ui])(\d+)", mode)
    if m is None:
        raise WorkloadError(f"unknown mode {mode!r}")
    width = int(m.group(2))
    if not 1 <= width <= 128:
        raise WorkloadError(f"width out of range in mode {mode!r}")
    return ("unsigned" if m.group(1) == "u" else "signed"), width


@dataclass
class Workload:
    mode: str
    k: int
    ops: list = field(default_factory=list)  # tuples: ("i", key, payload), ("r", key), ("m",), ...
    seed: int | None = None
    name: str = ""

    @property
    def kind(self):
        return parse_mode(self.mode)[0]

    @property
    def width(self):
        return parse_mode(self.mode)[1]


# ---------------------------------------------------------------- key syntax

_STR_SAFE = frozenset(range(0x21, 0x7F)) - {ord('"'), ord("\\")}


def format_key(mode: str, key) -> str:
    kind, width = parse_mode(mode)
    if kind == "unsigned":
        return f"{mode}:{key:0{-(-width // 4)}x}"
    if kind == "signed":
        return f"{mode}:{key}"
    if kind == "float":
        return f"f64:{float(key).hex()}"
    body = "".join(chr(b) if b in _STR_SAFE else f"\\x{b:02x}" for b in key)
    return f'str:"{body}"'


def parse_key(mode: str, token: str):
    kind, width = parse_mode(mode)
    prefix, sep, body = token.partition(":")
    if not sep:
        prefix, body = mode, token
    if prefix != mode:
        raise WorkloadError(f"key {token!r} does not match mode {mode}")
    try:
        if kind == "unsigned":
            value = int(body, 16)
            if value >> width:
                raise WorkloadError(f"key {token!r} exceeds {width} bits")
            return value
        if kind == "signed":
            return int(body, 10)
        if kind == "float":
            if body.lower().lstrip("+-").startswith("0x"):
                return float.fromhex(body)
            return float(body)
    except ValueError as exc:
        raise WorkloadError(f"bad key {token!r}: {exc}") from None
    if len(body) < 2 or body[0] != '"' or body[-1] != '"':
        raise WorkloadError(f"string key must be quoted: {token!r}")
    return bytes(body[1:-1], "latin-1").decode("unicode_escape").encode("latin-1")


_TOKEN = re.compile(r'\S+:"(?:[^"\\]|\\.)*"|\S+')


def format_workload(w: Workload) -> str:
    lines = []
    if w.name:
        lines.append(f"# name={w.name}")
    if w.seed is not None:
        lines.append(f"# seed={w.seed}")
    lines.append(f"mode={w.mode} k={w.k}")
    for op in w.ops:
        if op[0] == "i":
            line = f"i {format_key(w.mode, op[1])}"
            if op[2] is not None:
                line += f" {op[2]}"
        elif op[0] in ("r", "s"):
            line = f"{op[0]} {format_key(w.mode, op[1])}"
        else:
            line = op[0]
        lines.append(line)
    return "\n".join(lines) + "\n"


def parse_workload(text: str) -> Workload:
    mode = k = None
    seed, name = None, ""
    ops = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            m = re.match(r"#\s*(seed|name)=(\S+)", line)
            if m and m.group(1) == "seed":
                seed = int(m.group(2))
            elif m:
                name = m.group(2)
            continue
        if mode is None:
            fields_ = dict(part.split("=", 1) for part in line.split() if "=" in part)
            if "mode" not in fields_ or "k" not in fields_:
                raise WorkloadError(f"line {lineno}: expected header 'mode=<mode> k=<int>'")
            mode, k = fields_["mode"], int(fields_["k"])
            parse_mode(mode)
            continue
        tokens = _TOKEN.findall(line)
        op = tokens[0]
        if op in KEYED_OPS:
            if len(tokens) < 2:
                raise WorkloadError(f"line {lineno}: {op!r} needs a key")
            key = parse_key(mode, tokens[1])
            if op == "i":
                payload = tokens[2] if len(tokens) > 2 else None
                ops.append(("i", key, payload))
            else:
                ops.append((op, key))
        elif op in BARE_OPS and len(tokens) == 1:
            ops.append((op,))
        else:
            raise WorkloadError(f"line {lineno}: cannot parse {raw!r}")
    if mode is None:
        raise WorkloadError("missing header line")
    return Workload(mode=mode, k=k, ops=ops, seed=seed, name=name)


def read_workload(path) -> Workload:
    with open(path) as fh:
        return parse_workload(fh.read())


def write_workload(w: Workload, path):
    with open(path, "w") as fh:
        fh.write(format_workload(w))


# ---------------------------------------------------------------- generation


class _KeySource:
    """Draws keys of one mode under one distribution."""

    n_clusters = 8
    pool_size = 16

    def __init__(self, mode, dist, rng: random.Random, n_ops: int):
        if dist not in DISTRIBUTIONS:
            raise WorkloadError(f"unknown distribution {dist!r}; choose from {DISTRIBUTIONS}")
        self.kind, self.width = parse_mode(mode)
        self.dist = dist
        self.rng = rng
        self.n_ops = max(n_ops, 1)
        self._cursor = None
        if dist == "clustered":
            self.clusters = [self._cluster_base() for _ in range(self.n_clusters)]
        elif dist == "duplicate-heavy":
            self.pool = [self._uniform() for _ in range(self.pool_size)]
            if self.kind == "float":
                self.pool[:2] = [0.0, -0.0]

    def _uniform(self):
        rng = self.rng
        if self.kind == "unsigned":
            return rng.getrandbits(self.width)
        if self.kind == "signed":
            return rng.getrandbits(self.width) - (1 << (self.width - 1))
        if self.kind == "float":
            if rng.random() < 0.02:
                return rng.choice((0.0, -0.0, math.inf, -math.inf))
            while True:
                bits = rng.getrandbits(64)
                if (bits >> 52) & 0x7FF != 0x7FF:
                    return _float_of(bits)
        return bytes(rng.randrange(1, 256) for _ in range(rng.randrange(0, 13)))

    def _cluster_base(self):
        rng = self.rng
        if self.kind == "unsigned":
            return rng.getrandbits(self.width) & ~0xFF
        if self.kind == "signed":
            return rng.choice((-1, 1)), rng.getrandbits(self.width - 1) & ~0xFF
        if self.kind == "float":
            return rng.getrandbits(1), rng.randrange(1, 0x7FF), rng.getrandbits(52) & ~0xFF
        return bytes(rng.randrange(1, 256) for _ in range(rng.randrange(4, 10)))

    def _clustered(self):
        rng = self.rng
        base = rng.choice(self.clusters)
        if self.kind == "unsigned":
            return base | rng.randrange(min(256, 1 << self.width))
        if self.kind == "signed":
            sign, mag = base
            v = sign * (mag | rng.randrange(256))
            return max(v, -(1 << (self.width - 1)))
        if self.kind == "float":
            sign, exp, mant = base
            return _float_of((sign << 63) | (exp << 52) | mant | rng.randrange(256))
        return base + bytes(rng.choice(b"abc") for _ in range(rng.randrange(0, 4)))

    def _ascending(self):
        rng = self.rng
        if self.kind == "unsigned":
            step = max(1, (1 << self.width) // (self.n_ops + 1))
            start = 0
        elif self.kind == "signed":
            step = max(1, (1 << self.width) // (self.n_ops + 1))
            start = -(1 << (self.width - 1))
        elif self.kind == "float":
            if self._cursor is None:
                self._cursor = -1e6
            self._cursor += rng.expovariate(1.0 / 50)
            return self._cursor
        else:
            if self._cursor is None:
                self._cursor = 0
            self._cursor += rng.randrange(1, 1000)
            return b"%012x" % self._cursor
        if self._cursor is None:
            self._cursor = start
        self._cursor = min(self._cursor + rng.randrange(1, step + 1), start + (1 << self.width) - 1)
        return self._cursor

    def draw(self):
        if self.dist == "uniform":
            return self._uniform()
        if self.dist == "clustered":
            return self._clustered()
        if self.dist == "ascending":
            return self._ascending()
        return self.rng.choice(self.pool)


def _float_of(bits):
    return struct.unpack("<d", struct.pack("<Q", bits))[0]


def gen_workload(
    mode: str,
    n_ops: int,
    dist: str = "uniform",
    seed: int = 0,
    k: int = 4,
    mix: str = "mixed",
) -> Workload:
    """Deterministic random workload.

    ``mix`` is ``mixed`` (all operations), ``heap`` (insert/delete-min/min
    interleaved) or ``drain`` (``n_ops // 2`` inserts, then as many delete-mins).
    Removes and searches hit a previously inserted key 70% of the time.
    """
    if n_ops < 0:
        raise WorkloadError("n_ops must be >= 0")
    if mix not in MIXES:
        raise WorkloadError(f"unknown mix {mix!r}; choose from {MIXES}")
    rng = random.Random(f"{mode}/{dist}/{k}/{mix}/{seed}")
    keys = _KeySource(mode, dist, rng, n_ops)
    inserted = []
    ops = []

    def insert():
        key = keys.draw()
        inserted.append(key)
        ops.append(("i", key, f"p{len(ops)}"))

    if mix == "drain":
        for _ in range(n_ops // 2):
            insert()
        ops.extend(("d",) for _ in range(n_ops - n_ops // 2))
    else:
        table = OP_MIX if mix == "mixed" else HEAP_MIX
        names, weights = list(table), list(table.values())
        for op in rng.choices(names, weights, k=n_ops):
            if op == "i":
                insert()
            elif op in ("r", "s"):
                if inserted and rng.random() < 0.7:
                    key = rng.choice(inserted)
                else:
                    key = keys.draw()
                ops.append((op, key))
            else:
                ops.append((op,))
    return Workload(mode=mode, k=k, ops=ops, seed=seed, name=f"{mode}-{dist}-k{k}-{mix}")
