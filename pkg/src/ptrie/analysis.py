"""Average-case layer counts of a random trie of degree ``p``.

Level ``l`` counts from 0 at the root. A layer exists at level ``l`` for
every ``l``-digit prefix shared by at least two keys, so

* ``prob_group(n, g, p, l)`` is the chance that exactly ``g`` of ``n`` random
  keys carry one particular ``l``-digit prefix,
* ``expected_layers(n, p, l)`` is the mean number of layers on level ``l``,
* ``avg_layers(n, p)`` is the mean total, from the multinomial recurrence.

These model keys as unbounded random digit strings. With finite ``m``-bit
keys two equal keys share a list node instead of forcing a deeper layer;
``expected_layers_finite`` gives the exact mean for that case.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ptrie.codec import PatternConfig, digits
from ptrie.core import PTrie

SERIES_RTOL = 1e-12
DEFAULT_AVG_CAP = 512
_LOG_DOMAIN_ABOVE = 50


def _check_p(p):
    if p < 2:
        raise ValueError(f"branching factor must be >= 2, got {p}")


def _log_comb(n, g):
    return math.lgamma(n + 1) - math.lgamma(g + 1) - math.lgamma(n - g + 1)


def _pow0(base: float, e: int) -> float:
    # 0**0 == 1 by convention
    return 1.0 if e == 0 else base**e


def prob_group(n: int, g: int, p: int, l: int) -> float:
    """C(n, g) * p**(-g*l) * (1 - p**-l)**(n - g)."""
    _check_p(p)
    if not 0 <= g <= n or l < 0:
        raise ValueError(f"need 0 <= g <= n and l >= 0, got n={n}, g={g}, l={l}")
    q = float(p) ** -l
    if l == 0:
        return 1.0 if g == n else 0.0
    if n <= _LOG_DOMAIN_ABOVE:
        return math.comb(n, g) * q**g * _pow0(1.0 - q, n - g)
    return math.exp(_log_comb(n, g) - g * l * math.log(p) + (n - g) * math.log1p(-q))


def expected_layers(n: int, p: int, l: int) -> float:
    """p**l * (1 - (1 - p**-l)**n) - n * (1 - p**-l)**(n - 1)."""
    _check_p(p)
    if n < 0 or l < 0:
        raise ValueError(f"need n >= 0 and l >= 0, got n={n}, l={l}")
    if n == 0:
        return 0.0
    if l == 0:
        return 1.0 - n * _pow0(0.0, n - 1)
    q = float(p) ** -l
    lq = math.log1p(-q)
    occupied = -math.expm1(n * lq)  # 1 - (1 - q)**n
    return float(p) ** l * occupied - n * math.exp((n - 1) * lq)


def expected_layers_finite(n: int, p: int, l: int, depth: int) -> float:
    """Mean layers on level ``l`` for ``n`` keys drawn with replacement from
    ``p**depth`` values: prefixes holding at least two *distinct* keys.
    """
    _check_p(p)
    if l >= depth or n < 2:
        return 0.0
    q = float(p) ** -l
    r = float(p) ** -depth
    s = float(p) ** (depth - l)
    # prefix hit by exactly one distinct key value, any number of times:
    # s * ((1 - q + r)**n - (1 - q)**n), without the cancellation
    if l == 0:
        none, single = 0.0, s * r**n
    else:
        none = (1.0 - q) ** n
        single = s * none * math.expm1(n * math.log1p(r / (1.0 - q)))
    return float(p) ** l * (1.0 - none - single)


def level_series(n: int, p: int, rtol: float = SERIES_RTOL, max_levels: int = 4096) -> list:
    """expected_layers for l = 0, 1, ... until a term drops below ``rtol`` of the sum."""
    out, total = [], 0.0
    for l in range(max_levels):
        term = expected_layers(n, p, l)
        out.append(term)
        total += term
        if term <= rtol * total or total == 0.0:
            break
    return out


_avg_cache: dict = {}


def avg_layers(n: int, p: int, cap: int = DEFAULT_AVG_CAP) -> float:
    """A_n from the recurrence, with A_0 = A_1 = 0.

    The G = n term of the sum contains A_n itself and is moved to the left
    side before solving.
    """
    _check_p(p)
    if n < 0:
        raise ValueError("n must be >= 0")
    if n > cap:
        raise ValueError(f"n={n} exceeds the recurrence cap {cap}")
    table = _avg_cache.setdefault(p, [0.0, 0.0])
    log_p, log_pm1 = math.log(p), math.log(p - 1)
    for big_n in range(len(table), n + 1):
        acc = 0.0
        for g in range(2, big_n):
            acc += math.exp(_log_comb(big_n, g) + (big_n - g) * log_pm1 + (1 - big_n) * log_p) * table[g]
        table.append((1.0 + acc) / (1.0 - float(p) ** (1 - big_n)))
    return table[n]


@dataclass
class FormulaResult:
    p: int
    n: int
    per_level: list = field(default_factory=list)
    a_n: float = 0.0


def formula(n: int, p: int) -> FormulaResult:
    return FormulaResult(p=p, n=n, per_level=level_series(n, p), a_n=avg_layers(n, p))


@dataclass
class EmpiricalProfile:
    n: int
    trials: int
    cfg: PatternConfig
    means: list  # per level, root first
    stderrs: list
    totals: list  # total layers per trial


def empirical_profile(trials: int, n: int, cfg: PatternConfig, seed: int = 0) -> EmpiricalProfile:
    """Build ``trials`` tries from ``n`` uniform random keys; average layers per level."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if cfg.variable or cfg.m > 64:
        raise ValueError("profiles need fixed-width keys of at most 64 bits")
    children = np.random.SeedSequence(seed).spawn(trials)
    levels = cfg.digit_count
    counts = np.zeros((trials, levels), dtype=np.int64)
    for t, child in enumerate(children):
        rng = np.random.default_rng(child)
        keys = rng.integers(0, 1 << cfg.m, size=n, dtype=np.uint64, endpoint=False) if n else []
        trie = PTrie(cfg)
        for key in keys:
            trie.insert(digits(int(key), cfg))
        per_level = trie.stats().layers_per_level
        counts[t, : len(per_level)] = per_level
    means = counts.mean(axis=0)
    if trials > 1:
        stderrs = counts.std(axis=0, ddof=1) / math.sqrt(trials)
    else:
        stderrs = np.zeros(levels)
    return EmpiricalProfile(
        n=n,
        trials=trials,
        cfg=cfg,
        means=means.tolist(),
        stderrs=stderrs.tolist(),
        totals=counts.sum(axis=1).tolist(),
    )


def profile_table(profile: EmpiricalProfile) -> list:
    """Rows of level -> formula, finite-width formula, empirical mean, standard error."""
    p, n = profile.cfg.p, profile.n
    depth = profile.cfg.digit_count
    series = level_series(n, p)
    rows = []
    for l in range(max(len(series), depth)):
        mean = profile.means[l] if l < depth else 0.0
        se = profile.stderrs[l] if l < depth else 0.0
        rows.append(
            {
                "level": l,
                "formula": expected_layers(n, p, l),
                "finite_formula": expected_layers_finite(n, p, l, depth),
                "empirical_mean": mean,
                "standard_error": se,
            }
        )
    return rows
