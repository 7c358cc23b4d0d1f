"""Bootstrap estimates of F-score spread and the central-interval significance rule.

Each replicate draws as many sentences as the corpus holds, uniformly with
replacement, pools their span counts and records the overall F. Replicate
``r`` of a run seeded with ``seed`` uses numpy's PCG64 generator seeded by
``SeedSequence([seed, r])`` and a single ``integers(0, n, size=n)`` call, so
every replicate is reproducible on its own and the order replicates are
computed in never matters.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .corpus import Corpus, Scheme, check_alignment
from .scoring import fbeta, sentence_counts

DEFAULT_REPLICATES = 250
DEFAULT_LEVEL = 0.90

# guards ceil() against binary noise such as (1 - 0.9) / 2 * 100 = 5.000000000000001
_RANK_EPS = 1e-9


@dataclass(frozen=True)
class BootstrapDistribution:
    replicates: int
    level: float
    f_values: tuple[float, ...]
    point_f: float
    seed: int

    def interval(self, level: float | None = None) -> tuple[float, float]:
        return interval(self, self.level if level is None else level)


@dataclass(frozen=True)
class SignificanceVerdict:
    a_point_f: float
    b_interval: tuple[float, float]
    significant: bool
    margin: float  # half-width of b_interval, unrounded


def replicate_rng(seed: int, replicate: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, replicate]))


def draw_indices(seed: int, replicate: int, n: int) -> np.ndarray:
    return replicate_rng(seed, replicate).integers(0, n, size=n)


def _f_from_totals(gold: int, pred: int, correct: int, beta: float) -> float:
    p = 100.0 * correct / pred if pred else 0.0
    r = 100.0 * correct / gold if gold else 0.0
    return fbeta(p, r, beta)


def bootstrap_distribution(
    gold: Corpus,
    predicted: Sequence[Sequence[str]],
    replicates: int = DEFAULT_REPLICATES,
    seed: int = 0,
    scheme: Scheme | str = Scheme.IOB1,
    beta: float = 1.0,
    *,
    level: float = DEFAULT_LEVEL,
    workers: int | None = None,
) -> BootstrapDistribution:
    """Resample sentences with replacement and collect the sorted overall F values.

    ``workers`` > 1 spreads replicates over threads; the result is identical
    to the sequential run.
    """
    if replicates < 1:
        raise ValueError("replicates must be at least 1")
    if seed < 0:
        raise ValueError("seed must be non-negative")
    check_alignment(gold, predicted)
    counts = np.asarray(sentence_counts(gold.tags(), predicted, scheme), dtype=np.int64)
    n = len(counts)
    if n == 0:
        raise ValueError("cannot bootstrap an empty corpus")

    def one(r: int) -> float:
        g, p, c = counts[draw_indices(seed, r, n)].sum(axis=0)
        return _f_from_totals(int(g), int(p), int(c), beta)

    if workers and workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            values = list(pool.map(one, range(replicates)))
    else:
        values = [one(r) for r in range(replicates)]
    g, p, c = counts.sum(axis=0)
    point = _f_from_totals(int(g), int(p), int(c), beta)
    return BootstrapDistribution(replicates, level, tuple(sorted(values)), point, seed)


def _rank(q: float, n: int) -> int:
    return min(max(math.ceil(q * n - _RANK_EPS), 1), n)


def interval(dist: BootstrapDistribution, level: float = DEFAULT_LEVEL) -> tuple[float, float]:
    """Nearest-rank bounds of the central ``level`` mass of the distribution."""
    if not 0 < level < 1:
        raise ValueError(f"level must lie strictly between 0 and 1, got {level}")
    values = dist.f_values
    n = len(values)
    if n == 0:
        raise ValueError("empty distribution")
    lo = values[_rank((1 - level) / 2, n) - 1]
    hi = values[_rank((1 + level) / 2, n) - 1]
    return lo, hi


def compare(
    a_point_f: float, b_dist: BootstrapDistribution, level: float = DEFAULT_LEVEL
) -> SignificanceVerdict:
    """Is A's point F outside the central ``level`` part of B's distribution?

    Values equal to a bound count as inside.
    """
    lo, hi = interval(b_dist, level)
    return verdict_for_interval(a_point_f, (lo, hi))


def verdict_for_interval(a_point_f: float, b_interval: tuple[float, float]) -> SignificanceVerdict:
    lo, hi = b_interval
    return SignificanceVerdict(
        a_point_f, (lo, hi), a_point_f < lo or a_point_f > hi, (hi - lo) / 2
    )


def margin(dist: BootstrapDistribution, level: float = DEFAULT_LEVEL) -> float:
    lo, hi = interval(dist, level)
    return (hi - lo) / 2
