"""Per-token majority voting over system outputs and subset selection by beam search."""
from __future__ import annotations

import math
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .corpus import AlignmentError, Corpus, Scheme, repair, split_tag
from .scoring import fbeta, score

DEFAULT_BEAM = 9


@dataclass(frozen=True)
class SystemOutput:
    system_id: str
    tags: tuple[tuple[str, ...], ...]

    @classmethod
    def of(cls, system_id: str, tags: Iterable[Iterable[str]]) -> "SystemOutput":
        return cls(system_id, tuple(tuple(t) for t in tags))


@dataclass(frozen=True)
class SearchState:
    subset: frozenset[str]
    dev_f: float


@dataclass
class SearchTrace:
    # one entry per iteration: (beam after the update, best state so far)
    iterations: list[tuple[list[SearchState], SearchState]] = field(default_factory=list)

    def lines(self) -> list[str]:
        out = []
        for i, (beam, best) in enumerate(self.iterations, start=1):
            cells = "; ".join(f"{{{','.join(sorted(s.subset))}}}={s.dev_f:.2f}" for s in beam)
            out.append(
                f"iter {i}: best {{{','.join(sorted(best.subset))}}}={best.dev_f:.2f} | beam {cells}"
            )
        return out


def _check_aligned(outputs: Sequence[SystemOutput]) -> None:
    ref = outputs[0]
    for out in outputs[1:]:
        if len(out.tags) != len(ref.tags):
            raise AlignmentError(
                f"system {out.system_id!r} has {len(out.tags)} sentences, "
                f"{ref.system_id!r} has {len(ref.tags)}"
            )
        for i, (a, b) in enumerate(zip(out.tags, ref.tags)):
            if len(a) != len(b):
                raise AlignmentError(
                    f"system {out.system_id!r} sentence {i} has {len(a)} tokens, "
                    f"{ref.system_id!r} has {len(b)}"
                )


def vote_token(votes: Sequence[str], ranks: Sequence[int]) -> str:
    """Plurality tag; among tied tags the one backed by the best-ranked voter wins."""
    counts = Counter(votes)
    top = max(counts.values())
    best_rank = {}
    for tag, rank in zip(votes, ranks):
        if counts[tag] == top and (tag not in best_rank or rank < best_rank[tag]):
            best_rank[tag] = rank
    return min(best_rank, key=best_rank.__getitem__)


def majority_vote(
    outputs: Sequence[SystemOutput],
    tie_order: Sequence[str] | None = None,
    scheme: Scheme | str = Scheme.IOB1,
    *,
    repair_output: bool = True,
) -> list[list[str]]:
    """Combine aligned outputs token by token.

    ``tie_order`` ranks system ids best first and defaults to the order of
    ``outputs``. With ``repair_output`` the voted tags are re-encoded as a
    well-formed sequence of ``scheme``.
    """
    if not outputs:
        raise ValueError("need at least one system output")
    _check_aligned(outputs)
    order = list(tie_order) if tie_order is not None else [o.system_id for o in outputs]
    rank = {sid: i for i, sid in enumerate(order)}
    missing = [o.system_id for o in outputs if o.system_id not in rank]
    if missing:
        raise ValueError(f"tie order lacks systems {missing}")
    ranks = [rank[o.system_id] for o in outputs]
    voted = []
    for sent_tags in zip(*(o.tags for o in outputs)):
        tags = [vote_token(votes, ranks) for votes in zip(*sent_tags)]
        voted.append(repair(tags, scheme) if repair_output else tags)
    return voted


def evaluate_subset(
    subset: Iterable[str],
    outputs: Sequence[SystemOutput],
    gold: Corpus,
    tie_order: Sequence[str] | None = None,
    scheme: Scheme | str = Scheme.IOB1,
    *,
    repair_output: bool = True,
) -> float:
    """Overall F1 of the majority vote of ``subset`` against ``gold``."""
    chosen = set(subset)
    if not chosen:
        raise ValueError("cannot evaluate an empty subset")
    by_id = {o.system_id: o for o in outputs}
    unknown = chosen - by_id.keys()
    if unknown:
        raise ValueError(f"unknown systems {sorted(unknown)}")
    members = [o for o in outputs if o.system_id in chosen]
    voted = majority_vote(members, tie_order, scheme, repair_output=repair_output)
    return score(gold, voted, scheme).overall.fbeta


def rank_by_f(
    outputs: Sequence[SystemOutput], gold: Corpus, scheme: Scheme | str = Scheme.IOB1
) -> list[str]:
    """System ids ordered by individual F on ``gold``, best first, ties by id."""
    fs = {o.system_id: score(gold, o.tags, scheme).overall.fbeta for o in outputs}
    return sorted(fs, key=lambda sid: (-fs[sid], sid))


class SubsetScorer:
    """Vectorized equivalent of :func:`evaluate_subset` for repeated calls.

    Tags are integer-coded over the flattened corpus. Voting and lenient span
    extraction run in numpy; the repair step is skipped because it never
    changes the span set that scoring sees.
    """

    def __init__(self, outputs: Sequence[SystemOutput], gold: Corpus, tie_order: Sequence[str]):
        _check_aligned(outputs)
        gold_tags = gold.tags()
        if outputs and len(outputs[0].tags) != len(gold_tags):
            raise AlignmentError("system outputs and gold differ in sentence count")
        vocab: dict[str, int] = {}
        flat_gold = [t for sent in gold_tags for t in sent]
        rows = [[t for sent in o.tags for t in sent] for o in outputs]
        if any(len(r) != len(flat_gold) for r in rows):
            raise AlignmentError("system outputs and gold differ in token count")
        codes = np.array([[vocab.setdefault(t, len(vocab)) for t in r] for r in rows], dtype=np.int64)
        gold_codes = np.array([vocab.setdefault(t, len(vocab)) for t in flat_gold], dtype=np.int64)

        types: dict[str, int] = {}
        self.kind_b = np.zeros(len(vocab), dtype=bool)
        self.type_of = np.full(len(vocab), -1, dtype=np.int64)
        for tag, v in vocab.items():
            kind, typ = split_tag(tag)
            if kind != "O":
                self.type_of[v] = types.setdefault(typ, len(types))
                self.kind_b[v] = kind == "B"
        self.n_types = max(len(types), 1)
        self.n = len(flat_gold)
        self.sent_start = np.zeros(self.n, dtype=bool)
        self.sent_end = np.zeros(self.n, dtype=bool)
        pos = 0
        for sent in gold_tags:
            self.sent_start[pos] = True
            pos += len(sent)
            self.sent_end[pos - 1] = True
        self.codes = codes
        self.index = {o.system_id: i for i, o in enumerate(outputs)}
        rank = {sid: i for i, sid in enumerate(tie_order)}
        self.rank = np.array([rank[o.system_id] for o in outputs], dtype=np.int64)
        self.vocab_size = len(vocab)
        self.gold_keys = self._span_keys(gold_codes)

    def _span_keys(self, codes: np.ndarray) -> np.ndarray:
        typ = self.type_of[codes]
        prev = np.concatenate(([-1], typ[:-1]))
        start = (typ >= 0) & (self.kind_b[codes] | self.sent_start | (prev != typ))
        nxt_start = np.concatenate((start[1:], [True]))
        nxt = np.concatenate((typ[1:], [-1]))
        end = (typ >= 0) & (nxt_start | self.sent_end | (nxt != typ))
        s_idx = np.flatnonzero(start)
        e_idx = np.flatnonzero(end)
        return (s_idx * self.n + e_idx) * self.n_types + typ[s_idx]

    def vote_codes(self, subset: Iterable[str]) -> np.ndarray:
        # worst-ranked voter first so better voters overwrite the per-tag best rank
        members = sorted((self.index[sid] for sid in subset), key=lambda i: -self.rank[i])
        if self.n == 0:
            return np.zeros(0, dtype=np.int64)
        cols = np.arange(self.n)
        worst = len(self.rank)
        counts = np.zeros((self.vocab_size, self.n), dtype=np.int64)
        best = np.full((self.vocab_size, self.n), worst, dtype=np.int64)
        for m in members:
            row = self.codes[m]
            counts[row, cols] += 1
            best[row, cols] = self.rank[m]
        return np.argmax(counts * (worst + 1) + (worst - best), axis=0)

    def __call__(self, subset: Iterable[str]) -> float:
        subset = list(subset)
        if not subset:
            raise ValueError("cannot evaluate an empty subset")
        pred = self._span_keys(self.vote_codes(subset))
        correct = len(np.intersect1d(pred, self.gold_keys, assume_unique=True))
        p = 100.0 * correct / len(pred) if len(pred) else 0.0
        r = 100.0 * correct / len(self.gold_keys) if len(self.gold_keys) else 0.0
        return fbeta(p, r)


def _state_key(state: SearchState) -> tuple:
    return (-state.dev_f, len(state.subset), sorted(state.subset))


def hill_climb_select(
    outputs: Sequence[SystemOutput],
    gold_dev: Corpus,
    beam: int = DEFAULT_BEAM,
    tie_order: Sequence[str] | None = None,
    scheme: Scheme | str = Scheme.IOB1,
    *,
    patience: int | None = None,
    workers: int | None = None,
) -> tuple[frozenset[str], SearchTrace]:
    """Bidirectional beam search over system subsets, starting from the empty set.

    Every iteration expands each beam state by adding or removing one
    system, scores the subsets not seen before, and keeps the best ``beam``
    of them (higher F, then fewer systems, then ids). The search stops when
    no unseen neighbour remains, after ``patience`` consecutive iterations
    without a strictly better subset (default: the number of systems), or
    after 2**n iterations.
    """
    if not outputs:
        raise ValueError("need at least one system output")
    if beam < 1:
        raise ValueError("beam must be at least 1")
    ids = [o.system_id for o in outputs]
    if len(set(ids)) != len(ids):
        raise ValueError("system ids must be unique")
    if tie_order is None:
        tie_order = rank_by_f(outputs, gold_dev, scheme)
    if patience is None:
        patience = len(ids)

    cache: dict[frozenset[str], float] = {}
    evaluate = SubsetScorer(outputs, gold_dev, tie_order)

    frontier = [frozenset()]
    best = SearchState(frozenset(), -math.inf)
    trace = SearchTrace()
    stale = 0
    for _ in range(2 ** len(ids)):
        candidates = []
        for state in frontier:
            for sid in ids:
                nxt = state - {sid} if sid in state else state | {sid}
                if nxt and nxt not in cache and nxt not in candidates:
                    candidates.append(nxt)
        if not candidates:
            break
        if workers and workers > 1:
            with ThreadPoolExecutor(workers) as pool:
                scores = list(pool.map(evaluate, candidates))
        else:
            scores = [evaluate(c) for c in candidates]
        cache.update(zip(candidates, scores))
        states = sorted((SearchState(c, f) for c, f in zip(candidates, scores)), key=_state_key)
        kept = states[:beam]
        frontier = [s.subset for s in kept]
        if kept[0].dev_f > best.dev_f:
            best = kept[0]
            stale = 0
        else:
            stale += 1
        trace.iterations.append((kept, best))
        if stale > patience:
            break
    return best.subset, trace


def exhaustive_select(
    outputs: Sequence[SystemOutput],
    gold_dev: Corpus,
    tie_order: Sequence[str] | None = None,
    scheme: Scheme | str = Scheme.IOB1,
) -> SearchState:
    """Score every non-empty subset; for small system counts only."""
    ids = [o.system_id for o in outputs]
    if tie_order is None:
        tie_order = rank_by_f(outputs, gold_dev, scheme)
    states = [
        SearchState(frozenset(c), evaluate_subset(c, outputs, gold_dev, tie_order, scheme))
        for k in range(1, len(ids) + 1)
        for c in combinations(ids, k)
    ]
    return min(states, key=_state_key)
