"""Exact-match precision, recall and F-beta for entity spans."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from typing import Iterable, Sequence

from .corpus import Corpus, EntitySpan, Scheme, check_alignment, corpus_spans

OVERALL = "Overall"


def fbeta(precision: float, recall: float, beta: float = 1.0) -> float:
    """Weighted harmonic mean of precision and recall, 0 on a zero denominator."""
    if not beta > 0:
        raise ValueError(f"beta must be positive, got {beta}")
    b2 = beta * beta
    denom = b2 * precision + recall
    if denom == 0:
        return 0.0
    return (b2 + 1) * precision * recall / denom


def error_reduction(f_old: float, f_new: float) -> float:
    """Percentage of the remaining error (100 - f_old) removed by f_new."""
    if f_old >= 100:
        raise ValueError("no residual error to reduce when f_old is 100")
    return 100.0 * (f_new - f_old) / (100.0 - f_old)


def round_half_away(value: float, places: int = 2) -> float:
    q = Decimal(1).scaleb(-places)
    d = Decimal(repr(value)).quantize(q, rounding=ROUND_HALF_UP)
    return float(d)


def fmt(value: float, places: int = 2) -> str:
    return f"{round_half_away(value, places):.{places}f}"


@dataclass(frozen=True)
class TypeScore:
    type: str
    gold_count: int
    pred_count: int
    correct_count: int
    beta: float = 1.0

    @property
    def precision(self) -> float:
        return 100.0 * self.correct_count / self.pred_count if self.pred_count else 0.0

    @property
    def recall(self) -> float:
        return 100.0 * self.correct_count / self.gold_count if self.gold_count else 0.0

    @property
    def fbeta(self) -> float:
        return fbeta(self.precision, self.recall, self.beta)


@dataclass(frozen=True)
class EvalReport:
    beta: float
    per_type: dict[str, TypeScore]
    overall: TypeScore
    token_accuracy: float  # informational only
    tokens: int = 0
    sentences: int = 0


def count_matches(
    gold_spans: Iterable[EntitySpan], pred_spans: Iterable[EntitySpan]
) -> tuple[Counter, Counter, Counter]:
    """Per-type gold, predicted and correct counts for two span collections."""
    gold_set = set()
    gold = Counter()
    for s in gold_spans:
        gold[s.type] += 1
        gold_set.add(s)
    pred = Counter()
    correct = Counter()
    for s in pred_spans:
        pred[s.type] += 1
        if s in gold_set:
            correct[s.type] += 1
    return gold, pred, correct


def report_from_counts(
    gold: Counter, pred: Counter, correct: Counter, beta: float = 1.0,
    token_accuracy: float = 0.0, tokens: int = 0, sentences: int = 0,
) -> EvalReport:
    types = sorted(set(gold) | set(pred))
    per_type = {t: TypeScore(t, gold[t], pred[t], correct[t], beta) for t in types}
    overall = TypeScore(
        OVERALL, sum(gold.values()), sum(pred.values()), sum(correct.values()), beta
    )
    return EvalReport(beta, per_type, overall, token_accuracy, tokens, sentences)


def score(
    gold: Corpus,
    predicted_tags: Sequence[Sequence[str]],
    scheme: Scheme | str = Scheme.IOB1,
    beta: float = 1.0,
    *,
    strict: bool = False,
) -> EvalReport:
    """Score predicted tags against a gold corpus by exact span match.

    A predicted entity is correct only when a gold entity has the same
    sentence, start, end and type.
    """
    if not beta > 0:
        raise ValueError(f"beta must be positive, got {beta}")
    check_alignment(gold, predicted_tags)
    gold_tags = gold.tags()
    g_spans = corpus_spans(gold_tags, scheme, strict=strict)
    p_spans = corpus_spans(predicted_tags, scheme, strict=strict)
    g, p, c = count_matches(
        (s for spans in g_spans for s in spans), (s for spans in p_spans for s in spans)
    )
    tokens = sum(len(t) for t in gold_tags)
    same = sum(a == b for gt, pt in zip(gold_tags, predicted_tags) for a, b in zip(gt, pt))
    acc = 100.0 * same / tokens if tokens else 0.0
    return report_from_counts(g, p, c, beta, acc, tokens, len(gold_tags))


def sentence_counts(
    gold_tags: Sequence[Sequence[str]],
    predicted_tags: Sequence[Sequence[str]],
    scheme: Scheme | str = Scheme.IOB1,
) -> list[tuple[int, int, int]]:
    """Overall (gold, predicted, correct) counts for each sentence."""
    rows = []
    for g, p in zip(gold_tags, predicted_tags):
        gs = set(map(_key, corpus_spans([g], scheme)[0]))
        ps = [_key(s) for s in corpus_spans([p], scheme)[0]]
        rows.append((len(gs), len(ps), sum(1 for s in ps if s in gs)))
    return rows


def _key(span: EntitySpan) -> tuple[int, int, str]:
    return span.start, span.end, span.type


# --- rendering ---------------------------------------------------------------


def render_table(report: EvalReport, margin: float | None = None) -> str:
    """Human-readable table with Precision %, Recall % and F columns."""
    f_head = f"F(beta={report.beta:g})"
    lines = [
        f"processed {report.tokens} tokens in {report.sentences} sentences; "
        f"found {report.overall.pred_count} entities; correct {report.overall.correct_count}.",
        f"token accuracy (informational): {fmt(report.token_accuracy)}%",
        "",
        f"{'':<10} {'Precision':>10} {'Recall':>10} {f_head:>14} {'gold':>7} {'pred':>7} {'correct':>8}",
    ]
    rows = [*report.per_type.values(), report.overall]
    for row in rows:
        f_cell = fmt(row.fbeta)
        if row is report.overall and margin is not None:
            f_cell += f"±{fmt(margin, 1)}"
        lines.append(
            f"{row.type:<10} {fmt(row.precision) + '%':>10} {fmt(row.recall) + '%':>10} "
            f"{f_cell:>14} {row.gold_count:>7} {row.pred_count:>7} {row.correct_count:>8}"
        )
    return "\n".join(lines) + "\n"


def render_kv(report: EvalReport) -> str:
    """One ``key=value`` metric per line, full precision, for scripting."""
    lines = [
        f"beta={report.beta!r}",
        f"tokens={report.tokens}",
        f"sentences={report.sentences}",
        f"token_accuracy={report.token_accuracy!r}",
    ]
    for row in [*report.per_type.values(), report.overall]:
        key = row.type.lower() if row is report.overall else row.type
        for name in ("gold_count", "pred_count", "correct_count"):
            lines.append(f"{key}.{name}={getattr(row, name)}")
        for name in ("precision", "recall", "fbeta"):
            lines.append(f"{key}.{name}={getattr(row, name)!r}")
    return "\n".join(lines) + "\n"
