import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from nereval.corpus import Corpus, Sentence, Token
from nereval.scoring import fmt, score
from nereval.significance import (
    BootstrapDistribution,
    bootstrap_distribution,
    compare,
    draw_indices,
    interval,
    verdict_for_interval,
)
from oracles import oracle_bootstrap, oracle_counts, oracle_f, random_tags


def corpus_of(tag_lists):
    return Corpus.from_sentences(
        Sentence(tuple(Token(f"w{i}", (), t) for i, t in enumerate(tags))) for tags in tag_lists
    )


def dist_of(values, level=0.9):
    return BootstrapDistribution(len(values), level, tuple(sorted(values)), 0.0, 0)


TWO_GOLD = [["I-PER", "O"], ["I-LOC", "O"]]
TWO_PRED = [["I-PER", "O"], ["O", "I-LOC"]]  # first sentence right, second wrong


def test_perfect_system_is_degenerate():
    rng = random.Random(1)
    gold_tags = [random_tags(rng, 6) for _ in range(30)]
    gold_tags[0][0] = "I-PER"
    dist = bootstrap_distribution(corpus_of(gold_tags), gold_tags, 250, seed=5)
    assert set(dist.f_values) == {100.0}
    assert interval(dist, 0.9) == (100.0, 100.0)


def test_two_sentence_fixture_matches_oracle():
    dist = bootstrap_distribution(corpus_of(TWO_GOLD), TWO_PRED, 4, seed=11)
    assert list(dist.f_values) == pytest.approx(oracle_bootstrap(TWO_GOLD, TWO_PRED, 4, 11), abs=1e-12)
    assert dist.point_f == 50.0


def test_single_replicate_equals_direct_score():
    rng = random.Random(2)
    gold_tags = [random_tags(rng, 5) for _ in range(12)]
    pred = [random_tags(rng, 5) for _ in gold_tags]
    dist = bootstrap_distribution(corpus_of(gold_tags), pred, 1, seed=9)
    idx = draw_indices(9, 0, 12)
    resampled = corpus_of([gold_tags[i] for i in idx])
    direct = score(resampled, [pred[i] for i in idx]).overall.fbeta
    assert dist.f_values == (pytest.approx(direct, abs=1e-12),)


def test_one_sentence_corpus_replicates_equal_point():
    dist = bootstrap_distribution(corpus_of([["I-PER", "I-LOC"]]), [["I-PER", "O"]], 20, seed=3)
    assert set(dist.f_values) == {dist.point_f}


def test_determinism_and_parallel():
    rng = random.Random(4)
    gold_tags = [random_tags(rng, 7) for _ in range(80)]
    pred = [random_tags(rng, 7) for _ in gold_tags]
    gold = corpus_of(gold_tags)
    a = bootstrap_distribution(gold, pred, 100, seed=42)
    b = bootstrap_distribution(gold, pred, 100, seed=42)
    c = bootstrap_distribution(gold, pred, 100, seed=42, workers=4)
    assert a == b == c
    assert bootstrap_distribution(gold, pred, 100, seed=43) != a


def test_bootstrap_contracts():
    with pytest.raises(ValueError):
        bootstrap_distribution(Corpus(), [], 10)
    with pytest.raises(ValueError):
        bootstrap_distribution(corpus_of([["O"]]), [["O"]], 0)


def test_interval_nearest_rank():
    d = dist_of(range(1, 101))
    assert interval(d, 0.9) == (5, 95)
    assert interval(dist_of([100.0] * 7), 0.9) == (100.0, 100.0)
    assert interval(dist_of([3.0]), 0.9) == (3.0, 3.0)
    with pytest.raises(ValueError):
        interval(d, 1.0)
    with pytest.raises(ValueError):
        interval(dist_of([]), 0.9)


@given(st.lists(st.floats(0, 100), min_size=1, max_size=300), st.floats(0.01, 0.98), st.floats(0.0, 0.5))
def test_interval_monotone_in_level(values, level, extra):
    wider = min(level + extra, 0.99)
    d = dist_of(values)
    lo, hi = interval(d, level)
    lo2, hi2 = interval(d, wider)
    assert lo <= hi
    assert lo2 <= lo and hi <= hi2


def test_compare_examples():
    b = (88.06, 89.46)
    chieu = verdict_for_interval(88.31, b)
    assert not chieu.significant
    assert fmt(chieu.margin, 1) == "0.7"
    assert verdict_for_interval(86.07, b).significant
    assert not verdict_for_interval(70.0, (70.0, 70.0)).significant


def test_compare_against_own_distribution_never_significant():
    rng = random.Random(8)
    for trial in range(10):
        gold_tags = [random_tags(rng, 6) for _ in range(40)]
        pred = [random_tags(rng, 6, p_out=0.6) for _ in gold_tags]
        dist = bootstrap_distribution(corpus_of(gold_tags), pred, 250, seed=trial)
        f = oracle_f(*oracle_counts(gold_tags, pred))
        assert dist.point_f == pytest.approx(f)
        assert not compare(dist.point_f, dist).significant
