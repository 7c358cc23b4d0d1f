import random
from itertools import combinations

import pytest

from nereval.corpus import AlignmentError, Corpus, Scheme, Sentence, Token, repair, tags_to_spans
from nereval.ensemble import (
    SubsetScorer,
    SystemOutput,
    evaluate_subset,
    exhaustive_select,
    hill_climb_select,
    majority_vote,
    rank_by_f,
    vote_token,
)
from nereval.scoring import score
from oracles import noisy_copy, oracle_counts, oracle_f, oracle_vote, random_tags


def corpus_of(tag_lists):
    return Corpus.from_sentences(
        Sentence(tuple(Token(f"w{i}", (), t) for i, t in enumerate(tags))) for tags in tag_lists
    )


def system(sid, tags):
    return SystemOutput.of(sid, tags)


def test_strict_majority():
    assert vote_token(["I-PER", "I-PER", "O", "I-PER", "O"], [0, 1, 2, 3, 4]) == "I-PER"


def test_tie_goes_to_best_ranked_voter():
    votes = ["I-PER", "I-PER", "I-LOC", "I-LOC", "O"]
    assert vote_token(votes, [1, 2, 0, 3, 4]) == "I-LOC"
    assert vote_token(votes, [0, 2, 1, 3, 4]) == "I-PER"


def test_vote_uses_tie_order():
    outs = [system(s, [[t]]) for s, t in zip("abcde", ["I-PER", "I-PER", "I-LOC", "I-LOC", "O"])]
    assert majority_vote(outs, ["c", "a", "b", "d", "e"]) == [["I-LOC"]]
    assert majority_vote(outs) == [["I-PER"]]


def test_single_system_is_repaired_identity():
    tags = [["O", "B-PER", "I-PER", "I-LOC"]]
    assert majority_vote([system("a", tags)]) == [repair(tags[0], Scheme.IOB1)]
    assert majority_vote([system("a", tags)], repair_output=False) == tags


def test_vote_output_valid_in_scheme():
    rng = random.Random(5)
    for scheme in Scheme:
        outs = [system(str(k), [random_tags(rng, 10) for _ in range(5)]) for k in range(4)]
        for sent in majority_vote(outs, scheme=scheme):
            tags_to_spans(sent, scheme, strict=True)


def test_odd_copies_reproduce_spans():
    rng = random.Random(6)
    tags = [random_tags(rng, 9) for _ in range(6)]
    outs = [system(f"c{k}", tags) for k in range(3)]
    voted = majority_vote(outs)
    for a, b in zip(voted, tags):
        assert tags_to_spans(a) == tags_to_spans(b)


def test_alignment_error_names_system():
    with pytest.raises(AlignmentError, match="'b'"):
        majority_vote([system("a", [["O", "O"]]), system("b", [["O"]])])
    with pytest.raises(ValueError):
        majority_vote([system("a", [["O"]])], tie_order=["z"])


def test_evaluate_subset_examples():
    gold_tags = [["I-PER", "O", "I-LOC"], ["O", "I-ORG"]]
    gold = corpus_of(gold_tags)
    noisy = [["O", "O", "I-LOC"], ["I-ORG", "I-ORG"]]
    outs = [system("perfect", gold_tags), system("x", noisy), system("y", noisy), system("z", noisy)]
    assert evaluate_subset({"perfect"}, outs, gold) == 100
    assert evaluate_subset({"x", "y", "z"}, outs, gold) == score(gold, noisy).overall.fbeta
    with pytest.raises(ValueError):
        evaluate_subset(set(), outs, gold)


def test_evaluate_subset_hand_scored():
    # three systems over two sentences; voted tags traced by hand below
    gold_tags = [["I-PER", "I-PER", "O", "I-LOC"], ["I-ORG", "O"]]
    a = [["I-PER", "I-PER", "O", "O"], ["I-ORG", "O"]]
    b = [["I-PER", "O", "O", "I-LOC"], ["I-LOC", "O"]]
    c = [["I-PER", "I-PER", "O", "I-LOC"], ["I-LOC", "I-PER"]]
    # votes: [I-PER, I-PER, O, I-LOC], [I-LOC, O]
    # gold spans 3; voted spans PER(0,1) LOC(3) LOC(0): correct 2 of 3
    outs = [system("a", a), system("b", b), system("c", c)]
    f = evaluate_subset({"a", "b", "c"}, outs, corpus_of(gold_tags), ["a", "b", "c"])
    assert f == pytest.approx(100 * 2 / 3)


def test_hill_climb_single_candidate():
    gold = corpus_of([["I-PER", "O"]])
    subset, trace = hill_climb_select([system("only", [["O", "O"]])], gold)
    assert subset == {"only"}
    assert trace.iterations


def _fixture(rng, n_systems=4, n_sent=5, noise=None):
    gold_tags = [random_tags(rng, rng.randint(3, 8), p_out=0.55) for _ in range(n_sent)]
    outs = []
    for k in range(n_systems):
        level = noise[k] if noise else rng.uniform(0.1, 0.6)
        outs.append(system(chr(ord("A") + k), [noisy_copy(rng, t, level) for t in gold_tags]))
    return corpus_of(gold_tags), gold_tags, outs


def test_perfect_system_selected_alone():
    rng = random.Random(10)
    gold, gold_tags, outs = _fixture(rng, 3, 5, noise=[0.0, 0.5, 0.5])
    subset, _ = hill_climb_select(outs, gold)
    fs = {
        frozenset(c): evaluate_subset(c, outs, gold, rank_by_f(outs, gold))
        for k in range(1, 4)
        for c in combinations("ABC", k)
    }
    assert max(fs.values()) == 100
    assert subset == {"A"}


def test_trace_monotone_and_beam_bounded():
    rng = random.Random(11)
    gold, _, outs = _fixture(rng, 7, 6)
    _, trace = hill_climb_select(outs, gold, beam=3)
    bests = [best.dev_f for _, best in trace.iterations]
    assert bests == sorted(bests)
    assert all(len(beam) <= 3 for beam, _ in trace.iterations)
    assert "iter 1" in trace.lines()[0]


def test_matches_independent_exhaustive_oracle():
    rng = random.Random(12)
    for _ in range(10):
        gold, gold_tags, outs = _fixture(rng)
        order = rank_by_f(outs, gold)
        ranking = {sid: i for i, sid in enumerate(order)}
        best_oracle = 0.0
        for k in range(1, 5):
            for combo in combinations(outs, k):
                voted = oracle_vote([o.tags for o in combo], [ranking[o.system_id] for o in combo])
                best_oracle = max(best_oracle, oracle_f(*oracle_counts(gold_tags, voted)))
        subset, trace = hill_climb_select(outs, gold, 9, order)
        assert trace.iterations[-1][1].dev_f == pytest.approx(best_oracle, abs=1e-9)
        assert exhaustive_select(outs, gold, order).dev_f == pytest.approx(best_oracle, abs=1e-9)


def test_parallel_search_same_result():
    rng = random.Random(13)
    gold, _, outs = _fixture(rng, 6, 5)
    a = hill_climb_select(outs, gold)
    b = hill_climb_select(outs, gold, workers=4)
    assert a[0] == b[0]
    assert [x[1] for x in a[1].iterations] == [x[1] for x in b[1].iterations]


def test_zero_patience_stops_early():
    rng = random.Random(14)
    gold, _, outs = _fixture(rng, 5, 5)
    _, quick = hill_climb_select(outs, gold, patience=0)
    _, full = hill_climb_select(outs, gold)
    assert len(quick.iterations) <= len(full.iterations)
    assert quick.iterations[-1][1].dev_f <= full.iterations[-1][1].dev_f


def test_vectorized_scorer_matches_reference():
    rng = random.Random(15)
    for _ in range(40):
        gold, _, outs = _fixture(rng, rng.randint(1, 6), rng.randint(1, 6))
        order = [o.system_id for o in outs]
        rng.shuffle(order)
        scorer = SubsetScorer(outs, gold, order)
        ids = [o.system_id for o in outs]
        for k in range(1, len(ids) + 1):
            for combo in combinations(ids, k):
                assert scorer(combo) == pytest.approx(evaluate_subset(combo, outs, gold, order), abs=1e-9)
                ref = majority_vote([o for o in outs if o.system_id in combo], order, repair_output=False)
                flat = [t for sent in ref for t in sent]
                inv = {v: t for t, v in _vocab(scorer, outs, gold).items()}
                assert [inv[c] for c in scorer.vote_codes(combo)] == flat


def _vocab(scorer, outs, gold):
    vocab = {}
    for o in outs:
        for sent in o.tags:
            for t in sent:
                vocab.setdefault(t, len(vocab))
    for sent in gold.tags():
        for t in sent:
            vocab.setdefault(t, len(vocab))
    return vocab
