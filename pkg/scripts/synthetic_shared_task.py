#!/usr/bin/env python3
"""Run the whole evaluation pipeline on a simulated shared task.

Builds random gold dev/test corpora and a set of noisy "participant"
outputs, then reports per-system F with bootstrap margins, significance
against the best system, the hill-climbing subset chosen on dev data and
the error reduction of its vote on test data. Optionally writes every
file so the CLI can be run on them.

Usage:
    python scripts/synthetic_shared_task.py --systems 8 --sentences 1500 --out /tmp/st
"""
from __future__ import annotations

import argparse
import random
from dataclasses import dataclass
from pathlib import Path

from nereval.corpus import Corpus, EntitySpan, Sentence, Token, serialize_corpus, spans_to_tags
from nereval.ensemble import SystemOutput, hill_climb_select, majority_vote, rank_by_f
from nereval.scoring import error_reduction, fmt, score
from nereval.significance import bootstrap_distribution, compare, margin

TYPES = ("LOC", "MISC", "ORG", "PER")


@dataclass
class Config:
    systems: int = 8
    sentences: int = 1500
    min_noise: float = 0.03
    max_noise: float = 0.25
    replicates: int = 250
    level: float = 0.90
    beam: int = 9
    seed: int = 0
    out: Path | None = None


def random_gold(rng: random.Random, n: int) -> Corpus:
    sents = []
    for _ in range(n):
        length = rng.randint(4, 30)
        spans, i = [], 0
        while i < length:
            if rng.random() < 0.15:
                end = min(length - 1, i + rng.choice((0, 0, 1, 1, 2)))
                spans.append(EntitySpan(0, i, end, rng.choice(TYPES)))
                i = end + 1
            else:
                i += 1
        tags = spans_to_tags(spans, length)
        sents.append(Sentence(tuple(Token(f"w{rng.randint(0, 5000)}", ("X",), t) for t in tags)))
    return Corpus.from_sentences(sents)


def corrupt(rng: random.Random, tags, noise: float, hardness, confusers):
    # errors concentrate on hard tokens and often agree on the same wrong tag
    out = []
    for t, h, c in zip(tags, hardness, confusers):
        if rng.random() < min(1.0, noise * h):
            t = c if rng.random() < 0.6 else ("O" if rng.random() < 0.5 else f"I-{rng.choice(TYPES)}")
        out.append(t)
    return out


def token_profile(rng: random.Random, corpus: Corpus):
    hardness = [[rng.choice((0.2, 0.2, 0.5, 1.0, 4.0)) for _ in s.tokens] for s in corpus.sentences]
    confusers = [[rng.choice(("O", *(f"I-{t}" for t in TYPES))) for _ in s.tokens] for s in corpus.sentences]
    return hardness, confusers


def simulate(cfg: Config):
    rng = random.Random(cfg.seed)
    dev, test = random_gold(rng, cfg.sentences), random_gold(rng, cfg.sentences)
    noise = sorted(rng.uniform(cfg.min_noise, cfg.max_noise) for _ in range(cfg.systems))
    profiles = {"dev": token_profile(rng, dev), "test": token_profile(rng, test)}
    dev_out, test_out = [], []
    for k, level in enumerate(noise):
        sid = f"sys{k:02d}"
        for split, corpus, bucket in (("dev", dev, dev_out), ("test", test, test_out)):
            hard, conf = profiles[split]
            tags = [corrupt(rng, t, level, h, c) for t, h, c in zip(corpus.tags(), hard, conf)]
            bucket.append(SystemOutput.of(sid, tags))
    return dev, test, dev_out, test_out


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for name, default in vars(Config()).items():
        flag = "--" + name.replace("_", "-")
        if name == "out":
            ap.add_argument(flag, type=Path)
        else:
            ap.add_argument(flag, type=type(default), default=default)
    cfg = Config(**vars(ap.parse_args()))

    dev, test, dev_out, test_out = simulate(cfg)

    print(f"test set: {len(test.sentences)} sentences, seed {cfg.seed}")
    dists = {}
    for o in test_out:
        dists[o.system_id] = bootstrap_distribution(test, o.tags, cfg.replicates, cfg.seed, level=cfg.level)
    best_id = max(dists, key=lambda s: dists[s].point_f)
    best = dists[best_id]
    for sid, d in sorted(dists.items(), key=lambda kv: -kv[1].point_f):
        verdict = compare(d.point_f, best, cfg.level)
        mark = "" if sid == best_id else ("  *" if verdict.significant else "  (not sig.)")
        print(f"  {sid}  F {fmt(d.point_f)}±{fmt(margin(d, cfg.level), 1)}{mark}")

    order = rank_by_f(dev_out, dev)
    subset, trace = hill_climb_select(dev_out, dev, cfg.beam, order)
    chosen = [o for o in test_out if o.system_id in subset]
    voted = majority_vote(chosen, order)
    combined = score(test, voted).overall.fbeta
    print(f"selected on dev ({len(trace.iterations)} iterations): {' '.join(sorted(subset))}")
    print(
        f"combined test F {fmt(combined)} vs best {fmt(best.point_f)}: "
        f"error reduction {error_reduction(best.point_f, combined):.1f}%"
    )

    if cfg.out:
        cfg.out.mkdir(parents=True, exist_ok=True)
        (cfg.out / "dev.gold").write_text(serialize_corpus(dev))
        (cfg.out / "test.gold").write_text(serialize_corpus(test))
        for split, corpus, outs in (("dev", dev, dev_out), ("test", test, test_out)):
            for o in outs:
                (cfg.out / f"{o.system_id}.{split}").write_text(serialize_corpus(corpus.with_tags(o.tags)))
        print(f"files written to {cfg.out}")


if __name__ == "__main__":
    main()
