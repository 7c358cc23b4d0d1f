"""Unique-class phrase memorization baseline with leftmost-longest tagging."""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Sequence

from .corpus import Corpus, EntitySpan, Scheme, Sentence, check_type_name, corpus_spans, spans_to_tags

Phrase = tuple[str, ...]


@dataclass(frozen=True)
class BaselineLexicon:
    entries: dict[Phrase, str]
    case_sensitive: bool = True

    @property
    def max_phrase_len(self) -> int:
        return max((len(p) for p in self.entries), default=0)

    def key(self, words: Sequence[str]) -> Phrase:
        return tuple(words) if self.case_sensitive else tuple(w.casefold() for w in words)

    def __len__(self) -> int:
        return len(self.entries)


def build_lexicon(
    training: Corpus, scheme: Scheme | str = Scheme.IOB1, case_sensitive: bool = True
) -> BaselineLexicon:
    """Collect entity phrases that carry exactly one type across all training occurrences."""
    seen: dict[Phrase, set[str]] = defaultdict(set)
    sentences = training.sentences
    fold = (lambda w: w) if case_sensitive else str.casefold
    for sent, spans in zip(sentences, corpus_spans(training.tags(), scheme)):
        words = sent.words
        for span in spans:
            phrase = tuple(fold(w) for w in words[span.start : span.end + 1])
            seen[phrase].add(span.type)
    entries = {p: next(iter(types)) for p, types in seen.items() if len(types) == 1}
    return BaselineLexicon(entries, case_sensitive)


def match_spans(lexicon: BaselineLexicon, words: Sequence[str], sentence_index: int = 0) -> list[EntitySpan]:
    spans = []
    n = len(words)
    longest = lexicon.max_phrase_len
    keys = lexicon.key(words)
    i = 0
    while i < n:
        for length in range(min(longest, n - i), 0, -1):
            typ = lexicon.entries.get(keys[i : i + length])
            if typ is not None:
                spans.append(EntitySpan(sentence_index, i, i + length - 1, typ))
                i += length
                break
        else:
            i += 1
    return spans


def tag_baseline(
    lexicon: BaselineLexicon, sentence: Sentence | Sequence[str], scheme: Scheme | str = Scheme.IOB1
) -> list[str]:
    """Tag one sentence by scanning left to right for the longest lexicon phrase."""
    words = sentence.words if isinstance(sentence, Sentence) else list(sentence)
    return spans_to_tags(match_spans(lexicon, words), len(words), scheme)


def tag_corpus(lexicon: BaselineLexicon, corpus: Corpus, scheme: Scheme | str = Scheme.IOB1) -> list[list[str]]:
    return [tag_baseline(lexicon, s, scheme) for s in corpus.sentences]


def dump_lexicon(lexicon: BaselineLexicon) -> str:
    lines = sorted(f"{' '.join(p)}\t{t}" for p, t in lexicon.entries.items())
    return "".join(line + "\n" for line in lines)


def load_lexicon(text: str, case_sensitive: bool = True) -> BaselineLexicon:
    entries: dict[Phrase, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        phrase, sep, typ = line.rstrip("\r\n").rpartition("\t")
        if not sep or not phrase.strip():
            raise ValueError(f"lexicon line {lineno}: expected 'phrase<TAB>TYPE'")
        words = tuple(phrase.split())
        if not case_sensitive:
            words = tuple(w.casefold() for w in words)
        entries[words] = check_type_name(typ)
    return BaselineLexicon(entries, case_sensitive)
