"""Exact-match evaluation, baseline tagging, bootstrap significance and
majority-vote combination for CoNLL-style named entity output."""
from .corpus import (
    DOCSTART,
    AlignmentError,
    ConllFormatError,
    Corpus,
    CorpusStats,
    Document,
    EntitySpan,
    NeTag,
    Scheme,
    Sentence,
    TagSchemeError,
    Token,
    convert_scheme,
    corpus_stats,
    parse_corpus,
    read_corpus,
    serialize_corpus,
    spans_to_tags,
    tags_to_spans,
)
from .scoring import EvalReport, TypeScore, error_reduction, fbeta, score

__all__ = [
    "DOCSTART", "AlignmentError", "ConllFormatError", "Corpus", "CorpusStats", "Document",
    "EntitySpan", "NeTag", "Scheme", "Sentence", "TagSchemeError", "Token", "convert_scheme",
    "corpus_stats", "parse_corpus", "read_corpus", "serialize_corpus", "spans_to_tags",
    "tags_to_spans", "EvalReport", "TypeScore", "error_reduction", "fbeta", "score",
]
