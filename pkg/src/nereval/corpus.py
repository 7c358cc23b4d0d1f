"""CoNLL column files, IOB tag schemes and entity spans.

A file holds one token per line. Columns are separated by runs of spaces or
tabs and the last column is always the named entity tag. Blank lines end
sentences and a line starting with ``-DOCSTART-`` opens a new article.
"""
from __future__ import annotations

import enum
import io
import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence, TextIO

DOCSTART = "-DOCSTART-"
OUTSIDE = "O"

_SPLIT = re.compile(r"[ \t]+")


class Scheme(str, enum.Enum):
    IOB1 = "IOB1"
    IOB2 = "IOB2"

    @classmethod
    def coerce(cls, value: "Scheme | str") -> "Scheme":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).upper())
        except ValueError:
            raise ValueError(f"unknown tag scheme {value!r} (expected IOB1 or IOB2)") from None


class ConllFormatError(ValueError):
    """Raised for unreadable input; carries the source name and line number."""

    def __init__(self, message: str, line: int | None = None, source: str | None = None):
        self.line = line
        self.source = source
        where = ""
        if source is not None:
            where += f"{source}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)


class TagSchemeError(ValueError):
    """A tag sequence violates the declared scheme (strict mode only)."""

    def __init__(self, message: str, position: int):
        self.position = position
        super().__init__(f"position {position}: {message}")


def check_type_name(name: str) -> str:
    if not name or "-" in name or any(c.isspace() for c in name):
        raise ValueError(f"invalid entity type name {name!r}")
    return name


@dataclass(frozen=True)
class NeTag:
    """Structured view of a tag string such as ``O``, ``I-PER`` or ``B-LOC``."""

    kind: str  # "O", "I" or "B"
    type: str | None = None

    def __post_init__(self):
        if self.kind == OUTSIDE:
            if self.type is not None:
                raise ValueError("the outside tag carries no type")
        elif self.kind in ("I", "B"):
            check_type_name(self.type or "")
        else:
            raise ValueError(f"unknown tag kind {self.kind!r}")

    @classmethod
    def parse(cls, text: str) -> "NeTag":
        if text == OUTSIDE:
            return cls(OUTSIDE)
        prefix, sep, name = text.partition("-")
        if not sep or prefix not in ("I", "B"):
            raise ValueError(f"malformed tag {text!r}")
        try:
            return cls(prefix, name)
        except ValueError:
            raise ValueError(f"malformed tag {text!r}") from None

    def __str__(self) -> str:
        return OUTSIDE if self.kind == OUTSIDE else f"{self.kind}-{self.type}"


def split_tag(tag: str) -> tuple[str, str | None]:
    """Return ``(kind, type)`` for a tag string, validating it on the way."""
    if tag == OUTSIDE:
        return OUTSIDE, None
    if len(tag) > 2 and tag[1] == "-" and tag[0] in "IB":
        name = tag[2:]
        if "-" not in name and not any(c.isspace() for c in name):
            return tag[0], name
    raise ValueError(f"malformed tag {tag!r}")


def validate_tag(tag: str) -> str:
    split_tag(tag)
    return tag


@dataclass(frozen=True)
class Token:
    word: str
    aux: tuple[str, ...]
    tag: str

    @property
    def columns(self) -> tuple[str, ...]:
        return (self.word, *self.aux, self.tag)


@dataclass(frozen=True)
class Sentence:
    tokens: tuple[Token, ...]

    def __post_init__(self):
        if not self.tokens:
            raise ValueError("a sentence needs at least one token")

    def __len__(self) -> int:
        return len(self.tokens)

    @property
    def words(self) -> list[str]:
        return [t.word for t in self.tokens]

    @property
    def tags(self) -> list[str]:
        return [t.tag for t in self.tokens]

    def with_tags(self, tags: Sequence[str]) -> "Sentence":
        if len(tags) != len(self.tokens):
            raise ValueError("tag count does not match sentence length")
        return Sentence(tuple(Token(t.word, t.aux, g) for t, g in zip(self.tokens, tags)))


@dataclass(frozen=True)
class Document:
    sentences: tuple[Sentence, ...]
    # columns of the -DOCSTART- line that opened this article, if any
    header: tuple[str, ...] | None = None

    def __post_init__(self):
        if not self.sentences:
            raise ValueError("a document needs at least one sentence")


@dataclass(frozen=True)
class Corpus:
    documents: tuple[Document, ...] = ()

    @property
    def sentences(self) -> list[Sentence]:
        return [s for d in self.documents for s in d.sentences]

    @property
    def n_tokens(self) -> int:
        return sum(len(s) for s in self.sentences)

    def tags(self) -> list[list[str]]:
        return [s.tags for s in self.sentences]

    def with_tags(self, tags: Sequence[Sequence[str]]) -> "Corpus":
        """Return a copy whose tag column is replaced sentence by sentence."""
        check_alignment(self, tags)
        it = iter(tags)
        docs = tuple(
            Document(tuple(s.with_tags(next(it)) for s in d.sentences), d.header)
            for d in self.documents
        )
        return Corpus(docs)

    @classmethod
    def from_sentences(cls, sentences: Iterable[Sentence]) -> "Corpus":
        sentences = tuple(sentences)
        return cls((Document(sentences),) if sentences else ())


@dataclass(frozen=True, order=True)
class EntitySpan:
    sentence_index: int
    start: int
    end: int  # inclusive
    type: str

    def __len__(self) -> int:
        return self.end - self.start + 1


@dataclass(frozen=True)
class CorpusStats:
    articles: int = 0
    sentences: int = 0
    tokens: int = 0
    entities_per_type: dict[str, int] = field(default_factory=dict)

    @property
    def entities(self) -> int:
        return sum(self.entities_per_type.values())


class AlignmentError(ValueError):
    pass


def check_alignment(corpus: Corpus, tags: Sequence[Sequence[str]], name: str = "prediction") -> None:
    """Raise :class:`AlignmentError` at the first sentence whose shape differs."""
    sentences = corpus.sentences
    if len(sentences) != len(tags):
        raise AlignmentError(
            f"{name} has {len(tags)} sentences, reference has {len(sentences)}"
        )
    for i, (s, t) in enumerate(zip(sentences, tags)):
        if len(s) != len(t):
            raise AlignmentError(
                f"{name} sentence {i} has {len(t)} tokens, reference has {len(s)}"
            )


# --- parsing -----------------------------------------------------------------


def _read_lines(source: TextIO | str | Iterable[str]) -> Iterator[str]:
    if isinstance(source, str):
        return iter(io.StringIO(source))
    return iter(source)


def parse_corpus(
    source: TextIO | str | Iterable[str],
    expected_columns: int | None = None,
    *,
    name: str | None = None,
) -> Corpus:
    """Parse CoNLL column text into a :class:`Corpus`.

    ``source`` may be an open text file, a string, or any iterable of lines.
    Tags are validated for form only; scheme checks happen at span extraction.
    """
    documents: list[Document] = []
    sentences: list[Sentence] = []
    tokens: list[Token] = []
    header: tuple[str, ...] | None = None

    def close_sentence():
        if tokens:
            sentences.append(Sentence(tuple(tokens)))
            tokens.clear()

    def close_document():
        nonlocal header
        close_sentence()
        if sentences:
            documents.append(Document(tuple(sentences), header))
        sentences.clear()
        header = None

    for lineno, raw in enumerate(_read_lines(source), start=1):
        line = raw.strip(" \t\r\n")
        if not line:
            close_sentence()
            continue
        cols = _SPLIT.split(line)
        if cols[0] == DOCSTART:
            close_document()
            header = tuple(cols)
            continue
        if len(cols) < 2:
            raise ConllFormatError(f"expected at least 2 columns, got {len(cols)}", lineno, name)
        if expected_columns is not None and len(cols) != expected_columns:
            raise ConllFormatError(
                f"expected {expected_columns} columns, got {len(cols)}", lineno, name
            )
        try:
            validate_tag(cols[-1])
        except ValueError as exc:
            raise ConllFormatError(str(exc), lineno, name) from None
        tokens.append(Token(cols[0], tuple(cols[1:-1]), cols[-1]))
    close_document()
    return Corpus(tuple(documents))


def read_corpus(path, expected_columns: int | None = None) -> Corpus:
    with open(path, encoding="utf-8") as fh:
        return parse_corpus(fh, expected_columns, name=str(path))


def serialize_corpus(corpus: Corpus) -> str:
    out: list[str] = []
    for doc in corpus.documents:
        if doc.header is not None:
            out.append(" ".join(doc.header))
            out.append("")
        for sent in doc.sentences:
            out.extend(" ".join(t.columns) for t in sent.tokens)
            out.append("")
    return "\n".join(out) + ("\n" if out else "")


def write_corpus(corpus: Corpus, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_corpus(corpus))


def split_prediction_column(corpus: Corpus) -> tuple[Corpus, list[list[str]]]:
    """Split a gold+prediction file into the gold corpus and predicted tags.

    The second-to-last column becomes the gold tag and the last column the
    prediction, which is the layout the classic evaluator reads.
    """
    gold_docs = []
    predicted: list[list[str]] = []
    for doc in corpus.documents:
        sents = []
        for sent in doc.sentences:
            toks = []
            pred = []
            for t in sent.tokens:
                if not t.aux:
                    raise ValueError(
                        f"token {t.word!r} has no gold column in front of the prediction"
                    )
                toks.append(Token(t.word, t.aux[:-1], validate_tag(t.aux[-1])))
                pred.append(t.tag)
            sents.append(Sentence(tuple(toks)))
            predicted.append(pred)
        header = doc.header[:-1] if doc.header and len(doc.header) > 2 else doc.header
        gold_docs.append(Document(tuple(sents), header))
    return Corpus(tuple(gold_docs)), predicted


def append_column(corpus: Corpus, tags: Sequence[Sequence[str]]) -> Corpus:
    """Append ``tags`` as a new last column, keeping the old tag as auxiliary."""
    check_alignment(corpus, tags)
    it = iter(tags)
    docs = []
    for doc in corpus.documents:
        sents = []
        for sent in doc.sentences:
            new = next(it)
            sents.append(
                Sentence(tuple(Token(t.word, (*t.aux, t.tag), g) for t, g in zip(sent.tokens, new)))
            )
        header = (*doc.header, doc.header[-1]) if doc.header else doc.header
        docs.append(Document(tuple(sents), header))
    return Corpus(tuple(docs))


# --- tag schemes -------------------------------------------------------------


def tags_to_spans(
    tags: Sequence[str],
    scheme: Scheme | str = Scheme.IOB1,
    *,
    strict: bool = False,
    sentence_index: int = 0,
) -> list[EntitySpan]:
    """Extract maximal typed spans from one sentence's tags.

    In lenient mode an ``I-X`` that cannot continue a span of type X opens a
    new one, whatever the scheme; strict mode raises :class:`TagSchemeError`
    on such tags for IOB2 and on a ``B-X`` not following type X for IOB1.
    """
    scheme = Scheme.coerce(scheme)
    spans: list[EntitySpan] = []
    start = -1
    cur: str | None = None
    for i, tag in enumerate(tags):
        kind, typ = split_tag(tag)
        if kind == "I" and typ == cur:
            continue
        if cur is not None:
            spans.append(EntitySpan(sentence_index, start, i - 1, cur))
        if kind == OUTSIDE:
            cur = None
            continue
        if strict:
            if kind == "I" and scheme is Scheme.IOB2:
                raise TagSchemeError(f"{tag} does not continue an entity of its type", i)
            if kind == "B" and scheme is Scheme.IOB1 and cur != typ:
                raise TagSchemeError(f"{tag} does not follow an entity of its type", i)
        start, cur = i, typ
    if cur is not None:
        spans.append(EntitySpan(sentence_index, start, len(tags) - 1, cur))
    return spans


def spans_to_tags(
    spans: Sequence[EntitySpan], length: int, scheme: Scheme | str = Scheme.IOB1
) -> list[str]:
    scheme = Scheme.coerce(scheme)
    tags = [OUTSIDE] * length
    prev: EntitySpan | None = None
    for span in spans:
        if not 0 <= span.start <= span.end < length:
            raise ValueError(f"span {span} out of range for length {length}")
        if prev is not None and span.start <= prev.end:
            raise ValueError(f"span {span} overlaps or precedes {prev}")
        check_type_name(span.type)
        adjacent = prev is not None and prev.end + 1 == span.start and prev.type == span.type
        first = "B" if scheme is Scheme.IOB2 or adjacent else "I"
        tags[span.start] = f"{first}-{span.type}"
        for i in range(span.start + 1, span.end + 1):
            tags[i] = f"I-{span.type}"
        prev = span
    return tags


def convert_scheme(
    tags: Sequence[str],
    source: Scheme | str,
    target: Scheme | str,
    *,
    strict: bool = False,
) -> list[str]:
    return spans_to_tags(tags_to_spans(tags, source, strict=strict), len(tags), target)


def repair(tags: Sequence[str], scheme: Scheme | str = Scheme.IOB1) -> list[str]:
    """Rewrite a possibly inconsistent sequence as valid tags of ``scheme``."""
    return convert_scheme(tags, scheme, scheme)


def corpus_spans(
    tags: Sequence[Sequence[str]], scheme: Scheme | str = Scheme.IOB1, *, strict: bool = False
) -> list[list[EntitySpan]]:
    return [
        tags_to_spans(t, scheme, strict=strict, sentence_index=i) for i, t in enumerate(tags)
    ]


def corpus_stats(
    corpus: Corpus, scheme: Scheme | str = Scheme.IOB1, *, include_docstart: bool = False
) -> CorpusStats:
    counts: Counter[str] = Counter()
    for spans in corpus_spans(corpus.tags(), scheme):
        counts.update(s.type for s in spans)
    tokens = corpus.n_tokens
    if include_docstart:
        tokens += sum(1 for d in corpus.documents if d.header is not None)
    return CorpusStats(
        articles=len(corpus.documents),
        sentences=len(corpus.sentences),
        tokens=tokens,
        entities_per_type=dict(sorted(counts.items())),
    )
