"""Command-line front end.

Exit status is 0 on success, 2 for unreadable or inconsistent input and 1
for anything unexpected. Reports go to stdout, diagnostics to stderr.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Sequence

from . import baseline, ensemble, significance
from .corpus import (
    Corpus,
    Scheme,
    append_column,
    check_alignment,
    convert_scheme,
    corpus_spans,
    corpus_stats,
    parse_corpus,
    read_corpus,
    serialize_corpus,
    split_prediction_column,
)
from .scoring import fmt, render_kv, render_table, score

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_INPUT = 2


class InputError(Exception):
    pass


def _read(path: str) -> Corpus:
    if path == "-":
        return parse_corpus(sys.stdin, name="<stdin>")
    try:
        return read_corpus(path)
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror or exc}") from None


def _gold_and_pred(args, path: str) -> tuple[Corpus, list[list[str]]]:
    """Gold corpus and predicted tags, from one two-column file or --gold plus a prediction file."""
    if args.gold:
        gold = _read_checked(args.gold, args)
        pred_corpus = _read_checked(path, args)
        pred = pred_corpus.tags()
    else:
        both = _read(path)
        try:
            gold, pred = split_prediction_column(both)
        except ValueError as exc:
            raise InputError(f"{path}: {exc}") from None
        _strict_check(gold.tags(), args, path)
        _strict_check(pred, args, path)
    try:
        check_alignment(gold, pred, name=path)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    return gold, pred


def _read_checked(path: str, args) -> Corpus:
    corpus = _read(path)
    _strict_check(corpus.tags(), args, path)
    return corpus


def _strict_check(tags, args, path: str) -> None:
    if not getattr(args, "strict", False):
        return
    for i, sent in enumerate(tags):
        try:
            corpus_spans([sent], args.scheme, strict=True)
        except ValueError as exc:
            raise InputError(f"{path}: sentence {i}: {exc}") from None


def _write_text(text: str, path: str | None) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


# --- commands ----------------------------------------------------------------


def cmd_eval(args) -> int:
    gold, pred = _gold_and_pred(args, args.file)
    report = score(gold, pred, args.scheme, args.beta)
    sys.stdout.write(render_kv(report) if args.format == "kv" else render_table(report))
    return EXIT_OK


def cmd_stats(args) -> int:
    lines = []
    for path in args.files:
        corpus = _read_checked(path, args)
        st = corpus_stats(corpus, args.scheme, include_docstart=args.include_docstart)
        if args.format == "kv":
            lines += [
                f"{path}.articles={st.articles}",
                f"{path}.sentences={st.sentences}",
                f"{path}.tokens={st.tokens}",
            ]
            lines += [f"{path}.{t}={n}" for t, n in st.entities_per_type.items()]
        else:
            types = "  ".join(f"{t} {n}" for t, n in st.entities_per_type.items())
            lines.append(
                f"{path}: articles {st.articles}  sentences {st.sentences}  tokens {st.tokens}"
                f"  entities {st.entities}" + (f"  ({types})" if types else "")
            )
    sys.stdout.write("\n".join(lines) + "\n")
    return EXIT_OK


def cmd_convert(args) -> int:
    args.scheme = args.source
    corpus = _read_checked(args.file, args)
    converted = [convert_scheme(t, args.source, args.target) for t in corpus.tags()]
    _write_text(serialize_corpus(corpus.with_tags(converted)), args.output)
    return EXIT_OK


def cmd_baseline(args) -> int:
    train = _read_checked(args.train, args)
    lex = baseline.build_lexicon(train, args.scheme, case_sensitive=not args.case_fold)
    if args.lexicon_out:
        Path(args.lexicon_out).write_text(baseline.dump_lexicon(lex), encoding="utf-8")
    print(f"lexicon: {len(lex)} phrases, longest {lex.max_phrase_len} tokens", file=sys.stderr)
    if not args.test:
        return EXIT_OK
    test = _read_checked(args.test, args)
    pred = baseline.tag_corpus(lex, test, args.scheme)
    if args.output:
        _write_text(serialize_corpus(append_column(test, pred)), args.output)
    report = score(test, pred, args.scheme, args.beta)
    sys.stdout.write(render_kv(report) if args.format == "kv" else render_table(report))
    return EXIT_OK


def cmd_significance(args) -> int:
    systems = []
    for path in args.files:
        gold, pred = _gold_and_pred(args, path)
        dist = significance.bootstrap_distribution(
            gold, pred, args.replicates, args.seed, args.scheme, args.beta,
            level=args.level, workers=args.workers,
        )
        systems.append((path, dist))
    out = []
    kv = args.format == "kv"
    if kv:
        out += [f"seed={args.seed}", f"replicates={args.replicates}", f"level={args.level!r}"]
    else:
        out.append(f"seed {args.seed}  replicates {args.replicates}  level {args.level:g}")
    for label, (path, dist) in zip("AB", systems):
        lo, hi = significance.interval(dist, args.level)
        m = (hi - lo) / 2
        if kv:
            out += [
                f"{label}.file={path}", f"{label}.f={dist.point_f!r}",
                f"{label}.lo={lo!r}", f"{label}.hi={hi!r}", f"{label}.margin={m!r}",
            ]
            if args.dump_replicates:
                out.append(f"{label}.replicates=" + ",".join(repr(v) for v in dist.f_values))
        else:
            out.append(
                f"{label} {path}: F {fmt(dist.point_f)}±{fmt(m, 1)}  "
                f"interval [{fmt(lo)}, {fmt(hi)}]"
            )
            if args.dump_replicates:
                out.append(f"{label} replicates: " + " ".join(fmt(v) for v in dist.f_values))
    if len(systems) == 2:
        v = significance.compare(systems[0][1].point_f, systems[1][1], args.level)
        if kv:
            out.append(f"significant={str(v.significant).lower()}")
        else:
            where = "outside" if v.significant else "inside"
            out.append(
                f"verdict: {'significant' if v.significant else 'not significant'} "
                f"(A's F {fmt(v.a_point_f)} lies {where} B's central {args.level:.0%} "
                f"[{fmt(v.b_interval[0])}, {fmt(v.b_interval[1])}])"
            )
    sys.stdout.write("\n".join(out) + "\n")
    return EXIT_OK


def _load_systems(args) -> tuple[Corpus | None, Corpus, list[ensemble.SystemOutput]]:
    gold = _read_checked(args.gold, args) if args.gold else None
    corpora = [_read_checked(p, args) for p in args.files]
    ids = [Path(p).stem for p in args.files]
    if len(set(ids)) != len(ids):
        ids = list(args.files)
    if len(set(ids)) != len(ids):
        raise InputError("the same prediction file was given twice")
    ref = gold if gold is not None else corpora[0]
    outputs = []
    for sid, c in zip(ids, corpora):
        tags = c.tags()
        try:
            check_alignment(ref, tags, name=sid)
        except ValueError as exc:
            raise InputError(str(exc)) from None
        outputs.append(ensemble.SystemOutput.of(sid, tags))
    return gold, ref, outputs


def _tie_order(args, outputs, gold) -> list[str] | None:
    if args.tie_order:
        order = args.tie_order.split(",")
        missing = {o.system_id for o in outputs} - set(order)
        if missing:
            raise InputError(f"--tie-order lacks {sorted(missing)}")
        return order
    if gold is not None:
        return ensemble.rank_by_f(outputs, gold, args.scheme)
    return None


def _combined(ref: Corpus, gold: Corpus | None, voted) -> str:
    if gold is not None:
        return serialize_corpus(append_column(gold, voted))
    return serialize_corpus(ref.with_tags(voted))


def cmd_vote(args) -> int:
    gold, ref, outputs = _load_systems(args)
    order = _tie_order(args, outputs, gold)
    voted = ensemble.majority_vote(outputs, order, args.scheme, repair_output=not args.no_repair)
    _write_text(_combined(ref, gold, voted), args.output)
    if gold is not None:
        report = score(gold, voted, args.scheme, args.beta)
        print(f"combined F {fmt(report.overall.fbeta)}", file=sys.stderr)
    return EXIT_OK


def cmd_select(args) -> int:
    gold, ref, outputs = _load_systems(args)
    order = _tie_order(args, outputs, gold)
    subset, trace = ensemble.hill_climb_select(
        outputs, gold, args.beam, order, args.scheme,
        patience=args.patience, workers=args.workers,
    )
    best_f = trace.iterations[-1][1].dev_f
    chosen = [o.system_id for o in outputs if o.system_id in subset]
    if args.format == "kv":
        sys.stdout.write(f"subset={','.join(chosen)}\ndev_f={best_f!r}\niterations={len(trace.iterations)}\n")
    else:
        sys.stdout.write(f"selected {len(chosen)} systems: {' '.join(chosen)}\ndev F {fmt(best_f)}\n")
    if args.trace:
        _write_text("\n".join(trace.lines()) + "\n", args.trace)
    if args.output:
        members = [o for o in outputs if o.system_id in subset]
        voted = ensemble.majority_vote(members, order, args.scheme, repair_output=not args.no_repair)
        _write_text(_combined(ref, gold, voted), args.output)
    return EXIT_OK


# --- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="nereval", description="Evaluate, combine and compare CoNLL named entity outputs."
    )
    sub = ap.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scheme", type=Scheme.coerce, default=Scheme.IOB1, help="tag scheme (IOB1 or IOB2)")
    common.add_argument("--strict", action="store_true", help="reject tags that violate the scheme")
    common.add_argument("--format", choices=["table", "kv"], default="table")
    common.add_argument("--beta", type=float, default=1.0)

    p = sub.add_parser("eval", parents=[common], help="exact-match precision/recall/F")
    p.add_argument("file", help="file whose last two columns are gold and predicted tags, "
                   "or a prediction file when --gold is given")
    p.add_argument("--gold", help="separate gold file")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("stats", parents=[common], help="article, sentence, token and entity counts")
    p.add_argument("files", nargs="+")
    p.add_argument("--include-docstart", action="store_true", help="count -DOCSTART- lines as tokens")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("convert", parents=[common], help="rewrite the tag column in another scheme")
    p.add_argument("file")
    p.add_argument("--from", dest="source", type=Scheme.coerce, default=Scheme.IOB1)
    p.add_argument("--to", dest="target", type=Scheme.coerce, default=Scheme.IOB2)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("baseline", parents=[common], help="unique-class longest-match baseline")
    p.add_argument("--train", required=True)
    p.add_argument("--test")
    p.add_argument("--case-fold", action="store_true")
    p.add_argument("--lexicon-out", help="write the lexicon as phrase<TAB>TYPE lines")
    p.add_argument("-o", "--output", help="write the test file with a prediction column appended")
    p.set_defaults(func=cmd_baseline)

    p = sub.add_parser("significance", parents=[common], help="bootstrap interval and A-vs-B verdict")
    p.add_argument("files", nargs="+", help="system A (and optionally B) outputs")
    p.add_argument("--gold")
    p.add_argument("--replicates", type=int, default=significance.DEFAULT_REPLICATES)
    p.add_argument("--level", type=float, default=significance.DEFAULT_LEVEL)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int)
    p.add_argument("--dump-replicates", action="store_true")
    p.set_defaults(func=cmd_significance)

    for name, func, text in (
        ("vote", cmd_vote, "per-token majority vote of several outputs"),
        ("select", cmd_select, "choose the system subset whose vote scores best on dev data"),
    ):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("files", nargs="+", help="prediction files; the last column is used")
        p.add_argument("--gold", required=name == "select")
        p.add_argument("--tie-order", help="comma-separated system ids, best first")
        p.add_argument("--no-repair", action="store_true", help="skip re-encoding of voted tags")
        p.add_argument("-o", "--output")
        if name == "select":
            p.add_argument("--beam", type=int, default=ensemble.DEFAULT_BEAM)
            p.add_argument("--patience", type=int)
            p.add_argument("--trace", help="write one line per search iteration")
            p.add_argument("--workers", type=int)
        p.set_defaults(func=func)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (InputError, ValueError) as exc:
        print(f"nereval: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # noqa: BLE001
        print(f"nereval: internal error: {exc!r}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
