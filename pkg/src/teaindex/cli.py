"""Command-line interface: ``teaindex {index,terms,search,eval,stem,thesaurus-check}``.

Exit codes: 0 success, 1 validation/configuration error, 2 runtime/pipeline error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import errors
from .collocation import (DEFAULT_LOG_BASE, DEFAULT_MAX_LEN, DEFAULT_MI_THRESHOLD,
                          compound_report_csv, compound_report_rows, extract_compound_terms)
from .corpus import corpus_fingerprint, load_corpus
from .evaluation import curve_csv, load_qrels, load_run, mean_average_precision
from .indexer import (PipelineConfig, index_comments, keyword_block, load_index, save_index,
                      search, with_overrides)
from .preprocessing import english_ruleset, french_ruleset, load_ruleset, preprocess_document, stem
from .thesaurus import MatchPolicy, parse_thesaurus
from .weighting import (DEFAULT_TFIDF_THRESHOLD, compute_stats, corpus_surfaces,
                        select_simple_terms, term_report_csv, term_report_rows)

CONFIG_ENV = "TEAINDEX_CONFIG"
EXIT_OK, EXIT_INVALID, EXIT_RUNTIME = 0, 1, 2

_INVALID = (errors.IngestionError, errors.ValidationError, errors.ParseError,
            errors.ConfigurationError, errors.FormatVersionError)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _add_pipeline_flags(p):
    g = p.add_argument_group("pipeline")
    g.add_argument("--config", help=f"JSON pipeline config; flags override it "
                                    f"(default: ${CONFIG_ENV} if set)")
    g.add_argument("--thesaurus", help="SKOS/RDF thesaurus used to verify terms (required)")
    g.add_argument("--tfidf-threshold", type=float,
                   help=f"simple-term selection threshold (default: {DEFAULT_TFIDF_THRESHOLD})")
    g.add_argument("--mi-threshold", type=float,
                   help=f"compound-term MI threshold (default: {DEFAULT_MI_THRESHOLD})")
    g.add_argument("--mi-log-base", type=float,
                   help=f"logarithm base of MI (default: {DEFAULT_LOG_BASE:g})")
    g.add_argument("--max-compound-len", type=int,
                   help=f"longest compound in tokens (default: {DEFAULT_MAX_LEN})")
    g.add_argument("--window", type=int, help="co-occurrence window in tokens (default: 1)")
    g.add_argument("--stopwords", action="append",
                   help="stop-word file, repeatable (default: shipped French lists)")
    g.add_argument("--stemmer", help="stemmer rule file (default: shipped French rules)")
    g.add_argument("--repair", help="repair-map file; '' disables (default: shipped French map)")
    g.add_argument("--match-stem", action="store_true", default=None,
                   help="match thesaurus labels on stems (default: off)")
    g.add_argument("--match-token-subset", action="store_true", default=None,
                   help="let a compound match when all its tokens occur in one label (default: off)")
    g.add_argument("--jobs", type=int, default=os.cpu_count() or 1,
                   help="worker threads for preprocessing (default: available cores)")


def _pipeline_config(args) -> PipelineConfig:
    config_path = args.config or os.environ.get(CONFIG_ENV)
    config = PipelineConfig()
    if config_path:
        path = Path(config_path)
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except FileNotFoundError as exc:
            raise errors.ConfigurationError(f"config file not found: {path}") from exc
        except json.JSONDecodeError as exc:
            raise errors.ConfigurationError(f"{path}: invalid JSON ({exc.msg})") from exc
        try:
            config = PipelineConfig.from_dict(data, base_dir=path.parent)
        except TypeError as exc:
            raise errors.ConfigurationError(f"{path}: {exc}") from exc
    policy = config.match_policy
    if args.match_stem or args.match_token_subset:
        policy = MatchPolicy(policy.fold_case, policy.fold_diacritics,
                             bool(args.match_stem) or policy.stem_labels,
                             bool(args.match_token_subset) or policy.allow_token_subset)
    return with_overrides(
        config,
        tfidf_threshold=args.tfidf_threshold,
        mi_threshold=args.mi_threshold,
        mi_log_base=args.mi_log_base,
        max_compound_len=args.max_compound_len,
        window=args.window,
        stopwords_paths=tuple(args.stopwords) if args.stopwords else None,
        stemmer_path=args.stemmer,
        repair_path=args.repair,
        thesaurus_path=args.thesaurus,
        match_policy=policy,
    )


def cmd_index(args) -> int:
    config = _pipeline_config(args)
    if not config.thesaurus_path:
        raise errors.ConfigurationError(
            "a thesaurus is required: pass --thesaurus PATH or set thesaurus_path in --config")
    corpus = load_corpus(args.manifest)
    index = index_comments(corpus, config, jobs=max(1, args.jobs))
    save_index(index, args.output)
    names = {i: info.name for i, info in corpus.images.items() if info.name}
    sys.stdout.write(keyword_block(index, names))
    return EXIT_OK


def cmd_terms(args) -> int:
    config = _pipeline_config(args)
    cleaning, ruleset = config.resolve()
    corpus = load_corpus(args.manifest)
    documents = [preprocess_document(a, cleaning, ruleset) for a in corpus.annotations]
    try:
        stats = compute_stats(documents)
    except errors.StatisticsError as exc:
        raise errors.PipelineError("no content tokens after cleaning") from exc
    candidates = select_simple_terms(documents, stats, config.tfidf_threshold)
    compounds = extract_compound_terms(
        candidates, documents, mi_threshold=config.mi_threshold,
        max_len=config.max_compound_len, log_base=config.mi_log_base,
        window=config.window, surfaces=corpus_surfaces(documents),
    )
    if args.format == "json":
        out = json.dumps({"simple_terms": term_report_rows(candidates),
                          "compound_terms": compound_report_rows(compounds)},
                         ensure_ascii=False, indent=2) + "\n"
        sys.stdout.write(out)
        return EXIT_OK
    terms_csv, compounds_csv = term_report_csv(candidates), compound_report_csv(compounds)
    if args.out_dir:
        out_dir = Path(args.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "terms.csv").write_text(terms_csv, encoding="utf-8")
        (out_dir / "compounds.csv").write_text(compounds_csv, encoding="utf-8")
    else:
        sys.stdout.write(terms_csv + "\n" + compounds_csv)
    return EXIT_OK


def cmd_search(args) -> int:
    index = load_index(args.index)
    if args.manifest:
        current = corpus_fingerprint(load_corpus(args.manifest))
        if current != index.corpus_fingerprint:
            print(f"warning: {args.index} was built from a different corpus than "
                  f"{args.manifest}; results may be stale", file=sys.stderr)
    hits = search(index, " ".join(args.query))
    if args.format == "json":
        rows = [{"image_id": h.image_id, "score": h.score, "weight": round(h.weight, 6),
                 "keywords": list(h.keywords)} for h in hits]
        sys.stdout.write(json.dumps(rows, ensure_ascii=False, indent=2) + "\n")
    else:
        for rank, h in enumerate(hits, 1):
            print(f"{rank}\t{h.image_id}\t{h.score}\t{h.weight:.4f}\t{'; '.join(h.keywords)}")
    return EXIT_OK


def cmd_eval(args) -> int:
    run = load_run(args.run)
    qrels = load_qrels(args.qrels)
    print(f"MAP {mean_average_precision(run, qrels):.4f}")
    if args.curve:
        Path(args.curve).write_text(curve_csv(run, qrels), encoding="utf-8")
    return EXIT_OK


def cmd_stem(args) -> int:
    if args.rules:
        ruleset = load_ruleset(args.rules)
    else:
        ruleset = english_ruleset() if args.lang == "en" else french_ruleset()
    for word in args.words:
        print(stem(word.lower(), ruleset))
    return EXIT_OK


def cmd_thesaurus_check(args) -> int:
    thesaurus = parse_thesaurus(args.path)
    s = thesaurus.summary()
    print(f"{s['concepts']} concepts")
    print(f"{s['prefLabel']} prefLabel, {s['altLabel']} altLabel, {s['hiddenLabel']} hiddenLabel "
          f"({s['distinct_labels']} distinct normalized labels)")
    print(f"{s['warnings']} warnings")
    for w in thesaurus.warnings:
        print(f"  warning: {w}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="teaindex", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("index", help="extract keywords and write an image index")
    p.add_argument("manifest", help="corpus manifest (JSON)")
    p.add_argument("-o", "--output", default="index.json", help="index file (default: index.json)")
    _add_pipeline_flags(p)
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("terms", help="report scored simple and compound terms")
    p.add_argument("manifest", help="corpus manifest (JSON)")
    p.add_argument("--format", choices=("csv", "json"), default="csv",
                   help="output format (default: csv)")
    p.add_argument("--out-dir", help="write terms.csv and compounds.csv here instead of stdout")
    _add_pipeline_flags(p)
    p.set_defaults(func=cmd_terms)

    p = sub.add_parser("search", help="query an index")
    p.add_argument("index", help="index file written by 'teaindex index'")
    p.add_argument("query", nargs="+", help="query words")
    p.add_argument("--manifest", help="warn if the index is stale for this corpus")
    p.add_argument("--format", choices=("text", "json"), default="text",
                   help="output format (default: text)")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("eval", help="MAP and precision/recall curves for a run")
    p.add_argument("run", help="run file: query_id image_id rank score")
    p.add_argument("qrels", help="qrels file: query_id image_id relevance")
    p.add_argument("--curve", help="write the precision/recall CSV here")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("stem", help="stem words with a rule file")
    p.add_argument("words", nargs="+")
    p.add_argument("--lang", choices=("fr", "en"), default="fr",
                   help="shipped ruleset to use (default: fr)")
    p.add_argument("--rules", help="rule file overriding --lang")
    p.set_defaults(func=cmd_stem)

    p = sub.add_parser("thesaurus-check", help="parse a thesaurus and report counts")
    p.add_argument("path")
    p.set_defaults(func=cmd_thesaurus_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except _INVALID as exc:
        print(f"error: {exc}", file=sys.stderr)
        if isinstance(exc, errors.ConfigurationError):
            print(f"usage hint: teaindex {args.command} --help", file=sys.stderr)
        return EXIT_INVALID
    except errors.TeaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
