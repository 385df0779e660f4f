"""Operator entry point.

Subcommands: ingest, train, summarize, eval, ablate, curve. Every run
writes its outputs plus one manifest (<out>.manifest.json) carrying the
command, config digest, and seed needed to reproduce it.

Exit codes: 0 success, 2 usage error, 3 data error, 4 provider error.
"""

from __future__ import annotations

import argparse
import html as html_lib
import json
import sys
import time

from assort import __version__, corpus as corpus_mod, evaluation
from assort.config import (
    ConfigError,
    bundle_config,
    config_digest,
    embedding_config,
    gateway_config,
    load_config,
)
from assort.corpus import CorpusError, load_corpus
from assort.embeddings import EmbeddingError, make_provider
from assort.ensemble import BundleError, Summary, load_bundle, save_bundle, train_bundle
from assort.evaluation import (
    AblationVariant,
    IndirectPipeline,
    LeadKPipeline,
    SupervisedPipeline,
    evaluate,
    low_resource_curve,
    render_table,
    report_record,
    write_reports,
)
from assort.featurizer import default_lexicons
from assort.gateway import GatewayClient, GatewayError
from assort.indirect import (
    RemoteNli,
    RemoteSummarizer,
    StubNli,
    StubSummarizer,
    summarize_indirect,
)
from assort.question_classifier import QuestionType


def _effective_config(args) -> dict:
    overrides = {}
    if getattr(args, "stub_models", False):
        overrides["embedding_backing"] = "stub"
    return load_config(getattr(args, "config", None), overrides or None)


def _lexicons(config):
    return default_lexicons(config["lexicon_dir"] or None)


def _embedder(config, args):
    emb_config = embedding_config(config)
    gateway = None
    if emb_config.backing == "remote":
        gateway = GatewayClient(gateway_config(config))
    return make_provider(emb_config, gateway)


def _indirect_providers(config, args):
    if args.stub_models:
        return StubSummarizer(), StubNli()
    gateway = GatewayClient(gateway_config(config))
    return RemoteSummarizer(gateway), RemoteNli(gateway)


def _write_manifest(out_path, args, config, artifacts, started):
    manifest = {
        "command": args.command,
        "argv": list(getattr(args, "_argv", [])),
        "config_digest": config_digest(config),
        "seed": getattr(args, "seed", 0),
        "started_utc": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime(started)),
        "finished_utc": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        "artifacts": [str(a) for a in artifacts],
        "version": __version__,
    }
    path = str(out_path) + ".manifest.json"
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(manifest, handle, indent=2, sort_keys=True)
        handle.write("\n")
    return path


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_ingest(args) -> int:
    started = time.time()
    config = _effective_config(args)
    corpus = load_corpus(args.corpus)
    by_type = {t: 0 for t in QuestionType}
    for post in corpus.posts:
        gold_type = corpus.question_for(post).gold_type
        if gold_type is not None:
            by_type[gold_type] += 1
    stats = {
        "questions": len(corpus.questions),
        "posts": len(corpus.posts),
        "sentences": sum(len(p.sentences) for p in corpus.posts),
        "labeled_posts": sum(1 for p in corpus.posts if p.gold_summary is not None),
        "posts_per_type": {corpus_mod.TYPE_LABELS[t]: n for t, n in by_type.items()},
    }
    with open(args.out, "w", encoding="utf-8") as handle:
        json.dump(stats, handle, indent=2, sort_keys=True)
        handle.write("\n")
    print(json.dumps(stats, indent=2, sort_keys=True))
    _write_manifest(args.out, args, config, [args.out], started)
    return 0


def cmd_train(args) -> int:
    started = time.time()
    config = _effective_config(args)
    corpus = load_corpus(args.corpus)
    split = corpus_mod.split_corpus(corpus, seed=args.seed)
    embedder = _embedder(config, args)
    bundle = train_bundle(
        corpus, split, bundle_config(config, args.seed), embedder, _lexicons(config)
    )
    save_bundle(bundle, args.out)
    _write_manifest(args.out, args, config, [args.out], started)
    print(f"bundle written to {args.out} (theta={bundle.theta})")
    return 0


def _render_summaries_json(mode, entries) -> str:
    doc = {"format": "assort-summaries", "version": 1, "mode": mode, "posts": entries}
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _render_summaries_html(mode, entries) -> str:
    parts = [
        "<!DOCTYPE html>",
        "<html><head><meta charset=\"utf-8\"><title>assort summaries</title>",
        "<style>mark.selected{background:#ffec99;padding:0 2px}"
        "section.post{margin:1em 0;border-bottom:1px solid #ccc}</style>",
        "</head><body>",
        f"<h1>Summaries ({html_lib.escape(mode)})</h1>",
    ]
    for entry in entries:
        parts.append(f"<section class=\"post\" id=\"post-{html_lib.escape(entry['post_id'])}\">")
        parts.append(f"<h2>Post {html_lib.escape(entry['post_id'])}</h2>")
        parts.append(f"<p class=\"question\">{html_lib.escape(entry['question_title'])}</p>")
        selected = set(entry["selected"])
        rendered = []
        for i, text in enumerate(entry["sentences"]):
            escaped = html_lib.escape(text)
            if i in selected:
                rendered.append(f"<mark class=\"selected\">{escaped}</mark>")
            else:
                rendered.append(escaped)
        parts.append("<p>" + " ".join(rendered) + "</p>")
        parts.append("</section>")
    parts.append("</body></html>")
    return "\n".join(parts) + "\n"


def cmd_summarize(args) -> int:
    started = time.time()
    config = _effective_config(args)
    corpus = load_corpus(args.post)
    if not corpus.posts:
        raise CorpusError(f"{args.post}: no summarizable posts (code-only or empty)")

    summaries: list[tuple] = []
    if args.indirect:
        summarizer, nli = _indirect_providers(config, args)
        for post in corpus.posts:
            question = corpus.question_for(post)
            summary = summarize_indirect(
                post, summarizer, nli, max_length=config["summary_max_tokens"]
            )
            summaries.append((question, post, summary))
        mode = "indirect"
    else:
        if not args.bundle:
            raise ConfigError("summarize requires --bundle or --indirect")
        embedder = _embedder(config, args)
        bundle = load_bundle(args.bundle, embedder)
        lexicons = _lexicons(config)
        from assort.ensemble import summarize_supervised

        for post in corpus.posts:
            question = corpus.question_for(post)
            summary = summarize_supervised(bundle, question, post, embedder, lexicons)
            summaries.append((question, post, summary))
        mode = "supervised"

    entries = []
    for question, post, summary in summaries:
        if config["lead_fallback"] and not summary.selected and post.sentences:
            summary = Summary(post_id=post.id, selected=(0,), scores=summary.scores)
        entries.append(
            {
                "post_id": post.id,
                "question_title": question.title,
                "selected": list(summary.selected),
                "scores": list(summary.scores),
                "sentences": [s.text for s in post.sentences],
            }
        )

    if args.format == "json":
        rendered = _render_summaries_json(mode, entries)
    else:
        rendered = _render_summaries_html(mode, entries)
    with open(args.out, "w", encoding="utf-8") as handle:
        handle.write(rendered)
    _write_manifest(args.out, args, config, [args.out], started)
    return 0


def cmd_eval(args) -> int:
    started = time.time()
    config = _effective_config(args)
    corpus = load_corpus(args.corpus)
    splits = corpus_mod.kfold(corpus, k=args.folds, seed=args.seed)
    digest = config_digest(config)
    macro = config["macro_average"]

    reports = []
    if args.indirect:
        summarizer, nli = _indirect_providers(config, args)
        pipeline = IndirectPipeline(summarizer, nli, max_length=config["summary_max_tokens"])
        reports.append(
            evaluate(pipeline, corpus, splits, variant="indirect",
                     seed=args.seed, config_digest=digest, macro=macro)
        )
    else:
        embedder = _embedder(config, args)
        pipeline = SupervisedPipeline(
            bundle_config(config, args.seed), embedder, _lexicons(config)
        )
        reports.append(
            evaluate(pipeline, corpus, splits, variant="supervised",
                     seed=args.seed, config_digest=digest, macro=macro)
        )
    reports.append(
        evaluate(LeadKPipeline(args.lead_k), corpus, splits, variant=f"lead{args.lead_k}",
                 seed=args.seed, config_digest=digest, macro=macro)
    )

    write_reports(args.out, reports)
    print(render_table(reports), end="")
    _write_manifest(args.out, args, config, [args.out], started)
    return 0


def cmd_ablate(args) -> int:
    started = time.time()
    config = _effective_config(args)
    corpus = load_corpus(args.corpus)
    splits = corpus_mod.kfold(corpus, k=args.folds, seed=args.seed)
    embedder = _embedder(config, args)
    lexicons = _lexicons(config)
    digest = config_digest(config)

    reports = [
        evaluation.run_ablation(
            variant, corpus, splits, bundle_config(config, args.seed), embedder,
            lexicons, seed=args.seed, config_digest=digest,
            macro=config["macro_average"],
        )
        for variant in AblationVariant
    ]
    write_reports(args.out, reports)
    print(render_table(reports), end="")
    _write_manifest(args.out, args, config, [args.out], started)
    return 0


def cmd_curve(args) -> int:
    started = time.time()
    config = _effective_config(args)
    corpus = load_corpus(args.corpus)
    fractions = [float(f) for f in args.fractions.split(",") if f.strip()]
    if not fractions:
        raise ConfigError("--fractions must name at least one fraction")
    embedder = _embedder(config, args)
    summarizer, nli = _indirect_providers(config, args)

    reports = low_resource_curve(
        corpus,
        fractions,
        [args.seed],
        bundle_config(config, args.seed),
        embedder,
        _lexicons(config),
        indirect_pipeline=IndirectPipeline(summarizer, nli, config["summary_max_tokens"]),
        config_digest=config_digest(config),
        macro=config["macro_average"],
    )
    write_reports(args.out, reports)
    print(render_table(reports), end="")
    _write_manifest(args.out, args, config, [args.out], started)
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="assort",
        description="Extractive summarization of Stack Overflow answer posts.",
    )
    parser.add_argument("--version", action="version", version=f"assort {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, corpus_flag=True):
        if corpus_flag:
            p.add_argument("--corpus", required=True, help="corpus file (line-delimited JSON)")
        p.add_argument("--config", default=None, help="flat JSON config file")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", required=True, help="output path")
        p.add_argument(
            "--stub-models",
            action="store_true",
            help="use deterministic stub providers for embeddings, summarization, and NLI",
        )

    p = sub.add_parser("ingest", help="validate a corpus file and report statistics")
    common(p)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("train", help="train the supervised bundle")
    common(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("summarize", help="summarize the posts in a corpus-format file")
    common(p, corpus_flag=False)
    p.add_argument("--post", required=True, help="corpus-format file with posts to summarize")
    p.add_argument("--bundle", default=None, help="trained bundle artifact")
    p.add_argument("--indirect", action="store_true", help="use the indirect pipeline")
    p.add_argument("--format", choices=("json", "html"), default="json")
    p.set_defaults(func=cmd_summarize)

    p = sub.add_parser("eval", help="k-fold evaluation with a lead-k baseline row")
    common(p)
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--indirect", action="store_true", help="evaluate the indirect pipeline")
    p.add_argument("--lead-k", type=int, default=3, dest="lead_k")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("ablate", help="run all five ablation variants")
    common(p)
    p.add_argument("--folds", type=int, default=10)
    p.set_defaults(func=cmd_ablate)

    p = sub.add_parser("curve", help="low-resource training curve plus the indirect constant")
    common(p)
    p.add_argument("--fractions", required=True, help="comma-separated fractions in (0,1]")
    p.set_defaults(func=cmd_curve)

    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    args._argv = argv
    try:
        return args.func(args)
    except (ConfigError, CorpusError, BundleError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (GatewayError, EmbeddingError) as exc:
        print(f"provider error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
