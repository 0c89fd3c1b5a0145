"""Command-line entry point.

Subcommands cover the full toolkit: lexicon compilation, phonetic
encoding, distance, phonetic matching, gate training/evaluation,
normalization, polarity, duplicate reports, end-to-end evaluation, and
micro-benchmarks.  Output is JSON lines by default (``--format tsv``
for flat tabular output); diagnostics go to stderr.  Exit codes: 0
success, 1 usage error, 2 data error.

Path defaults resolve to the bundled data files and can be overridden
by environment variables (``MICRONORM_LEXICON``, ``MICRONORM_RULES``,
``MICRONORM_EXCEPTIONS``, ``MICRONORM_MODEL``) or per-run flags; flags
win over the environment.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
import time
from concurrent.futures import ThreadPoolExecutor

from .concepts import extract_concepts
from .errors import MicronormError
from .g2p import G2PEngine, default_engine, load_exceptions, load_rules
from .lexicon import (
    PhonLexicon,
    compile_lexicon,
    duplicate_report,
    load_compiled,
    load_raw_lexicon,
    save_compiled,
)
from .match_index import top_k
from .oov_gate import (
    LR_KIND,
    NB_KIND,
    OOV,
    evaluate,
    load_labeled_corpus,
    load_model,
    load_parallel_corpus,
    save_model,
    train,
    train_test_split,
)
from .pipeline import (
    PipelineConfig,
    PipelineCounters,
    eval_polarity,
    normalize_sentence,
    sentence_polarity,
)
from .resources import MICROTEXT_SUITE, data_path, default_lexicon
from .similarity import DistanceVariant, closest_match_scan
from .soundex import soundex_concept

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on bad usage; the contract here is exit 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _env(name: str) -> str | None:
    return os.environ.get(f"MICRONORM_{name}")


def _emit(record: dict, fmt: str, header_state: dict) -> None:
    if fmt == "tsv":
        keys = sorted(record)
        if not header_state.get("done"):
            print("\t".join(keys))
            header_state["done"] = True
        print(
            "\t".join(
                json.dumps(record[k], ensure_ascii=False)
                if isinstance(record[k], (dict, list))
                else str(record[k])
                for k in keys
            )
        )
    else:
        print(json.dumps(record, ensure_ascii=False, sort_keys=True))


def _build_g2p(args) -> G2PEngine:
    exceptions_path = args.exceptions or _env("EXCEPTIONS")
    rules_path = args.rules or _env("RULES")
    if exceptions_path is None and rules_path is None:
        return default_engine()
    exceptions = load_exceptions(exceptions_path or data_path("g2p_exceptions.tsv"))
    rules = load_rules(rules_path or data_path("g2p_rules.txt"))
    return G2PEngine(exceptions, rules)


def _load_lexicon(args, g2p: G2PEngine) -> PhonLexicon:
    variant = DistanceVariant(args.variant)
    path = args.lexicon or _env("LEXICON")
    if path is None:
        return default_lexicon(variant)
    if path.endswith(".jsonl"):
        lex = load_compiled(path)
        if lex.variant is not variant:
            lex.variant = variant
        return lex
    return compile_lexicon(load_raw_lexicon(path), g2p, variant)


def _pipeline_config(args) -> PipelineConfig:
    return PipelineConfig(
        accept_distance=args.accept_distance,
        k=args.k,
        variant=DistanceVariant(args.variant),
        gate_enabled=bool(args.gate_model or _env("MODEL")),
        min_sim=args.min_sim,
        max_ngram=args.max_ngram,
    )


def _load_gate(args):
    path = args.gate_model or _env("MODEL")
    return load_model(path) if path else None


def _input_lines(args) -> list[str]:
    text = getattr(args, "text", None)
    if text is not None:
        return [text]
    return [line.rstrip("\n") for line in sys.stdin]


def _suite_rows(path) -> list[tuple[str, str]]:
    rows = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            cols = line.split("\t")
            if len(cols) != 2:
                raise MicronormError(f"{path}:{lineno}: expected sentence<TAB>label")
            rows.append((cols[0], cols[1]))
    return rows


# ------------------------------------------------------------- subcommands


def cmd_compile(args, fmt, header):
    g2p = _build_g2p(args)
    raw = load_raw_lexicon(args.input)
    lex = compile_lexicon(raw, g2p, DistanceVariant(args.variant))
    save_compiled(lex, args.output)
    _emit(
        {"compiled": args.output, "concepts": len(lex.entries), "variant": lex.variant.value},
        fmt,
        header,
    )
    return EXIT_OK


def cmd_encode(args, fmt, header):
    g2p = _build_g2p(args)
    concepts = [args.concept] if args.concept else _input_lines(args)
    for concept in concepts:
        _emit(
            {
                "concept": concept,
                "soundex": soundex_concept(concept),
                "ipa": g2p.encode_concept(concept),
            },
            fmt,
            header,
        )
    return EXIT_OK


def cmd_distance(args, fmt, header):
    from .similarity import dice_distance

    d = dice_distance(args.a, args.b, DistanceVariant(args.variant))
    _emit({"a": args.a, "b": args.b, "distance": round(d, 3)}, fmt, header)
    return EXIT_OK


def cmd_match(args, fmt, header):
    g2p = _build_g2p(args)
    lex = _load_lexicon(args, g2p)
    query = g2p.encode_concept(args.query)
    matches = top_k(lex.match_index, query, k=args.k, min_sim=args.min_sim)
    _emit(
        {
            "query": args.query,
            "ipa": query,
            "matches": [
                {"concept": m.concept, "distance": round(m.distance, 6)} for m in matches
            ],
        },
        fmt,
        header,
    )
    return EXIT_OK


def cmd_gate_train(args, fmt, header):
    loader = load_parallel_corpus if args.parallel else load_labeled_corpus
    records = loader(args.corpus)
    train_records, test_records = train_test_split(records, args.test_frac, seed=args.seed)
    model = train(train_records, kind=args.kind, seed=args.seed)
    save_model(model, args.output)
    report = evaluate(model, test_records) if test_records else None
    out = {
        "model": args.output,
        "kind": model.kind,
        "train_records": len(train_records),
        "test_records": len(test_records),
    }
    if report is not None:
        out["held_out_accuracy"] = round(report.accuracy, 6)
    _emit(out, fmt, header)
    return EXIT_OK


def cmd_gate_eval(args, fmt, header):
    model = load_model(args.model)
    loader = load_parallel_corpus if args.parallel else load_labeled_corpus
    records = loader(args.corpus)
    if args.test_frac > 0:
        _, records = train_test_split(records, args.test_frac, seed=args.seed)
    report = evaluate(model, records)
    _emit({"kind": model.kind, "records": len(records), **report.as_dict()}, fmt, header)
    return EXIT_OK


def cmd_normalize(args, fmt, header):
    g2p = _build_g2p(args)
    lex = _load_lexicon(args, g2p)
    cfg = _pipeline_config(args)
    for line in _input_lines(args):
        _emit(
            {"input": line, "output": normalize_sentence(line, lex, lex.match_index, g2p, cfg)},
            fmt,
            header,
        )
    return EXIT_OK


def cmd_polarity(args, fmt, header):
    g2p = _build_g2p(args)
    lex = _load_lexicon(args, g2p)
    cfg = _pipeline_config(args)
    model = _load_gate(args)
    for line in _input_lines(args):
        result = sentence_polarity(line, lex, lex.match_index, g2p, cfg, model=model)
        _emit(
            {
                "text": line,
                "label": result.label,
                "score": round(result.score, 6),
                "gated_as": result.gated_as,
                "concepts": [
                    {
                        "original": o.original,
                        "matched": o.matched,
                        "distance": None if o.distance is None else round(o.distance, 6),
                        "accepted": o.accepted,
                    }
                    for o in result.trace
                ],
            },
            fmt,
            header,
        )
    return EXIT_OK


def cmd_report_duplicates(args, fmt, header):
    g2p = _build_g2p(args)
    lex = _load_lexicon(args, g2p)
    schemes = ["soundex", "ipa"] if args.scheme == "both" else [args.scheme]
    for scheme in schemes:
        report = duplicate_report(lex, scheme, top_n=args.top)
        _emit(
            {
                "scheme": report.scheme,
                "num_concepts": report.num_concepts,
                "num_distinct_codes": report.num_distinct_codes,
                "num_duplicated_concepts": report.num_duplicated_concepts,
                "top_collisions": [
                    {"code": code, "concepts": members}
                    for code, members in report.top_collisions
                ],
            },
            fmt,
            header,
        )
    return EXIT_OK


def cmd_eval(args, fmt, header):
    g2p = _build_g2p(args)
    lex = _load_lexicon(args, g2p)
    cfg = _pipeline_config(args)
    model = _load_gate(args)
    rows = _suite_rows(args.suite or data_path(MICROTEXT_SUITE))
    if args.threads > 1:
        # Scoring is read-only over shared immutable state; order preserved.
        def one(row):
            text, gold = row
            return eval_polarity([(text, gold)], lex, lex.match_index, g2p, cfg, model=model)

        with ThreadPoolExecutor(max_workers=args.threads) as pool:
            partials = list(pool.map(one, rows))
        report = {
            "accuracy_before": sum(p["accuracy_before"] for p in partials) / len(partials),
            "accuracy_after": sum(p["accuracy_after"] for p in partials) / len(partials),
            "rows": [r for p in partials for r in p["rows"]],
        }
        report["delta"] = report["accuracy_after"] - report["accuracy_before"]
    else:
        report = eval_polarity(rows, lex, lex.match_index, g2p, cfg, model=model)
    report["seed"] = args.seed
    report["config"] = {
        "accept_distance": cfg.accept_distance,
        "k": cfg.k,
        "variant": cfg.variant.value,
        "min_sim": cfg.min_sim,
        "gate_enabled": cfg.gate_enabled,
    }
    print(json.dumps(report, ensure_ascii=False, sort_keys=True))
    return EXIT_OK


def cmd_bench(args, fmt, header):
    g2p = _build_g2p(args)
    lex = _load_lexicon(args, g2p)
    cfg = _pipeline_config(args)
    idx = lex.match_index
    rng = random.Random(args.seed)

    queries = [rng.choice(lex.entries).ipa for _ in range(args.queries)]
    t0 = time.perf_counter()
    for q in queries:
        closest_match_scan(q, lex, k=cfg.k)
    scan_s = time.perf_counter() - t0
    t0 = time.perf_counter()
    for q in queries:
        top_k(idx, q, k=cfg.k, min_sim=cfg.min_sim)
    index_s = time.perf_counter() - t0

    out = {
        "queries": args.queries,
        "scan_ms_per_query": round(1000.0 * scan_s / args.queries, 4),
        "index_ms_per_query": round(1000.0 * index_s / args.queries, 4),
        "speedup": round(scan_s / index_s, 2) if index_s > 0 else None,
    }

    corpus_path = args.corpus or data_path("gate_corpus.tsv")
    model = _load_gate(args)
    if model is not None:
        records = load_labeled_corpus(corpus_path)
        ungated_cfg = PipelineConfig(
            accept_distance=cfg.accept_distance,
            k=cfg.k,
            variant=cfg.variant,
            gate_enabled=False,
            min_sim=cfg.min_sim,
            max_ngram=cfg.max_ngram,
        )
        ungated = PipelineCounters()
        gated = PipelineCounters()
        mismatches = 0
        for text, _ in records:
            plain = sentence_polarity(
                text, lex, idx, g2p, ungated_cfg, counters=ungated
            )
            routed = sentence_polarity(
                text, lex, idx, g2p, cfg, model=model, counters=gated
            )
            if routed.gated_as == OOV and routed.label != plain.label:
                mismatches += 1
        reduction = (
            1.0 - gated.phonetic_searches / ungated.phonetic_searches
            if ungated.phonetic_searches
            else 0.0
        )
        out.update(
            {
                "sentences": len(records),
                "ungated_searches": ungated.phonetic_searches,
                "gated_searches": gated.phonetic_searches,
                "search_reduction": round(reduction, 4),
                "oov_label_mismatches": mismatches,
            }
        )
    _emit(out, fmt, header)
    return EXIT_OK


# ------------------------------------------------------------------ parser


def _add_common(sub):
    sub.add_argument("--format", choices=("json", "tsv"), default="json")
    sub.add_argument("--seed", type=int, default=42)
    sub.add_argument("--lexicon", help="raw .tsv or compiled .jsonl lexicon path")
    sub.add_argument("--exceptions", help="G2P exception dictionary path")
    sub.add_argument("--rules", help="G2P rewrite rules path")
    sub.add_argument("--variant", choices=("charset", "bigram"), default="charset")
    sub.add_argument("--accept-distance", type=float, default=0.45, dest="accept_distance")
    sub.add_argument("--k", type=int, default=5)
    sub.add_argument("--min-sim", type=float, default=0.5, dest="min_sim")
    sub.add_argument("--max-ngram", type=int, default=4, dest="max_ngram")
    sub.add_argument("--gate-model", dest="gate_model", help="trained gate model path")
    sub.add_argument("--threads", type=int, default=1)


def build_parser() -> _Parser:
    parser = _Parser(prog="micronorm", description=__doc__)
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("compile", help="compile a raw lexicon to JSONL")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_compile)

    p = subs.add_parser("encode", help="Soundex + IPA encodings of concepts")
    p.add_argument("--concept", help="single concept; otherwise stream stdin")
    _add_common(p)
    p.set_defaults(func=cmd_encode)

    p = subs.add_parser("distance", help="Dice distance between two strings")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_distance)

    p = subs.add_parser("match", help="phonetic top-k search for one concept")
    p.add_argument("--query", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_match)

    p = subs.add_parser("gate-train", help="train the OOV/IV gate classifier")
    p.add_argument("--corpus", required=True)
    p.add_argument("--parallel", action="store_true", help="raw<TAB>normalized input")
    p.add_argument("--kind", choices=(NB_KIND, LR_KIND), default=LR_KIND)
    p.add_argument("--output", required=True)
    p.add_argument("--test-frac", type=float, default=0.2, dest="test_frac")
    _add_common(p)
    p.set_defaults(func=cmd_gate_train)

    p = subs.add_parser("gate-eval", help="evaluate a trained gate model")
    p.add_argument("--model", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--parallel", action="store_true")
    p.add_argument(
        "--test-frac",
        type=float,
        default=0.0,
        dest="test_frac",
        help="evaluate only the seeded held-out fraction",
    )
    _add_common(p)
    p.set_defaults(func=cmd_gate_eval)

    p = subs.add_parser("normalize", help="rewrite microtext spans (stdin streaming)")
    p.add_argument("--text", help="single sentence; otherwise stream stdin")
    _add_common(p)
    p.set_defaults(func=cmd_normalize)

    p = subs.add_parser("polarity", help="sentence polarity with trace (stdin streaming)")
    p.add_argument("--text", help="single sentence; otherwise stream stdin")
    _add_common(p)
    p.set_defaults(func=cmd_polarity)

    p = subs.add_parser("report-duplicates", help="encoding collision statistics")
    p.add_argument("--scheme", choices=("soundex", "ipa", "both"), default="both")
    p.add_argument("--top", type=int, default=10)
    _add_common(p)
    p.set_defaults(func=cmd_report_duplicates)

    p = subs.add_parser("eval", help="before/after polarity evaluation report")
    p.add_argument("--suite", help="sentence<TAB>gold TSV; default: bundled suite")
    _add_common(p)
    p.set_defaults(func=cmd_eval)

    p = subs.add_parser("bench", help="scan-vs-index latency and gating effect")
    p.add_argument("--queries", type=int, default=200)
    p.add_argument("--corpus", help="labeled corpus for the gating benchmark")
    _add_common(p)
    p.set_defaults(func=cmd_bench)

    return parser


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    header: dict = {}
    try:
        return args.func(args, args.format, header)
    except MicronormError as exc:
        print(f"micronorm: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"micronorm: {exc}", file=sys.stderr)
        return EXIT_DATA
    except BrokenPipeError:
        return EXIT_OK


def main() -> None:
    raise SystemExit(run())


if __name__ == "__main__":
    main()
