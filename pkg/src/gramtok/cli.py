"""Command-line surface for the full pipeline.

Every command is reproducible (identical inputs and flags give
byte-identical outputs), writes data to stdout or ``--out`` and diagnostics
to stderr, and exits 0 on success, 1 on usage errors, 2 on data errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__
from .analysis import PairRecord, build_contingency, chi_square, pair_report
from .codec import EncodeMode, decode, encode, sequence_from_ids
from .corpus import (
    corpus_stats,
    export_dataset,
    load_corpus,
    prepare_corpus,
)
from .errors import FormatError, GramtokError
from .syntax import DEFAULT_LANGUAGE, SourceText
from .vocab import (
    build_rule_vocab,
    load_base_vocab,
    load_vocab,
    merge_vocabs,
    save_vocab,
)

LANGUAGE_ENV = "GRAMTOK_LANGUAGE"

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; the contract reserves 2 for data errors
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _language(args) -> str:
    return args.language or os.environ.get(LANGUAGE_ENV) or DEFAULT_LANGUAGE


def _read_input(path: str | None) -> bytes:
    if path in (None, "-"):
        return sys.stdin.buffer.read()
    with open(path, "rb") as fh:
        return fh.read()


def _write_output(path: str | None, data: bytes) -> None:
    if path in (None, "-"):
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()
    else:
        with open(path, "wb") as fh:
            fh.write(data)


def _json_bytes(obj) -> bytes:
    return (json.dumps(obj, ensure_ascii=False, indent=1) + "\n").encode("utf-8")


# --- commands ------------------------------------------------------------------

def cmd_build_vocab(args) -> int:
    base = load_base_vocab(args.base)
    records = load_corpus(args.corpus)
    rules, skipped = build_rule_vocab(
        (r.source for r in records), language=_language(args)
    )
    vocab = merge_vocabs(base, rules, language=_language(args))
    save_vocab(vocab, args.out)
    if skipped:
        print(f"skipped {skipped} unparseable file(s)", file=sys.stderr)
    _write_output(
        None,
        _json_bytes({"m": vocab.m, "s": vocab.s, "k": vocab.k, "total": vocab.total}),
    )
    return EXIT_OK


def cmd_encode(args) -> int:
    vocab = load_vocab(args.vocab)
    source = SourceText(_read_input(args.infile), origin=args.infile or "<stdin>")
    seq = encode(source, vocab, EncodeMode(args.mode))
    record_id = args.id or (Path(args.infile).name if args.infile else "<stdin>")
    payload = {"id": record_id, "mode": seq.mode.value, "ids": list(seq.ids)}
    _write_output(
        args.out,
        (json.dumps(payload, ensure_ascii=False, separators=(",", ":")) + "\n").encode(),
    )
    return EXIT_OK


def cmd_decode(args) -> int:
    vocab = load_vocab(args.vocab)
    raw = _read_input(args.infile)
    try:
        obj = json.loads(raw.decode("utf-8"))
    except (ValueError, UnicodeDecodeError) as exc:
        raise FormatError(f"input is not a sequence JSON object: {exc}") from None
    if not isinstance(obj, dict) or "ids" not in obj:
        raise FormatError("expected an object with an 'ids' array")
    seq = sequence_from_ids(obj["ids"], vocab, EncodeMode(obj.get("mode", "exact")))
    _write_output(args.out, decode(seq, vocab).data)
    return EXIT_OK


def cmd_filter_corpus(args) -> int:
    records = load_corpus(args.infile)
    kept, report = prepare_corpus(records, language=_language(args))
    lines = []
    for record in kept:
        lines.append(
            json.dumps(
                {"id": record.id, "content": record.source.decode()},
                ensure_ascii=False,
                separators=(",", ":"),
            )
        )
    _write_output(args.out, ("".join(line + "\n" for line in lines)).encode("utf-8"))
    if args.report:
        _write_output(args.report, _json_bytes(report.to_dict()))
    print(
        f"kept {report.kept_count} of {report.input_count} "
        f"({report.duplicate_count} duplicates, "
        f"{report.syntax_rejected_count} syntax-rejected)",
        file=sys.stderr,
    )
    return EXIT_OK


def cmd_export_dataset(args) -> int:
    vocab = load_vocab(args.vocab)
    records = load_corpus(args.infile)
    manifest = export_dataset(
        records, vocab, EncodeMode(args.mode), args.out_dir, shard_size=args.shard_size
    )
    _write_output(None, _json_bytes(manifest))
    return EXIT_OK


def cmd_stats(args) -> int:
    vocab = load_vocab(args.vocab)
    records = load_corpus(args.infile)
    report = corpus_stats(records, vocab)
    _write_output(args.out, _json_bytes(report.to_dict()))
    return EXIT_OK


def load_pairs_jsonl(path) -> list[PairRecord]:
    pairs = []
    with open(path, "rb") as fh:
        for lineno, raw in enumerate(fh, start=1):
            raw = raw.strip()
            if not raw:
                continue
            try:
                obj = json.loads(raw)
            except ValueError as exc:
                raise FormatError(f"{path}:{lineno}: bad JSON: {exc}") from None
            for key in ("problem_id", "wrong_code", "correct_code"):
                if key not in obj:
                    raise FormatError(f"{path}:{lineno}: missing key {key!r}")
            pairs.append(
                PairRecord(
                    problem_id=str(obj["problem_id"]),
                    error_code=SourceText.from_text(obj["wrong_code"]),
                    correct_code=SourceText.from_text(obj["correct_code"]),
                    outcome=obj.get("outcome"),
                )
            )
    return pairs


def cmd_analyze_pairs(args) -> int:
    vocab = load_vocab(args.vocab)
    base = load_base_vocab(args.base) if args.base else vocab.base
    pairs = load_pairs_jsonl(args.pairs)
    report = pair_report(pairs, vocab, base, token_ed_threshold=args.threshold)
    payload = report.to_dict()
    if args.chisq:
        table = build_contingency(pairs, vocab, base, cut=args.cut)
        statistic, p_value = chi_square(table)
        payload["chi_square"] = {
            "contingency": [list(row) for row in table.cells],
            "cut": table.cut,
            "statistic": statistic,
            "p_value": p_value,
        }
    _write_output(args.out, _json_bytes(payload))
    failures = [r for r in report.results if r.error]
    for failure in failures:
        print(f"pair {failure.problem_id}: {failure.error}", file=sys.stderr)
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(vocab_path=args.vocab)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


# --- wiring --------------------------------------------------------------------

def build_parser() -> _Parser:
    parser = _Parser(prog="gramtok", description=__doc__)
    parser.add_argument("--version", action="version", version=f"gramtok {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_text):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(fn=fn)
        p.add_argument("--language", default=None, help=f"grammar key (default: ${LANGUAGE_ENV} or {DEFAULT_LANGUAGE})")
        return p

    p = add("build-vocab", cmd_build_vocab, "build and save a merged vocabulary")
    p.add_argument("--base", required=True, help="base (subword) vocab JSON file")
    p.add_argument("--corpus", required=True, help="corpus directory or JSONL file")
    p.add_argument("--out", required=True, help="output vocab file")

    p = add("encode", cmd_encode, "encode one source file to a token sequence")
    p.add_argument("--vocab", required=True)
    p.add_argument("--mode", choices=["exact", "canonical"], default="exact")
    p.add_argument("--in", dest="infile", default=None, help="input file (default stdin)")
    p.add_argument("--out", default=None, help="output file (default stdout)")
    p.add_argument("--id", default=None, help="record id for the output object")

    p = add("decode", cmd_decode, "decode a sequence JSON object back to source bytes")
    p.add_argument("--vocab", required=True)
    p.add_argument("--in", dest="infile", default=None)
    p.add_argument("--out", default=None)

    p = add("filter-corpus", cmd_filter_corpus, "dedup + syntax-filter a corpus")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", default=None, help="filtered JSONL (default stdout)")
    p.add_argument("--report", default=None, help="write the FilterReport JSON here")

    p = add("export-dataset", cmd_export_dataset, "encode a filtered corpus into shards")
    p.add_argument("--vocab", required=True)
    p.add_argument("--mode", choices=["exact", "canonical"], default="canonical")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--shard-size", type=int, default=1000)

    p = add("stats", cmd_stats, "sequence-length and rule-coverage statistics")
    p.add_argument("--vocab", required=True)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", default=None)

    p = add("analyze-pairs", cmd_analyze_pairs, "edit-distance report over code pairs")
    p.add_argument("--pairs", required=True, help="pairs JSONL file")
    p.add_argument("--vocab", required=True)
    p.add_argument("--base", default=None, help="separate base vocab for the token side")
    p.add_argument("--threshold", type=int, default=50)
    p.add_argument("--cut", type=float, default=None)
    p.add_argument("--chisq", action="store_true")
    p.add_argument("--out", default=None)

    p = add("serve", cmd_serve, "run the HTTP service")
    p.add_argument("--vocab", required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8321)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except GramtokError as exc:
        print(f"gramtok: {exc.name}: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"gramtok: IOError: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
