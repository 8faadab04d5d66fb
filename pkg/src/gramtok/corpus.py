"""Corpus preparation: dedup, syntax filter, export, statistics.

Deduplication is exact byte equality (first occurrence wins) and the syntax
filter drops anything that does not parse cleanly; both preserve first-seen
order so exports are reproducible. Input corpora are either a directory of
``*.py`` files or a JSONL file of ``{"id": ..., "content": ...}`` objects.
"""

from __future__ import annotations

import json
import statistics
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from .codec import EncodeMode, bpe_segment, encode, node_production
from .errors import FormatError, UnknownProduction
from .syntax import SourceText, parse, validate_syntax, walk_preorder
from .vocab import MergedVocab, vocab_digest

MANIFEST_NAME = "manifest.json"
DEFAULT_SHARD_SIZE = 1000


@dataclass(frozen=True)
class CorpusRecord:
    id: str
    source: SourceText


@dataclass
class FilterReport:
    input_count: int = 0
    duplicate_count: int = 0
    syntax_rejected_count: int = 0
    kept_count: int = 0
    rejected_ids: list[str] = field(default_factory=list)

    def check(self) -> None:
        assert (
            self.input_count
            == self.duplicate_count + self.syntax_rejected_count + self.kept_count
        )

    def to_dict(self) -> dict:
        return {
            "input_count": self.input_count,
            "duplicate_count": self.duplicate_count,
            "syntax_rejected_count": self.syntax_rejected_count,
            "kept_count": self.kept_count,
            "rejected_ids": list(self.rejected_ids),
        }


# --- ingestion -----------------------------------------------------------------

def load_corpus(path) -> list[CorpusRecord]:
    """Load records from a directory of .py files or a JSONL file."""
    path = Path(path)
    if path.is_dir():
        records = []
        for file in sorted(path.rglob("*.py")):
            rel = file.relative_to(path).as_posix()
            records.append(CorpusRecord(id=rel, source=SourceText.from_file(file)))
        return records
    if path.is_file():
        return load_corpus_jsonl(path)
    raise FormatError(f"corpus path {path} is neither a directory nor a file")


def load_corpus_jsonl(path) -> list[CorpusRecord]:
    records = []
    seen: set[str] = set()
    with open(path, "rb") as fh:
        for lineno, raw in enumerate(fh, start=1):
            raw = raw.strip()
            if not raw:
                continue
            try:
                obj = json.loads(raw)
            except ValueError as exc:
                raise FormatError(f"{path}:{lineno}: bad JSON: {exc}") from None
            if not isinstance(obj, dict) or "id" not in obj or "content" not in obj:
                raise FormatError(f"{path}:{lineno}: expected {{id, content}} object")
            record_id = str(obj["id"])
            if record_id in seen:
                raise FormatError(f"{path}:{lineno}: duplicate record id {record_id!r}")
            seen.add(record_id)
            records.append(
                CorpusRecord(
                    id=record_id,
                    source=SourceText.from_text(str(obj["content"]), origin=record_id),
                )
            )
    return records


# --- filtering ------------------------------------------------------------------

def dedup(records: Iterable[CorpusRecord]) -> tuple[list[CorpusRecord], FilterReport]:
    """Drop exact byte duplicates, keeping the first occurrence."""
    seen: set[bytes] = set()
    kept: list[CorpusRecord] = []
    report = FilterReport()
    for record in records:
        report.input_count += 1
        if record.source.data in seen:
            report.duplicate_count += 1
            report.rejected_ids.append(record.id)
        else:
            seen.add(record.source.data)
            kept.append(record)
    report.kept_count = len(kept)
    report.check()
    return kept, report


def syntax_filter(
    records: Iterable[CorpusRecord], language: str = "python"
) -> tuple[list[CorpusRecord], FilterReport]:
    """Keep only records that parse without error nodes."""
    kept: list[CorpusRecord] = []
    report = FilterReport()
    for record in records:
        report.input_count += 1
        if validate_syntax(record.source, language):
            kept.append(record)
        else:
            report.syntax_rejected_count += 1
            report.rejected_ids.append(record.id)
    report.kept_count = len(kept)
    report.check()
    return kept, report


def prepare_corpus(
    records: Iterable[CorpusRecord], language: str = "python"
) -> tuple[list[CorpusRecord], FilterReport]:
    """dedup followed by syntax filter, with a combined report."""
    deduped, dedup_report = dedup(records)
    kept, syntax_report = syntax_filter(deduped, language)
    report = FilterReport(
        input_count=dedup_report.input_count,
        duplicate_count=dedup_report.duplicate_count,
        syntax_rejected_count=syntax_report.syntax_rejected_count,
        kept_count=syntax_report.kept_count,
        rejected_ids=dedup_report.rejected_ids + syntax_report.rejected_ids,
    )
    report.check()
    return kept, report


# --- export ------------------------------------------------------------------

def _sequence_line(record_id: str, mode: EncodeMode, ids) -> bytes:
    payload = {"id": record_id, "mode": EncodeMode(mode).value, "ids": list(ids)}
    return (json.dumps(payload, ensure_ascii=False, separators=(",", ":")) + "\n").encode(
        "utf-8"
    )


def export_dataset(
    records: list[CorpusRecord],
    vocab: MergedVocab,
    mode: EncodeMode,
    out_dir,
    shard_size: int = DEFAULT_SHARD_SIZE,
) -> dict:
    """Encode records into JSONL shards plus a manifest; returns the manifest.

    Inputs must already be filtered; an unknown production aborts the export
    naming the offending record.
    """
    if shard_size < 1:
        raise FormatError(f"shard size must be positive, got {shard_size}")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    shards: list[str] = []
    buffer: list[bytes] = []

    def flush():
        if not buffer:
            return
        name = f"shard-{len(shards):05d}.jsonl"
        with open(out_dir / name, "wb") as fh:
            fh.writelines(buffer)
        shards.append(name)
        buffer.clear()

    for record in records:
        try:
            seq = encode(record.source, vocab, mode)
        except UnknownProduction as exc:
            raise UnknownProduction(
                f"record {record.id!r}: {exc}",
                production=exc.production,
                record_id=record.id,
            ) from None
        buffer.append(_sequence_line(record.id, mode, seq.ids))
        if len(buffer) >= shard_size:
            flush()
    flush()

    manifest = {
        "shards": shards,
        "records": len(records),
        "mode": EncodeMode(mode).value,
        "vocab_digest": vocab_digest(vocab),
    }
    with open(out_dir / MANIFEST_NAME, "wb") as fh:
        fh.write(
            (json.dumps(manifest, ensure_ascii=False, indent=1) + "\n").encode("utf-8")
        )
    return manifest


# --- statistics -----------------------------------------------------------------

def _aggregate(values: list[int]) -> dict:
    if not values:
        return {"mean": None, "median": None, "max": None}
    return {
        "mean": statistics.fmean(values),
        "median": statistics.median(values),
        "max": max(values),
    }


@dataclass
class StatsReport:
    rows: list[dict]
    aggregates: dict
    rule_coverage: dict

    def to_dict(self) -> dict:
        return {
            "records": self.rows,
            "aggregates": self.aggregates,
            "rule_coverage": self.rule_coverage,
        }


def corpus_stats(records: list[CorpusRecord], vocab: MergedVocab) -> StatsReport:
    """Sequence-length statistics under base-only vs grammar tokenization."""
    rows = []
    seen_rules = set()
    for record in records:
        tree = parse(record.source, vocab.language)
        token_len = len(bpe_segment(record.source.data, vocab.base))
        canonical_len = len(encode(record.source, vocab, EncodeMode.CANONICAL).ids)
        exact_len = len(encode(record.source, vocab, EncodeMode.EXACT).ids)
        for node in walk_preorder(tree.root):
            if node.children:
                seen_rules.add(node_production(node))
        rows.append(
            {
                "id": record.id,
                "token_len": token_len,
                "canonical_len": canonical_len,
                "exact_len": exact_len,
                "canonical_ratio": (canonical_len / token_len) if token_len else None,
                "exact_ratio": (exact_len / token_len) if token_len else None,
            }
        )
    return StatsReport(
        rows=rows,
        aggregates={
            "token_len": _aggregate([r["token_len"] for r in rows]),
            "canonical_len": _aggregate([r["canonical_len"] for r in rows]),
            "exact_len": _aggregate([r["exact_len"] for r in rows]),
        },
        rule_coverage={
            "distinct_rules_seen": len(seen_rules),
            "vocab_rules": vocab.k,
            "fraction": (len(seen_rules) / vocab.k) if vocab.k else None,
        },
    )
