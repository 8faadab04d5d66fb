"""Edit-distance analysis of error/correct code pairs.

For each pair the token-level distance is computed over plain BPE
segmentation of the raw bytes (base vocab only, no grammar tokens) and the
grammar-level distance over canonical-mode encodings, so whitespace-only
differences never inflate the grammar side. The report aggregates pairs
below a token-distance threshold and quantifies how much the grammar
representation amplifies small token-level differences; an optional 2x2
chi-square test relates that amplification to an external per-pair outcome.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass, field

from .codec import EncodeMode, bpe_segment, encode
from .errors import DegenerateTable, MissingOutcome, SyntaxInvalid, UnknownProduction
from .syntax import SourceText, validate_syntax
from .vocab import BaseVocab, MergedVocab

HISTOGRAM_BUCKET_WIDTH = 5
DEFAULT_THRESHOLD = 50


@dataclass(frozen=True)
class PairRecord:
    problem_id: str
    error_code: SourceText
    correct_code: SourceText
    outcome: bool | None = None


def levenshtein(a, b) -> int:
    """Minimal insertions/deletions/substitutions turning ``a`` into ``b``.

    Dynamic programming over two rows: O(|a|*|b|) time, O(min(|a|,|b|))
    memory.
    """
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    previous = list(range(len(b) + 1))
    for i, item_a in enumerate(a):
        current = [i + 1]
        for j, item_b in enumerate(b):
            cost = 0 if item_a == item_b else 1
            current.append(
                min(previous[j + 1] + 1, current[j] + 1, previous[j] + cost)
            )
        previous = current
    return previous[-1]


def pair_distances(
    pair: PairRecord, vocab: MergedVocab, base: BaseVocab
) -> tuple[int, int]:
    """(token_ed, grammar_ed) for one pair.

    ``base`` drives the token-level side and may differ from ``vocab.base``
    (mirroring analyses where the two representations come from different
    models).
    """
    for label, source in (("error", pair.error_code), ("correct", pair.correct_code)):
        if not validate_syntax(source, vocab.language):
            raise SyntaxInvalid(f"{label} code of pair {pair.problem_id!r} does not parse")
    token_ed = levenshtein(
        bpe_segment(pair.error_code.data, base),
        bpe_segment(pair.correct_code.data, base),
    )
    grammar_ed = levenshtein(
        encode(pair.error_code, vocab, EncodeMode.CANONICAL).ids,
        encode(pair.correct_code, vocab, EncodeMode.CANONICAL).ids,
    )
    return token_ed, grammar_ed


@dataclass
class PairResult:
    problem_id: str
    token_ed: int | None = None
    grammar_ed: int | None = None
    byte_ed: int | None = None
    outcome: bool | None = None
    included: bool = False
    error: str | None = None


def _histogram(values, threshold: int, overflow: bool) -> list[dict]:
    buckets = []
    for lo in range(0, threshold, HISTOGRAM_BUCKET_WIDTH):
        hi = lo + HISTOGRAM_BUCKET_WIDTH - 1
        buckets.append(
            {"lo": lo, "hi": hi, "count": sum(1 for v in values if lo <= v <= hi)}
        )
    if overflow:
        buckets.append(
            {"lo": threshold, "hi": None, "count": sum(1 for v in values if v >= threshold)}
        )
    return buckets


@dataclass
class EDReport:
    threshold: int
    results: list[PairResult]
    total_pairs: int
    parseable: int
    unparseable: int
    restricted_count: int
    excluded_by_threshold: int
    coverage: float | None
    mean_token_ed: float | None
    mean_grammar_ed: float | None
    amplification: float | None
    histogram: list[dict] = field(default_factory=list)
    grammar_histogram: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "threshold": self.threshold,
            "total_pairs": self.total_pairs,
            "parseable": self.parseable,
            "unparseable": self.unparseable,
            "restricted_count": self.restricted_count,
            "excluded_by_threshold": self.excluded_by_threshold,
            "coverage": self.coverage,
            "mean_token_ed": self.mean_token_ed,
            "mean_grammar_ed": self.mean_grammar_ed,
            "amplification": self.amplification,
            "histogram": self.histogram,
            "grammar_histogram": self.grammar_histogram,
            "pairs": [
                {
                    "problem_id": r.problem_id,
                    "token_ed": r.token_ed,
                    "grammar_ed": r.grammar_ed,
                    "byte_ed": r.byte_ed,
                    "outcome": r.outcome,
                    "included": r.included,
                    "error": r.error,
                }
                for r in self.results
            ],
        }


def pair_report(
    pairs: list[PairRecord],
    vocab: MergedVocab,
    base: BaseVocab,
    token_ed_threshold: int = DEFAULT_THRESHOLD,
) -> EDReport:
    """Distances for every parseable pair, aggregated below the threshold.

    Per-pair failures (parse errors, productions missing from the vocab)
    are recorded in the report, never raised, and counted in the
    ``unparseable`` bucket. Conservation: restricted +
    excluded_by_threshold + unparseable == total_pairs.
    """
    results: list[PairResult] = []
    for pair in pairs:
        result = PairResult(problem_id=pair.problem_id, outcome=pair.outcome)
        try:
            token_ed, grammar_ed = pair_distances(pair, vocab, base)
        except (SyntaxInvalid, UnknownProduction) as exc:
            result.error = f"{exc.name}: {exc}"
        else:
            result.token_ed = token_ed
            result.grammar_ed = grammar_ed
            # byte-level distance reported alongside for comparability
            result.byte_ed = levenshtein(pair.error_code.data, pair.correct_code.data)
            result.included = token_ed < token_ed_threshold
        results.append(result)

    scored = [r for r in results if r.error is None]
    restricted = [r for r in scored if r.included]
    mean_token = mean_grammar = amplification = None
    if restricted:
        mean_token = statistics.fmean(r.token_ed for r in restricted)
        mean_grammar = statistics.fmean(r.grammar_ed for r in restricted)
        if mean_token > 0:
            amplification = mean_grammar / mean_token
    return EDReport(
        threshold=token_ed_threshold,
        results=results,
        total_pairs=len(results),
        parseable=len(scored),
        unparseable=len(results) - len(scored),
        restricted_count=len(restricted),
        excluded_by_threshold=len(scored) - len(restricted),
        coverage=(len(restricted) / len(scored)) if scored else None,
        mean_token_ed=mean_token,
        mean_grammar_ed=mean_grammar,
        amplification=amplification,
        histogram=_histogram(
            [r.token_ed for r in restricted], token_ed_threshold, overflow=False
        ),
        grammar_histogram=_histogram(
            [r.grammar_ed for r in restricted], token_ed_threshold, overflow=True
        ),
    )


@dataclass(frozen=True)
class ContingencyTable:
    """2x2 counts: rows = amplification above/at-or-below the cut, columns =
    outcome true/false."""

    cells: tuple[tuple[int, int], tuple[int, int]]
    cut: float | None = field(default=None, compare=False)

    def __post_init__(self):
        flat = [c for row in self.cells for c in row]
        if len(self.cells) != 2 or any(len(row) != 2 for row in self.cells):
            raise DegenerateTable("table must be 2x2")
        if any(not isinstance(c, int) or c < 0 for c in flat):
            raise DegenerateTable("cells must be non-negative integers")
        if sum(flat) == 0:
            raise DegenerateTable("grand total is zero")

    @property
    def total(self) -> int:
        return sum(c for row in self.cells for c in row)


def chi_square(table: ContingencyTable) -> tuple[float, float]:
    """Pearson chi-square on a 2x2 table, no continuity correction, 1 dof.

    The p-value is the chi-square(1) survival function, which reduces in
    closed form to erfc(sqrt(statistic / 2)).
    """
    (a, b), (c, d) = table.cells
    row1, row2 = a + b, c + d
    col1, col2 = a + c, b + d
    if 0 in (row1, row2, col1, col2):
        raise DegenerateTable("zero marginal; expected counts undefined")
    n = table.total
    statistic = n * (a * d - b * c) ** 2 / (row1 * row2 * col1 * col2)
    p_value = math.erfc(math.sqrt(statistic / 2.0))
    return statistic, p_value


def build_contingency(
    pairs: list[PairRecord],
    vocab: MergedVocab,
    base: BaseVocab,
    cut: float | None = None,
) -> ContingencyTable:
    """Tabulate amplification (grammar_ed - token_ed) against pair outcomes.

    ``cut`` defaults to the dataset median of the amplification values;
    rows split above vs at-or-below the cut. Unparseable pairs are skipped;
    at least 4 scorable pairs are required.
    """
    amplifications: list[float] = []
    outcomes: list[bool] = []
    for pair in pairs:
        try:
            token_ed, grammar_ed = pair_distances(pair, vocab, base)
        except (SyntaxInvalid, UnknownProduction):
            continue
        if pair.outcome is None:
            raise MissingOutcome(f"pair {pair.problem_id!r} has no outcome")
        amplifications.append(grammar_ed - token_ed)
        outcomes.append(bool(pair.outcome))
    if len(amplifications) < 4:
        raise DegenerateTable(
            f"need at least 4 scorable pairs, have {len(amplifications)}"
        )
    if cut is None:
        cut = statistics.median(amplifications)
    a = b = c = d = 0
    for amp, outcome in zip(amplifications, outcomes):
        if amp > cut:
            if outcome:
                a += 1
            else:
                b += 1
        elif outcome:
            c += 1
        else:
            d += 1
    return ContingencyTable(cells=((a, b), (c, d)), cut=float(cut))
