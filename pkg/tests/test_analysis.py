import functools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats as scipy_stats

from gramtok import (
    ContingencyTable,
    DegenerateTable,
    MissingOutcome,
    PairRecord,
    SourceText,
    SyntaxInvalid,
    build_contingency,
    build_rule_vocab,
    chi_square,
    levenshtein,
    merge_vocabs,
    pair_distances,
    pair_report,
)
from pairsuite import PRECEDENCE_PAIR, MICRO_SUITE


def lev_oracle(a, b):
    """Exponential recursive definition, memoized; independent of the DP."""
    a, b = tuple(a), tuple(b)

    @functools.lru_cache(maxsize=None)
    def rec(i, j):
        if i == 0:
            return j
        if j == 0:
            return i
        cost = 0 if a[i - 1] == b[j - 1] else 1
        return min(rec(i - 1, j) + 1, rec(i, j - 1) + 1, rec(i - 1, j - 1) + cost)

    return rec(len(a), len(b))


def chi_oracle(a, b, c, d):
    """Sum of (observed - expected)^2 / expected over the four cells."""
    n = a + b + c + d
    marginals = ((a + b, a + c), (a + b, b + d), (c + d, a + c), (c + d, b + d))
    stat = 0.0
    for observed, (row, col) in zip((a, b, c, d), marginals):
        expected = row * col / n
        stat += (observed - expected) ** 2 / expected
    return stat, float(scipy_stats.chi2.sf(stat, 1))


def make_pair(label, wrong, correct, outcome=None):
    return PairRecord(
        problem_id=label,
        error_code=SourceText.from_text(wrong),
        correct_code=SourceText.from_text(correct),
        outcome=outcome,
    )


@pytest.fixture(scope="module")
def suite_vocab(byte_base):
    sources = []
    for _, wrong, correct in MICRO_SUITE:
        sources += [SourceText.from_text(wrong), SourceText.from_text(correct)]
    rules, _ = build_rule_vocab(sources)
    return merge_vocabs(byte_base, rules)


class TestLevenshtein:
    def test_identity(self):
        assert levenshtein([1, 2, 3], [1, 2, 3]) == 0

    def test_kitten_sitting(self):
        # classic fixture, value confirmed by the recursive oracle
        assert levenshtein(list(b"kitten"), list(b"sitting")) == 3
        assert lev_oracle(list(b"kitten"), list(b"sitting")) == 3

    def test_pure_insertion(self):
        assert levenshtein([], [7] * 9) == 9
        assert levenshtein([7] * 9, []) == 9

    def test_matches_recursive_oracle_exhaustive_small(self):
        alphabet = (0, 1, 2)
        sequences = [()]
        frontier = [()]
        for _ in range(4):
            frontier = [s + (a,) for s in frontier for a in alphabet]
            sequences.extend(frontier)
        rng = random.Random(7)
        picked = rng.sample(sequences, 40)
        for a in picked:
            for b in picked:
                assert levenshtein(a, b) == lev_oracle(a, b)

    @given(
        st.lists(st.integers(0, 2), max_size=12),
        st.lists(st.integers(0, 2), max_size=12),
        st.lists(st.integers(0, 2), max_size=12),
    )
    @settings(max_examples=150, deadline=None)
    def test_metric_laws(self, a, b, c):
        dab = levenshtein(a, b)
        assert dab >= 0
        assert (dab == 0) == (a == b)
        assert dab == levenshtein(b, a)
        assert dab <= levenshtein(a, c) + levenshtein(c, b)


class TestPairDistances:
    def test_identical_pair(self, byte_base):
        pair = make_pair("same", "x = 1\n", "x = 1\n")
        rules, _ = build_rule_vocab([SourceText.from_text("x = 1\n")])
        vocab = merge_vocabs(byte_base, rules)
        assert pair_distances(pair, vocab, byte_base) == (0, 0)

    def test_precedence_amplification(self, suite_vocab, byte_base):
        label, wrong, correct = PRECEDENCE_PAIR
        token_ed, grammar_ed = pair_distances(
            make_pair(label, wrong, correct), suite_vocab, byte_base
        )
        assert token_ed == 2  # the inserted '(' and ')'
        assert grammar_ed > token_ed
        assert grammar_ed >= 2 * token_ed

    def test_single_identifier_change_matches_byte_oracle(self, byte_base):
        wrong, correct = "total = alpha\n", "total = aleha\n"
        sources = [SourceText.from_text(wrong), SourceText.from_text(correct)]
        rules, _ = build_rule_vocab(sources)
        vocab = merge_vocabs(byte_base, rules)
        token_ed, grammar_ed = pair_distances(
            make_pair("ident", wrong, correct), vocab, byte_base
        )
        assert token_ed == lev_oracle(wrong.encode(), correct.encode()) == 1
        assert grammar_ed >= 1

    def test_unparseable_raises(self, suite_vocab, byte_base):
        pair = make_pair("bad", "def f(:", "def f():\n    pass\n")
        with pytest.raises(SyntaxInvalid):
            pair_distances(pair, suite_vocab, byte_base)


class TestPairReport:
    def test_identical_pairs_null_amplification(self, byte_base):
        rules, _ = build_rule_vocab([SourceText.from_text("x = 1\n")])
        vocab = merge_vocabs(byte_base, rules)
        pairs = [make_pair(f"p{i}", "x = 1\n", "x = 1\n") for i in range(3)]
        report = pair_report(pairs, vocab, byte_base)
        assert report.mean_token_ed == 0
        assert report.amplification is None
        assert report.coverage == 1.0

    def test_single_precedence_pair(self, suite_vocab, byte_base):
        label, wrong, correct = PRECEDENCE_PAIR
        report = pair_report([make_pair(label, wrong, correct)], suite_vocab, byte_base, 50)
        assert report.coverage == 1.0
        assert report.amplification > 1.0

    def test_aggregates_match_recount(self, suite_vocab, byte_base):
        pairs = [make_pair(l, w, c) for l, w, c in MICRO_SUITE]
        threshold = 50
        report = pair_report(pairs, suite_vocab, byte_base, threshold)
        # independent recount, spreadsheet style
        distances = [pair_distances(p, suite_vocab, byte_base) for p in pairs]
        kept = [(t, g) for t, g in distances if t < threshold]
        assert report.restricted_count == len(kept)
        assert report.mean_token_ed == pytest.approx(sum(t for t, _ in kept) / len(kept))
        assert report.mean_grammar_ed == pytest.approx(sum(g for _, g in kept) / len(kept))
        assert report.amplification == pytest.approx(
            sum(g for _, g in kept) / sum(t for t, _ in kept)
        )
        hist_total = sum(bucket["count"] for bucket in report.histogram)
        assert hist_total == len(kept)

    def test_conservation(self, suite_vocab, byte_base):
        pairs = [make_pair(l, w, c) for l, w, c in MICRO_SUITE]
        pairs.append(make_pair("broken", "def f(:", "def f(): pass\n"))
        same = MICRO_SUITE[0][2]
        pairs.append(make_pair("same", same, same))
        report = pair_report(pairs, suite_vocab, byte_base, threshold := 3)
        assert report.unparseable == 1
        assert report.excluded_by_threshold > 0  # threshold 3 cuts real pairs
        assert (
            report.restricted_count
            + report.excluded_by_threshold
            + report.unparseable
            == report.total_pairs
            == len(pairs)
        )
        assert report.threshold == threshold

    def test_histogram_buckets_fixed(self, suite_vocab, byte_base):
        report = pair_report([], suite_vocab, byte_base, 50)
        assert [(b["lo"], b["hi"]) for b in report.histogram] == [
            (0, 4), (5, 9), (10, 14), (15, 19), (20, 24),
            (25, 29), (30, 34), (35, 39), (40, 44), (45, 49),
        ]
        assert report.grammar_histogram[-1] == {"lo": 50, "hi": None, "count": 0}


class TestChiSquare:
    def test_proportional_rows(self):
        statistic, p_value = chi_square(ContingencyTable(cells=((6, 4), (6, 4))))
        assert statistic == 0
        assert p_value == 1

    def test_frozen_fixture(self):
        # oracle value computed from the (O-E)^2/E formula before the build
        statistic, p_value = chi_square(ContingencyTable(cells=((20, 10), (10, 20))))
        assert statistic == pytest.approx(6.666666666666667, abs=1e-9)
        assert p_value == pytest.approx(0.009823274507519235, abs=1e-9)

    def test_degenerate_zero_marginal(self):
        with pytest.raises(DegenerateTable):
            chi_square(ContingencyTable(cells=((0, 0), (1, 1))))

    def test_zero_total_rejected(self):
        with pytest.raises(DegenerateTable):
            ContingencyTable(cells=((0, 0), (0, 0)))

    def test_negative_cell_rejected(self):
        with pytest.raises(DegenerateTable):
            ContingencyTable(cells=((-1, 2), (3, 4)))

    def test_matches_oracle_on_random_tables(self):
        rng = random.Random(4242)
        checked = 0
        while checked < 25:
            a, b, c, d = (rng.randint(1, 80) for _ in range(4))
            statistic, p_value = chi_square(ContingencyTable(cells=((a, b), (c, d))))
            oracle_stat, oracle_p = chi_oracle(a, b, c, d)
            assert statistic == pytest.approx(oracle_stat, abs=1e-9)
            assert p_value == pytest.approx(oracle_p, abs=1e-9)
            checked += 1

    def test_invariant_under_row_and_column_swap(self):
        base_cells = ((13, 5), (7, 21))
        stat, _ = chi_square(ContingencyTable(cells=base_cells))
        swapped_rows = (base_cells[1], base_cells[0])
        swapped_cols = tuple((row[1], row[0]) for row in base_cells)
        assert chi_square(ContingencyTable(cells=swapped_rows))[0] == pytest.approx(stat)
        assert chi_square(ContingencyTable(cells=swapped_cols))[0] == pytest.approx(stat)


class TestBuildContingency:
    def test_constructed_counts(self, byte_base):
        # two high-amplification pairs with outcome True, two identical
        # pairs (amplification 0) with outcome False -> diagonal table
        label, wrong, correct = PRECEDENCE_PAIR
        pairs = [
            make_pair("hi1", wrong, correct, outcome=True),
            make_pair("hi2", wrong.replace("f(", "ff("), correct.replace("f(", "ff("), outcome=True),
            make_pair("lo1", "x = 1\n", "x = 1\n", outcome=False),
            make_pair("lo2", "y = 2\n", "y = 2\n", outcome=False),
        ]
        sources = [p.error_code for p in pairs] + [p.correct_code for p in pairs]
        rules, _ = build_rule_vocab(sources)
        vocab = merge_vocabs(byte_base, rules)
        table = build_contingency(pairs, vocab, byte_base, cut=None)
        assert table.cells == ((2, 0), (0, 2))

    def test_missing_outcome(self, suite_vocab, byte_base):
        pairs = [make_pair(l, w, c, outcome=True) for l, w, c in MICRO_SUITE]
        pairs[3] = make_pair("nooutcome", MICRO_SUITE[3][1], MICRO_SUITE[3][2])
        with pytest.raises(MissingOutcome):
            build_contingency(pairs, suite_vocab, byte_base)

    def test_one_sided_outcomes_degenerate_downstream(self, suite_vocab, byte_base):
        pairs = [make_pair(l, w, c, outcome=True) for l, w, c in MICRO_SUITE]
        table = build_contingency(pairs, suite_vocab, byte_base)
        with pytest.raises(DegenerateTable):
            chi_square(table)

    def test_manual_tabulation(self, suite_vocab, byte_base):
        rng = random.Random(99)
        pairs = [
            make_pair(l, w, c, outcome=rng.random() < 0.5) for l, w, c in MICRO_SUITE
        ]
        table = build_contingency(pairs, suite_vocab, byte_base)
        amplifications = []
        outcomes = []
        for pair in pairs:
            t, g = pair_distances(pair, suite_vocab, byte_base)
            amplifications.append(g - t)
            outcomes.append(pair.outcome)
        ordered = sorted(amplifications)
        mid = len(ordered) // 2
        cut = ordered[mid] if len(ordered) % 2 else (ordered[mid - 1] + ordered[mid]) / 2
        expected = [[0, 0], [0, 0]]
        for amp, outcome in zip(amplifications, outcomes):
            row = 0 if amp > cut else 1
            col = 0 if outcome else 1
            expected[row][col] += 1
        assert [list(r) for r in table.cells] == expected
        assert table.cut == pytest.approx(cut)

    def test_too_few_pairs(self, suite_vocab, byte_base):
        pairs = [make_pair("only", "x = 1\n", "x = 2\n", outcome=True)]
        with pytest.raises(DegenerateTable):
            build_contingency(pairs, suite_vocab, byte_base)
