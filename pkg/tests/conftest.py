import pytest

from gramtok import (
    BaseVocab,
    MergedVocab,
    RuleVocab,
    SourceText,
    build_rule_vocab,
    merge_vocabs,
    save_vocab,
)

from corpusgen import build_corpus

ODD_SUM = "def get(a, b):\n    return (a + b) % 2 == 1\n"


@pytest.fixture(scope="session")
def odd_sum_source() -> SourceText:
    return SourceText.from_text(ODD_SUM)


@pytest.fixture(scope="session")
def byte_base() -> BaseVocab:
    return BaseVocab.byte_identity()


@pytest.fixture(scope="session")
def corpus_files() -> list[tuple[str, bytes]]:
    return build_corpus()


@pytest.fixture(scope="session")
def corpus_sources(corpus_files) -> list[SourceText]:
    return [SourceText(data, origin=name) for name, data in corpus_files]


@pytest.fixture(scope="session")
def corpus_vocab(byte_base, corpus_sources, odd_sum_source) -> MergedVocab:
    """Merged vocab over the whole fixture corpus plus the running example."""
    rules, skipped = build_rule_vocab(corpus_sources + [odd_sum_source])
    assert skipped == 0
    return merge_vocabs(byte_base, rules)


@pytest.fixture()
def small_vocab(byte_base, odd_sum_source) -> MergedVocab:
    rules, _ = build_rule_vocab([odd_sum_source])
    return merge_vocabs(byte_base, rules)


@pytest.fixture()
def vocab_file(tmp_path, corpus_vocab):
    path = tmp_path / "vocab.json"
    save_vocab(corpus_vocab, path)
    return path
