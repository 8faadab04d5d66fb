"""Grammar-based code tokenization toolkit.

Converts source code to and from a mixed sequence of grammar-rule tokens
and BPE subword tokens (preorder serialization of the concrete syntax
tree), builds the merged vocabulary, prepares training corpora, and
measures how the grammar representation amplifies token-level differences
between semantically divergent code pairs.
"""

from .analysis import (
    ContingencyTable,
    EDReport,
    PairRecord,
    build_contingency,
    chi_square,
    levenshtein,
    pair_distances,
    pair_report,
)
from .codec import (
    EncodeMode,
    PrefixState,
    PrefixStatus,
    PushdownMachine,
    TokenSequence,
    bpe_segment,
    decode,
    encode,
    explain,
    is_valid_prefix,
    sequence_from_ids,
)
from .corpus import (
    CorpusRecord,
    FilterReport,
    StatsReport,
    corpus_stats,
    dedup,
    export_dataset,
    load_corpus,
    prepare_corpus,
    syntax_filter,
)
from .errors import (
    DegenerateTable,
    EmptyCorpus,
    FormatError,
    GramtokError,
    IncompleteSequence,
    InvalidToken,
    MissingOutcome,
    ModeUnsupported,
    NotByteComplete,
    OutOfRange,
    ParserUnavailable,
    SyntaxInvalid,
    TreeHasErrors,
    UnknownProduction,
    VersionMismatch,
)
from .syntax import (
    LeafInfo,
    Production,
    SourceText,
    SyntaxNode,
    SyntaxTree,
    internal_productions_preorder,
    leaves_in_order,
    parse,
    validate_syntax,
)
from .vocab import (
    BaseVocab,
    MergedVocab,
    RuleVocab,
    TokenClass,
    build_rule_vocab,
    classify,
    load_base_vocab,
    load_vocab,
    merge_vocabs,
    save_vocab,
    vocab_digest,
)

__version__ = "0.1.0"
