"""Merged vocabulary: base subword tokens + sentinels + grammar rules.

ID layout is a fixed range partition::

    [0, m)            base subword tokens (BPE symbols, byte strings)
    [m, m+2)          sentinels END_OF_LEAF, GAP
    [m+2, m+2+k)      grammar rules, in canonical order

The two sentinels sit outside the plain ``base + rules`` accounting: a
decoder cannot delimit adjacent subword runs, or tell layout bytes from leaf
bytes, without explicit boundary markers.

Vocab files are UTF-8 JSON with a fixed key order and a fixed serialization
style, so equal vocabularies produce byte-identical files. Token byte
strings are escaped with the convention in :func:`escape_bytes`.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from enum import Enum
from typing import Iterable

from .errors import (
    EmptyCorpus,
    FormatError,
    NotByteComplete,
    OutOfRange,
    VersionMismatch,
)
from .syntax import (
    DEFAULT_LANGUAGE,
    Production,
    SourceText,
    internal_productions_preorder,
    parse,
)

FORMAT_VERSION = 1
SENTINEL_NAMES = ("END_OF_LEAF", "GAP")


class TokenClass(str, Enum):
    TERMINAL = "terminal"
    SENTINEL = "sentinel"
    RULE = "rule"


# --- byte-string escaping ---------------------------------------------------

def escape_bytes(data: bytes) -> str:
    """Escape a token byte string for JSON.

    Valid UTF-8 runs stay readable text (with backslash doubled); every byte
    that is not part of a valid UTF-8 sequence becomes ``\\xNN``. The mapping
    is bijective: :func:`unescape_bytes` inverts it exactly.
    """
    out = []
    i = 0
    while i < len(data):
        ch = None
        for width in (1, 2, 3, 4):
            chunk = data[i : i + width]
            try:
                decoded = chunk.decode("utf-8")
            except UnicodeDecodeError:
                continue
            ch = decoded
            i += width
            break
        if ch is None:
            out.append(f"\\x{data[i]:02x}")
            i += 1
        elif ch == "\\":
            out.append("\\\\")
        else:
            out.append(ch)
    return "".join(out)


def unescape_bytes(text: str) -> bytes:
    out = bytearray()
    i = 0
    while i < len(text):
        ch = text[i]
        if ch != "\\":
            out.extend(ch.encode("utf-8"))
            i += 1
            continue
        if i + 1 < len(text) and text[i + 1] == "\\":
            out.append(0x5C)
            i += 2
        elif i + 3 < len(text) and text[i + 1] == "x":
            out.append(int(text[i + 2 : i + 4], 16))
            i += 4
        else:
            raise FormatError(f"bad escape at offset {i} in token {text!r}")
    return bytes(out)


# --- base vocabulary ----------------------------------------------------------

@dataclass(frozen=True)
class BaseVocab:
    """Ordered subword tokens (IDs are list positions) plus ranked merges."""

    tokens: tuple[bytes, ...]
    merges: tuple[tuple[bytes, bytes], ...]

    @property
    def m(self) -> int:
        return len(self.tokens)

    def __post_init__(self):
        object.__setattr__(
            self, "_id_of", {tok: i for i, tok in enumerate(self.tokens)}
        )
        object.__setattr__(
            self, "_rank", {pair: r for r, pair in enumerate(self.merges)}
        )

    def id_of(self, symbol: bytes) -> int:
        try:
            return self._id_of[symbol]
        except KeyError:
            raise OutOfRange(f"symbol {symbol!r} not in base vocab") from None

    def rank_of(self, pair: tuple[bytes, bytes]) -> int | None:
        return self._rank.get(pair)

    def validate(self) -> None:
        if len(self._id_of) != len(self.tokens):
            raise FormatError("duplicate token symbols in base vocab")
        missing = [b for b in range(256) if bytes([b]) not in self._id_of]
        if missing:
            raise NotByteComplete(
                f"{len(missing)} byte values unreachable, first: 0x{missing[0]:02x}"
            )
        for left, right in self.merges:
            for part in (left, right, left + right):
                if part not in self._id_of:
                    raise FormatError(
                        f"merge ({left!r}, {right!r}) references unknown symbol {part!r}"
                    )

    @classmethod
    def byte_identity(cls) -> "BaseVocab":
        """The minimal byte-complete vocab: 256 single-byte tokens, no merges."""
        return cls(tokens=tuple(bytes([b]) for b in range(256)), merges=())


def canonical_rule_order(productions: Iterable[Production]) -> list[Production]:
    """Deterministic, corpus-order-independent ordering of rules."""
    def key(p: Production):
        return (p.parent, tuple((kind, named) for kind, named in p.children))
    return sorted(set(productions), key=key)


@dataclass(frozen=True)
class RuleVocab:
    rules: tuple[Production, ...]

    @property
    def k(self) -> int:
        return len(self.rules)


@dataclass(frozen=True)
class MergedVocab:
    """Total bijection between symbols and IDs over base ∪ sentinels ∪ rules."""

    base: BaseVocab
    rules: RuleVocab
    language: str = DEFAULT_LANGUAGE

    def __post_init__(self):
        object.__setattr__(
            self,
            "_rule_id",
            {prod: self.rule_offset + i for i, prod in enumerate(self.rules.rules)},
        )
        object.__setattr__(
            self, "_rule_parents", frozenset(p.parent for p in self.rules.rules)
        )

    # layout ---------------------------------------------------------------
    @property
    def m(self) -> int:
        return self.base.m

    @property
    def s(self) -> int:
        return len(SENTINEL_NAMES)

    @property
    def k(self) -> int:
        return self.rules.k

    @property
    def total(self) -> int:
        return self.m + self.s + self.k

    @property
    def end_of_leaf_id(self) -> int:
        return self.m

    @property
    def gap_id(self) -> int:
        return self.m + 1

    @property
    def rule_offset(self) -> int:
        return self.m + self.s

    @property
    def rule_parents(self) -> frozenset[str]:
        """Kinds that expand via a rule token (grammar nonterminals)."""
        return self._rule_parents

    # lookups ----------------------------------------------------------------
    def classify(self, token_id: int) -> TokenClass:
        if not 0 <= token_id < self.total:
            raise OutOfRange(f"token ID {token_id} outside [0, {self.total})")
        if token_id < self.m:
            return TokenClass.TERMINAL
        if token_id < self.rule_offset:
            return TokenClass.SENTINEL
        return TokenClass.RULE

    def symbol_of(self, token_id: int):
        cls = self.classify(token_id)
        if cls is TokenClass.TERMINAL:
            return self.base.tokens[token_id]
        if cls is TokenClass.SENTINEL:
            return SENTINEL_NAMES[token_id - self.m]
        return self.rules.rules[token_id - self.rule_offset]

    def id_of(self, symbol) -> int:
        if isinstance(symbol, bytes):
            return self.base.id_of(symbol)
        if isinstance(symbol, Production):
            try:
                return self._rule_id[symbol]
            except KeyError:
                raise OutOfRange(f"rule {symbol} not in vocab") from None
        if symbol in SENTINEL_NAMES:
            return self.m + SENTINEL_NAMES.index(symbol)
        raise OutOfRange(f"unknown symbol {symbol!r}")

    def rule_id(self, production: Production) -> int | None:
        return self._rule_id.get(production)

    def production_of(self, token_id: int) -> Production:
        symbol = self.symbol_of(token_id)
        if not isinstance(symbol, Production):
            raise OutOfRange(f"token ID {token_id} is not a rule token")
        return symbol


def classify(token_id: int, vocab: MergedVocab) -> TokenClass:
    return vocab.classify(token_id)


# --- construction -------------------------------------------------------------

def build_rule_vocab(
    corpus: Iterable[SourceText], language: str = DEFAULT_LANGUAGE
) -> tuple[RuleVocab, int]:
    """Collect the distinct productions of every parseable corpus file.

    Returns the rule vocab plus the number of skipped (unparseable) files.
    """
    productions: set[Production] = set()
    parsed = skipped = 0
    for source in corpus:
        tree = parse(source, language)
        if tree.has_error:
            skipped += 1
            continue
        parsed += 1
        productions.update(internal_productions_preorder(tree))
    if parsed == 0:
        raise EmptyCorpus(f"no corpus file parsed ({skipped} skipped)")
    return RuleVocab(rules=tuple(canonical_rule_order(productions))), skipped


def merge_vocabs(
    base: BaseVocab, rules: RuleVocab, language: str = DEFAULT_LANGUAGE
) -> MergedVocab:
    return MergedVocab(base=base, rules=rules, language=language)


# --- persistence --------------------------------------------------------------

def _vocab_payload(vocab: MergedVocab) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "language": vocab.language,
        "base": {
            "tokens": [escape_bytes(t) for t in vocab.base.tokens],
            "merges": [[escape_bytes(l), escape_bytes(r)] for l, r in vocab.base.merges],
        },
        "sentinels": list(SENTINEL_NAMES),
        "rules": [
            {
                "parent": p.parent,
                "children": [{"kind": k, "named": n} for k, n in p.children],
            }
            for p in vocab.rules.rules
        ],
    }


def serialize_vocab(vocab: MergedVocab) -> bytes:
    """Byte-deterministic canonical serialization."""
    return (
        json.dumps(_vocab_payload(vocab), ensure_ascii=False, indent=1) + "\n"
    ).encode("utf-8")


def vocab_digest(vocab: MergedVocab) -> str:
    return hashlib.sha256(serialize_vocab(vocab)).hexdigest()


def save_vocab(vocab: MergedVocab, path) -> None:
    with open(path, "wb") as fh:
        fh.write(serialize_vocab(vocab))


def _require(mapping: dict, key: str, types, where: str):
    if key not in mapping:
        raise FormatError(f"missing key {key!r} in {where}")
    value = mapping[key]
    if not isinstance(value, types):
        raise FormatError(f"bad type for {key!r} in {where}")
    return value


def _parse_base(payload: dict) -> BaseVocab:
    base_obj = _require(payload, "base", dict, "vocab file")
    raw_tokens = _require(base_obj, "tokens", list, "base vocab")
    raw_merges = _require(base_obj, "merges", list, "base vocab")
    try:
        tokens = tuple(unescape_bytes(t) for t in raw_tokens)
    except TypeError:
        raise FormatError("base tokens must be strings") from None
    merges = []
    for entry in raw_merges:
        if not isinstance(entry, list) or len(entry) != 2:
            raise FormatError(f"bad merge entry {entry!r}")
        merges.append((unescape_bytes(entry[0]), unescape_bytes(entry[1])))
    base = BaseVocab(tokens=tokens, merges=tuple(merges))
    base.validate()
    return base


def _load_payload(path) -> dict:
    try:
        with open(path, "rb") as fh:
            payload = json.loads(fh.read().decode("utf-8"))
    except (ValueError, UnicodeDecodeError) as exc:
        raise FormatError(f"not a vocab JSON file: {exc}") from None
    if not isinstance(payload, dict):
        raise FormatError("vocab file must hold a JSON object")
    version = _require(payload, "format_version", int, "vocab file")
    if version != FORMAT_VERSION:
        raise VersionMismatch(f"format_version {version}, expected {FORMAT_VERSION}")
    return payload


def load_base_vocab(path) -> BaseVocab:
    """Load only the base (subword) part of a vocab file.

    Accepts both full vocab files and base-only files (``sentinels`` and
    ``rules`` keys absent or empty).
    """
    return _parse_base(_load_payload(path))


def load_vocab(path) -> MergedVocab:
    payload = _load_payload(path)
    base = _parse_base(payload)
    language = _require(payload, "language", str, "vocab file")
    sentinels = _require(payload, "sentinels", list, "vocab file")
    if tuple(sentinels) != SENTINEL_NAMES:
        raise FormatError(f"unexpected sentinel list {sentinels!r}")
    raw_rules = _require(payload, "rules", list, "vocab file")
    rules = []
    for entry in raw_rules:
        if not isinstance(entry, dict):
            raise FormatError(f"bad rule entry {entry!r}")
        parent = _require(entry, "parent", str, "rule entry")
        children = _require(entry, "children", list, "rule entry")
        if not children:
            raise FormatError(f"rule for {parent!r} has no children")
        parsed_children = []
        for child in children:
            if not isinstance(child, dict):
                raise FormatError(f"bad child entry {child!r}")
            kind = _require(child, "kind", str, "rule child")
            named = _require(child, "named", bool, "rule child")
            parsed_children.append((kind, named))
        rules.append(Production(parent=parent, children=tuple(parsed_children)))
    if len(set(rules)) != len(rules):
        raise FormatError("duplicate rule entries in vocab file")
    return MergedVocab(base=base, rules=RuleVocab(rules=tuple(rules)), language=language)
