"""Mixed rule/terminal token codec.

Encoding walks the concrete syntax tree in preorder: every internal node
emits its production's rule token; every *named* leaf emits a BPE-segmented
terminal run closed by END_OF_LEAF. Anonymous leaves (keywords,
punctuation) emit nothing of their own: every byte that is not named-leaf
text — whitespace, comments, newlines, and the anonymous literals
themselves — travels in *gap runs* (GAP, terminals, END_OF_LEAF) attached to
the next named leaf, with one final run for bytes after the last named
leaf. That attachment rule makes exact-mode encoding injective, so decoding
is a pure structural replay: concatenate gap bytes and named-leaf bytes in
order, no re-parsing, byte-exact.

Canonical mode is the same walk with all gap runs omitted; it is the
layout-free representation used for training export and edit-distance
analysis, and it is not decodable back to text.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .errors import (
    IncompleteSequence,
    InvalidToken,
    ModeUnsupported,
    SyntaxInvalid,
    UnknownProduction,
)
from .syntax import Production, SourceText, SyntaxTree, parse
from .vocab import BaseVocab, MergedVocab, TokenClass, escape_bytes


class EncodeMode(str, Enum):
    EXACT = "exact"
    CANONICAL = "canonical"


class PrefixStatus(str, Enum):
    OPEN = "open"
    COMPLETE = "complete"
    INVALID = "invalid"


@dataclass(frozen=True)
class TokenSequence:
    ids: tuple[int, ...]
    classes: tuple[TokenClass, ...]
    mode: EncodeMode

    def __len__(self) -> int:
        return len(self.ids)


@dataclass(frozen=True)
class PrefixState:
    status: PrefixStatus
    position: int
    reason: str | None = None
    pending: tuple[str, ...] = ()  # expectation stack, innermost last


def bpe_segment(text: bytes, base: BaseVocab) -> list[int]:
    """Deterministic BPE segmentation of raw bytes.

    Starts from single-byte symbols and repeatedly applies the
    lowest-ranked applicable merge (all of its non-overlapping occurrences,
    left to right) until none applies. Byte-completeness of the base vocab
    guarantees every byte string segments.
    """
    if not text:
        return []
    symbols = [text[i : i + 1] for i in range(len(text))]
    while len(symbols) > 1:
        best_rank = None
        best_pair = None
        for pair in zip(symbols, symbols[1:]):
            rank = base.rank_of(pair)
            if rank is not None and (best_rank is None or rank < best_rank):
                best_rank, best_pair = rank, pair
        if best_pair is None:
            break
        merged = best_pair[0] + best_pair[1]
        out = []
        i = 0
        while i < len(symbols):
            if (
                i + 1 < len(symbols)
                and symbols[i] == best_pair[0]
                and symbols[i + 1] == best_pair[1]
            ):
                out.append(merged)
                i += 2
            else:
                out.append(symbols[i])
                i += 1
        symbols = out
    return [base.id_of(s) for s in symbols]


def node_production(node) -> Production:
    return Production(
        parent=node.kind, children=tuple((c.kind, c.named) for c in node.children)
    )


class _Emitter:
    def __init__(self, vocab: MergedVocab):
        self.vocab = vocab
        self.ids: list[int] = []
        self.classes: list[TokenClass] = []

    def emit(self, token_id: int, cls: TokenClass) -> None:
        self.ids.append(token_id)
        self.classes.append(cls)

    def run(self, text: bytes) -> None:
        for tid in bpe_segment(text, self.vocab.base):
            self.emit(tid, TokenClass.TERMINAL)
        self.emit(self.vocab.end_of_leaf_id, TokenClass.SENTINEL)

    def gap_run(self, text: bytes) -> None:
        if text:
            self.emit(self.vocab.gap_id, TokenClass.SENTINEL)
            self.run(text)


def encode_tree(tree: SyntaxTree, vocab: MergedVocab, mode: EncodeMode) -> TokenSequence:
    """Encode an already-parsed tree; see :func:`encode`."""
    mode = EncodeMode(mode)
    if tree.has_error:
        raise SyntaxInvalid(
            f"cannot encode source with syntax errors"
            f"{'' if tree.source.origin is None else f' ({tree.source.origin})'}"
        )
    emitter = _Emitter(vocab)
    data = tree.source.data
    exact = mode is EncodeMode.EXACT
    prev_end = 0
    if tree.root.children:
        stack = [tree.root]
        while stack:
            node = stack.pop()
            if node.children:
                production = node_production(node)
                rule_id = vocab.rule_id(production)
                if rule_id is None:
                    raise UnknownProduction(
                        f"production not in vocab: {production}", production=production
                    )
                emitter.emit(rule_id, TokenClass.RULE)
                stack.extend(reversed(node.children))
            elif node.named:
                if exact:
                    emitter.gap_run(data[prev_end : node.start])
                    prev_end = node.end
                emitter.run(node.text or b"")
    if exact:
        emitter.gap_run(data[prev_end:])
    return TokenSequence(ids=tuple(emitter.ids), classes=tuple(emitter.classes), mode=mode)


def encode(
    source: SourceText, vocab: MergedVocab, mode: EncodeMode = EncodeMode.EXACT
) -> TokenSequence:
    """Encode source code into the mixed rule/terminal sequence.

    Raises SyntaxInvalid for unparseable input and UnknownProduction when
    the tree uses a rule the vocab does not contain; there is no fallback.
    """
    return encode_tree(parse(source, vocab.language), vocab, mode)


def sequence_from_ids(
    ids, vocab: MergedVocab, mode: EncodeMode = EncodeMode.EXACT
) -> TokenSequence:
    """Build a TokenSequence from bare IDs, classifying each against vocab."""
    ids = tuple(int(i) for i in ids)
    return TokenSequence(
        ids=ids, classes=tuple(vocab.classify(i) for i in ids), mode=EncodeMode(mode)
    )


class PushdownMachine:
    """Replays the preorder expectation structure of a token sequence.

    The stack holds pending symbols. A ``node`` symbol consumes a rule token
    whose production parent matches and replaces itself with the children; a
    ``leaf`` symbol (named leaf) consumes an optional gap run followed by a
    terminal run; ``anon`` symbols consume nothing and are settled eagerly.
    Once the stack is empty a single trailing gap run may follow.
    """

    def __init__(self, vocab: MergedVocab, collect_bytes: bool = False):
        self.vocab = vocab
        self.stack: list[tuple[str, str]] = []
        self.run: str | None = None  # None | "gap" | "leaf"
        self.gap_done = False
        self.trailing_done = False
        self.position = 0
        self.failure: tuple[int, str, str] | None = None
        self.output = bytearray() if collect_bytes else None

    # -- internals ---------------------------------------------------------
    def _settle(self) -> None:
        while self.stack and self.stack[-1][0] == "anon":
            self.stack.pop()

    def _expected(self) -> str:
        if self.run is not None:
            return "terminal or END_OF_LEAF"
        if self.stack:
            sort, kind = self.stack[-1]
            if sort == "node":
                return f"rule with parent {kind!r}"
            return f"terminal run for {kind!r}"
        if self.position == 0:
            return "rule or GAP"
        if not self.trailing_done:
            return "GAP or end of sequence"
        return "end of sequence"

    def _fail(self, got: str) -> bool:
        self.failure = (self.position, self._expected(), got)
        return False

    def _expand(self, production: Production) -> None:
        parents = self.vocab.rule_parents
        for kind, named in reversed(production.children):
            if kind in parents:
                self.stack.append(("node", kind))
            elif named:
                self.stack.append(("leaf", kind))
            else:
                self.stack.append(("anon", kind))
        self._settle()

    # -- driving -------------------------------------------------------------
    def feed(self, token_id: int) -> bool:
        """Consume one token; returns False once the sequence is invalid."""
        if self.failure is not None:
            return False
        vocab = self.vocab
        if not isinstance(token_id, int) or not 0 <= token_id < vocab.total:
            return self._fail(f"unknown token ID {token_id!r}")
        cls = vocab.classify(token_id)

        if self.run is not None:
            if cls is TokenClass.TERMINAL:
                if self.output is not None:
                    self.output += vocab.base.tokens[token_id]
            elif token_id == vocab.end_of_leaf_id:
                if self.run == "leaf":
                    self.stack.pop()
                    self.gap_done = False
                elif self.stack:
                    self.gap_done = True
                else:
                    self.trailing_done = True
                self.run = None
                self._settle()
            else:
                return self._fail(self._describe_token(token_id, cls))
        else:
            self._settle()
            if not self.stack:
                if self.position == 0 and cls is TokenClass.RULE:
                    self._expand(vocab.production_of(token_id))
                elif token_id == vocab.gap_id and not self.trailing_done:
                    self.run = "gap"
                else:
                    return self._fail(self._describe_token(token_id, cls))
            else:
                sort, kind = self.stack[-1]
                if sort == "node":
                    if cls is not TokenClass.RULE:
                        return self._fail(self._describe_token(token_id, cls))
                    production = vocab.production_of(token_id)
                    if production.parent != kind:
                        return self._fail(f"rule {production}")
                    self.stack.pop()
                    self._expand(production)
                else:  # named leaf
                    if token_id == vocab.gap_id and not self.gap_done:
                        self.run = "gap"
                    elif cls is TokenClass.TERMINAL:
                        self.run = "leaf"
                        if self.output is not None:
                            self.output += vocab.base.tokens[token_id]
                    elif token_id == vocab.end_of_leaf_id:
                        self.stack.pop()
                        self.gap_done = False
                        self._settle()
                    else:
                        return self._fail(self._describe_token(token_id, cls))
        self.position += 1
        return True

    def _describe_token(self, token_id: int, cls: TokenClass) -> str:
        if cls is TokenClass.SENTINEL:
            return str(self.vocab.symbol_of(token_id))
        return f"{cls.value} token {token_id}"

    def status(self) -> PrefixStatus:
        if self.failure is not None:
            return PrefixStatus.INVALID
        if self.run is not None:
            return PrefixStatus.OPEN
        self._settle()
        if self.stack or self.position == 0:
            return PrefixStatus.OPEN
        return PrefixStatus.COMPLETE

    def state(self) -> PrefixState:
        if self.failure is not None:
            position, expected, got = self.failure
            return PrefixState(
                status=PrefixStatus.INVALID,
                position=position,
                reason=f"expected {expected}, got {got}",
                pending=tuple(kind for _, kind in reversed(self.stack)),
            )
        return PrefixState(
            status=self.status(),
            position=self.position,
            pending=tuple(kind for _, kind in reversed(self.stack)),
        )


def is_valid_prefix(ids, vocab: MergedVocab) -> PrefixState:
    """Structure-check bare token IDs without producing bytes."""
    machine = PushdownMachine(vocab)
    for token_id in ids:
        if not machine.feed(token_id):
            break
    return machine.state()


def decode(seq: TokenSequence, vocab: MergedVocab) -> SourceText:
    """Reconstruct the exact source bytes of an exact-mode sequence."""
    if EncodeMode(seq.mode) is not EncodeMode.EXACT:
        raise ModeUnsupported("only exact-mode sequences are decodable")
    machine = PushdownMachine(vocab, collect_bytes=True)
    for token_id in seq.ids:
        if not machine.feed(token_id):
            position, expected, got = machine.failure
            raise InvalidToken(position, expected, got)
    # an empty sequence is the encoding of the empty file
    if seq.ids and machine.status() is not PrefixStatus.COMPLETE:
        pending = ", ".join(kind for _, kind in reversed(machine.stack)) or "run in progress"
        raise IncompleteSequence(f"sequence ended early; pending: {pending}")
    return SourceText(bytes(machine.output))


def explain(seq: TokenSequence, vocab: MergedVocab) -> list[str]:
    """One line per token: index, ID, class, and the rendered symbol."""
    lines = []
    for index, token_id in enumerate(seq.ids):
        cls = vocab.classify(token_id)
        symbol = vocab.symbol_of(token_id)
        rendered = escape_bytes(symbol) if isinstance(symbol, bytes) else str(symbol)
        lines.append(f"{index:5d}  {token_id:8d}  {cls.value:<8}  {rendered}")
    return lines
