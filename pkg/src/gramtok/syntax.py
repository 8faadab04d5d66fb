"""Concrete syntax trees for the configured language (Python by default).

The parser backend is parso, which round-trips source text losslessly and
recovers from syntax errors with explicit error nodes. Trees produced here
differ from raw parso trees in three ways:

* node kinds are normalized to readable grammar names (``module``,
  ``function_definition``, ``identifier``, ...); anonymous leaves (keywords
  and punctuation) use their fixed literal as the kind, so the kind alone
  determines their text;
* ``newline`` and ``endmarker`` tokens are not tree leaves; their bytes are
  layout, recoverable from the gaps between remaining leaves;
* every node carries a byte span into the original source, computed so that
  leaf texts plus inter-leaf gaps reconstruct the input byte-for-byte.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from .errors import ParserUnavailable, TreeHasErrors

DEFAULT_LANGUAGE = "python"

# Grammar pinned for reproducibility: the same bytes must parse to the same
# tree regardless of the interpreter running the package.
_PYTHON_GRAMMAR_VERSION = "3.10"

# parso nonterminal / token-type names -> normalized kinds. Only applied
# where the correspondence is one-to-one; everything else keeps the
# grammar's own name.
_KIND_RENAMES = {
    "file_input": "module",
    "funcdef": "function_definition",
    "classdef": "class_definition",
    "suite": "block",
    "name": "identifier",
}

# Keywords and operators are anonymous leaves: their kind is their literal,
# so the kind alone fixes their text. Every other leaf type (name, number,
# string, fstring_*) is named and carries free-form text.
_DROPPED_LEAF_TYPES = {"newline", "endmarker"}

END_OF_FILE_KIND = "end_of_file"


@dataclass(frozen=True)
class SourceText:
    """Raw program bytes plus an optional origin identifier."""

    data: bytes
    origin: str | None = None

    @classmethod
    def from_text(cls, text: str, origin: str | None = None) -> "SourceText":
        return cls(text.encode("utf-8", errors="surrogateescape"), origin)

    @classmethod
    def from_file(cls, path) -> "SourceText":
        with open(path, "rb") as fh:
            return cls(fh.read(), str(path))

    def decode(self) -> str:
        # surrogateescape keeps arbitrary byte values round-trippable
        return self.data.decode("utf-8", errors="surrogateescape")

    def __len__(self) -> int:
        return len(self.data)


@dataclass(frozen=True)
class SyntaxNode:
    kind: str
    start: int
    end: int
    named: bool
    children: tuple["SyntaxNode", ...] = ()
    text: bytes | None = None  # leaf nodes only

    @property
    def is_leaf(self) -> bool:
        return not self.children

    @property
    def span(self) -> tuple[int, int]:
        return (self.start, self.end)


@dataclass(frozen=True)
class SyntaxTree:
    root: SyntaxNode
    source: SourceText
    has_error: bool


@dataclass(frozen=True, order=True)
class Production:
    """One grammar rule: parent kind plus the ordered (kind, named) children."""

    parent: str
    children: tuple[tuple[str, bool], ...]

    def __str__(self) -> str:
        return f"{self.parent} → {' '.join(kind for kind, _ in self.children)}"


@dataclass(frozen=True)
class LeafInfo:
    kind: str
    named: bool
    start: int
    end: int
    text: bytes

    @property
    def span(self) -> tuple[int, int]:
        return (self.start, self.end)


_GRAMMAR_CACHE: dict[str, object] = {}


def _load_grammar(language: str):
    if language != DEFAULT_LANGUAGE:
        raise ParserUnavailable(f"no grammar configured for language {language!r}")
    grammar = _GRAMMAR_CACHE.get(language)
    if grammar is None:
        try:
            import parso
        except ImportError as exc:  # pragma: no cover - environment problem
            raise ParserUnavailable("parso is required for the python grammar") from exc
        grammar = parso.load_grammar(version=_PYTHON_GRAMMAR_VERSION)
        _GRAMMAR_CACHE[language] = grammar
    return grammar


def _leaf_kind(leaf) -> tuple[str, bool]:
    if leaf.type in ("keyword", "operator"):
        return leaf.value, False
    return _KIND_RENAMES.get(leaf.type, leaf.type), True


class _TreeBuilder:
    """Converts a parso tree, tracking byte offsets from leaf prefixes."""

    def __init__(self) -> None:
        self.offset = 0
        self.has_error = False

    def build(self, node) -> SyntaxNode | None:
        if node.type in ("error_node", "error_leaf"):
            self.has_error = True
        children = getattr(node, "children", None)
        if children is None:
            return self._leaf(node)
        built = []
        for child in children:
            converted = self.build(child)
            if converted is not None:
                built.append(converted)
        if not built:
            # only reachable for dropped-leaf-only nodes; the root handles
            # this case itself, and no other parso node consists purely of
            # newline/endmarker tokens
            return None
        kind = _KIND_RENAMES.get(node.type, node.type)
        return SyntaxNode(
            kind=kind,
            start=built[0].start,
            end=built[-1].end,
            named=True,
            children=tuple(built),
        )

    def _leaf(self, leaf) -> SyntaxNode | None:
        prefix = leaf.prefix.encode("utf-8", errors="surrogateescape")
        value = leaf.value.encode("utf-8", errors="surrogateescape")
        start = self.offset + len(prefix)
        end = start + len(value)
        self.offset = end
        if leaf.type in _DROPPED_LEAF_TYPES:
            return None
        kind, named = _leaf_kind(leaf)
        return SyntaxNode(kind=kind, start=start, end=end, named=named, text=value)


def parse(source: SourceText, language: str = DEFAULT_LANGUAGE) -> SyntaxTree:
    """Parse source bytes into a concrete syntax tree.

    Never mutates or normalizes the input; syntax errors are reported via
    ``has_error``, not exceptions.
    """
    grammar = _load_grammar(language)
    module = grammar.parse(source.decode(), error_recovery=True)
    builder = _TreeBuilder()
    built = builder.build(module)
    children = built.children if built is not None else ()
    # the root always spans the whole file, even when empty
    root = SyntaxNode(
        kind=_KIND_RENAMES["file_input"],
        start=0,
        end=len(source.data),
        named=True,
        children=children,
    )
    return SyntaxTree(root=root, source=source, has_error=builder.has_error)


def validate_syntax(source: SourceText, language: str = DEFAULT_LANGUAGE) -> bool:
    """True iff the source parses without any error node."""
    return not parse(source, language).has_error


def walk_preorder(node: SyntaxNode) -> Iterator[SyntaxNode]:
    stack = [node]
    while stack:
        current = stack.pop()
        yield current
        stack.extend(reversed(current.children))


def internal_productions_preorder(tree: SyntaxTree) -> list[Production]:
    """All productions in preorder, one per internal node."""
    if tree.has_error:
        raise TreeHasErrors("cannot extract productions from a tree with errors")
    out = []
    for node in walk_preorder(tree.root):
        if node.children:
            out.append(
                Production(
                    parent=node.kind,
                    children=tuple((c.kind, c.named) for c in node.children),
                )
            )
    return out


def leaves_in_order(tree: SyntaxTree) -> list[LeafInfo]:
    """All leaves in source order.

    When source bytes extend past the last token (trailing newline, trailing
    comments, or a file with no tokens at all), a zero-width ``end_of_file``
    marker is appended so that inter-leaf gaps plus leaf texts always cover
    the input exactly.
    """
    leaves = [
        LeafInfo(kind=n.kind, named=n.named, start=n.start, end=n.end, text=n.text or b"")
        for n in walk_preorder(tree.root)
        if n.is_leaf and n is not tree.root
    ]
    size = len(tree.source.data)
    last_end = leaves[-1].end if leaves else 0
    if last_end < size:
        leaves.append(
            LeafInfo(kind=END_OF_FILE_KIND, named=False, start=size, end=size, text=b"")
        )
    return leaves
