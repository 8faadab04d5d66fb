"""Error taxonomy shared by every gramtok module.

Each error class carries a stable ``name`` used verbatim in CLI diagnostics
and service error payloads, so clients can match on it without parsing
messages.
"""

from __future__ import annotations


class GramtokError(Exception):
    """Base class; ``name`` is the stable machine-readable identifier."""

    name = "GramtokError"

    def __str__(self) -> str:
        msg = super().__str__()
        return msg if msg else self.name


# --- syntax ---------------------------------------------------------------

class ParserUnavailable(GramtokError):
    name = "ParserUnavailable"


class TreeHasErrors(GramtokError):
    name = "TreeHasErrors"


class SyntaxInvalid(GramtokError):
    name = "SyntaxInvalid"


# --- vocab ----------------------------------------------------------------

class FormatError(GramtokError):
    name = "FormatError"


class VersionMismatch(GramtokError):
    name = "VersionMismatch"


class NotByteComplete(GramtokError):
    name = "NotByteComplete"


class EmptyCorpus(GramtokError):
    name = "EmptyCorpus"


class OutOfRange(GramtokError):
    name = "OutOfRange"


# --- codec ----------------------------------------------------------------

class UnknownProduction(GramtokError):
    name = "UnknownProduction"

    def __init__(self, message: str, production=None, record_id: str | None = None):
        super().__init__(message)
        self.production = production
        self.record_id = record_id


class IncompleteSequence(GramtokError):
    name = "IncompleteSequence"


class InvalidToken(GramtokError):
    name = "InvalidToken"

    def __init__(self, position: int, expected: str, got: str):
        super().__init__(
            f"invalid token at position {position}: expected {expected}, got {got}"
        )
        self.position = position
        self.expected = expected
        self.got = got


class ModeUnsupported(GramtokError):
    name = "ModeUnsupported"


# --- analysis ---------------------------------------------------------------

class DegenerateTable(GramtokError):
    name = "DegenerateTable"


class MissingOutcome(GramtokError):
    name = "MissingOutcome"
