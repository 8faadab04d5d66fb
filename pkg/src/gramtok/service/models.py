"""Request/response models for the HTTP service."""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, Field


class HealthResponse(BaseModel):
    status: str
    version: str
    language: str


class VocabInfo(BaseModel):
    language: str
    m: int
    s: int
    k: int
    total: int
    digest: str


class EncodeRequest(BaseModel):
    text: str
    mode: Literal["exact", "canonical"] = "exact"
    id: str | None = None


class EncodeResponse(BaseModel):
    id: str | None
    mode: str
    ids: list[int]
    classes: list[str]


class DecodeRequest(BaseModel):
    ids: list[int]
    mode: Literal["exact"] = "exact"


class DecodeResponse(BaseModel):
    text: str


class PrefixRequest(BaseModel):
    ids: list[int]


class PrefixResponse(BaseModel):
    status: Literal["open", "complete", "invalid"]
    position: int
    reason: str | None = None
    pending: list[str] = Field(default_factory=list)


class ExplainRequest(BaseModel):
    ids: list[int]


class ExplainResponse(BaseModel):
    lines: list[str]


class LevenshteinRequest(BaseModel):
    a: list[int]
    b: list[int]


class LevenshteinResponse(BaseModel):
    distance: int


class PairIn(BaseModel):
    problem_id: str
    wrong_code: str
    correct_code: str
    outcome: bool | None = None


class PairsRequest(BaseModel):
    pairs: list[PairIn]
    threshold: int = 50
    cut: float | None = None
    chisq: bool = False


class ErrorBody(BaseModel):
    name: str
    message: str
    position: int | None = None
