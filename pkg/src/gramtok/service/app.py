"""FastAPI service wrapping the codec, vocab, and analysis layers.

The service loads one merged vocabulary at startup and serves encode /
decode / prefix-validation / analysis requests against it, so training
pipelines and non-Python clients talk to a single long-lived process
instead of re-loading the vocab per invocation. Core errors surface as
HTTP 400 with a stable ``error.name`` taken from the exception class.
"""

from __future__ import annotations

import os

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..analysis import PairRecord, build_contingency, chi_square, levenshtein, pair_report
from ..codec import EncodeMode, decode, encode, explain, is_valid_prefix, sequence_from_ids
from ..errors import FormatError, GramtokError
from ..syntax import SourceText
from ..vocab import MergedVocab, load_vocab, vocab_digest
from . import models

VOCAB_ENV = "GRAMTOK_VOCAB"


def create_app(vocab: MergedVocab | None = None, vocab_path: str | None = None) -> FastAPI:
    if vocab is None:
        vocab_path = vocab_path or os.environ.get(VOCAB_ENV)
        if not vocab_path:
            raise ValueError(
                f"a vocab is required: pass vocab/vocab_path or set {VOCAB_ENV}"
            )
        vocab = load_vocab(vocab_path)

    app = FastAPI(title="gramtok", version=__version__)
    app.state.vocab = vocab
    app.state.digest = vocab_digest(vocab)

    @app.exception_handler(GramtokError)
    async def gramtok_error(_: Request, exc: GramtokError):
        body = models.ErrorBody(
            name=exc.name, message=str(exc), position=getattr(exc, "position", None)
        )
        return JSONResponse(status_code=400, content={"error": body.model_dump()})

    @app.get("/health", response_model=models.HealthResponse)
    def health():
        return models.HealthResponse(
            status="ok", version=__version__, language=vocab.language
        )

    @app.get("/vocab/info", response_model=models.VocabInfo)
    def vocab_info():
        return models.VocabInfo(
            language=vocab.language,
            m=vocab.m,
            s=vocab.s,
            k=vocab.k,
            total=vocab.total,
            digest=app.state.digest,
        )

    @app.post("/encode", response_model=models.EncodeResponse)
    def encode_route(req: models.EncodeRequest):
        seq = encode(
            SourceText.from_text(req.text, origin=req.id), vocab, EncodeMode(req.mode)
        )
        return models.EncodeResponse(
            id=req.id,
            mode=seq.mode.value,
            ids=list(seq.ids),
            classes=[c.value for c in seq.classes],
        )

    @app.post("/decode", response_model=models.DecodeResponse)
    def decode_route(req: models.DecodeRequest):
        seq = sequence_from_ids(req.ids, vocab, EncodeMode(req.mode))
        data = decode(seq, vocab).data
        try:
            text = data.decode("utf-8")
        except UnicodeDecodeError:
            # JSON cannot carry raw bytes; the CLI decodes binary-exact
            raise FormatError("decoded bytes are not valid UTF-8 text") from None
        return models.DecodeResponse(text=text)

    @app.post("/prefix", response_model=models.PrefixResponse)
    def prefix_route(req: models.PrefixRequest):
        state = is_valid_prefix(req.ids, vocab)
        return models.PrefixResponse(
            status=state.status.value,
            position=state.position,
            reason=state.reason,
            pending=list(state.pending),
        )

    @app.post("/explain", response_model=models.ExplainResponse)
    def explain_route(req: models.ExplainRequest):
        seq = sequence_from_ids(req.ids, vocab)
        return models.ExplainResponse(lines=explain(seq, vocab))

    @app.post("/levenshtein", response_model=models.LevenshteinResponse)
    def levenshtein_route(req: models.LevenshteinRequest):
        return models.LevenshteinResponse(distance=levenshtein(req.a, req.b))

    @app.post("/pairs/report")
    def pairs_route(req: models.PairsRequest):
        pairs = [
            PairRecord(
                problem_id=p.problem_id,
                error_code=SourceText.from_text(p.wrong_code),
                correct_code=SourceText.from_text(p.correct_code),
                outcome=p.outcome,
            )
            for p in req.pairs
        ]
        report = pair_report(pairs, vocab, vocab.base, req.threshold).to_dict()
        if req.chisq:
            table = build_contingency(pairs, vocab, vocab.base, cut=req.cut)
            statistic, p_value = chi_square(table)
            report["chi_square"] = {
                "contingency": [list(row) for row in table.cells],
                "cut": table.cut,
                "statistic": statistic,
                "p_value": p_value,
            }
        return report

    return app
