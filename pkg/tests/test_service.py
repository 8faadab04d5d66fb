import pytest
from fastapi.testclient import TestClient

from gramtok import EncodeMode, encode
from gramtok.service import create_app

from conftest import ODD_SUM


@pytest.fixture(scope="module")
def client(tmp_path_factory, corpus_vocab):
    app = create_app(vocab=corpus_vocab)
    with TestClient(app) as test_client:
        yield test_client


class TestHealthAndInfo:
    def test_health(self, client):
        body = client.get("/health").json()
        assert body["status"] == "ok"
        assert body["language"] == "python"

    def test_vocab_info(self, client, corpus_vocab):
        body = client.get("/vocab/info").json()
        assert body["total"] == body["m"] + body["s"] + body["k"]
        assert body["total"] == corpus_vocab.total
        assert len(body["digest"]) == 64

    def test_requires_vocab(self, monkeypatch):
        monkeypatch.delenv("GRAMTOK_VOCAB", raising=False)
        with pytest.raises(ValueError):
            create_app()


class TestEncodeDecode:
    def test_round_trip(self, client):
        encoded = client.post("/encode", json={"text": ODD_SUM, "mode": "exact"}).json()
        assert encoded["classes"][0] == "rule"
        decoded = client.post("/decode", json={"ids": encoded["ids"]}).json()
        assert decoded["text"] == ODD_SUM

    def test_parity_with_core(self, client, corpus_vocab):
        body = client.post("/encode", json={"text": ODD_SUM, "mode": "canonical"}).json()
        core = encode_text_core(ODD_SUM, corpus_vocab, EncodeMode.CANONICAL)
        assert body["ids"] == core

    def test_syntax_error_payload(self, client):
        response = client.post("/encode", json={"text": "def f(:", "mode": "exact"})
        assert response.status_code == 400
        error = response.json()["error"]
        assert error["name"] == "SyntaxInvalid"

    def test_decode_error_positions(self, client, corpus_vocab):
        encoded = client.post("/encode", json={"text": ODD_SUM, "mode": "exact"}).json()
        ids = encoded["ids"]
        ids[0] = 0  # terminal where a rule is required
        response = client.post("/decode", json={"ids": ids})
        assert response.status_code == 400
        error = response.json()["error"]
        assert error["name"] == "InvalidToken"
        assert error["position"] == 0

    def test_canonical_decode_rejected(self, client):
        encoded = client.post("/encode", json={"text": ODD_SUM, "mode": "canonical"}).json()
        # the decode route only accepts exact mode by schema
        response = client.post("/decode", json={"ids": encoded["ids"], "mode": "canonical"})
        assert response.status_code == 422


def encode_text_core(text, vocab, mode):
    from gramtok import SourceText

    return list(encode(SourceText.from_text(text), vocab, mode).ids)


class TestPrefixAndExplain:
    def test_prefix_progression(self, client):
        encoded = client.post("/encode", json={"text": ODD_SUM, "mode": "exact"}).json()
        full = client.post("/prefix", json={"ids": encoded["ids"]}).json()
        assert full["status"] == "complete"
        partial = client.post("/prefix", json={"ids": encoded["ids"][:3]}).json()
        assert partial["status"] == "open"
        assert partial["pending"]

    def test_prefix_invalid_position(self, client):
        body = client.post("/prefix", json={"ids": [0]}).json()
        assert body["status"] == "invalid"
        assert body["position"] == 0
        assert body["reason"]

    def test_explain_lines(self, client):
        encoded = client.post("/encode", json={"text": ODD_SUM, "mode": "exact"}).json()
        lines = client.post("/explain", json={"ids": encoded["ids"]}).json()["lines"]
        assert len(lines) == len(encoded["ids"])
        assert "module → function_definition" in lines[0]

    def test_explain_out_of_range(self, client, corpus_vocab):
        response = client.post("/explain", json={"ids": [corpus_vocab.total]})
        assert response.status_code == 400
        assert response.json()["error"]["name"] == "OutOfRange"


class TestAnalysisRoutes:
    def test_levenshtein(self, client):
        body = client.post(
            "/levenshtein", json={"a": [1, 2, 3], "b": [1, 3]}
        ).json()
        assert body["distance"] == 1

    def test_pairs_report(self, client):
        from pairsuite import PRECEDENCE_PAIR

        label, wrong, correct = PRECEDENCE_PAIR
        # vocab covers the suite only if its productions exist; the corpus
        # vocab includes plain function defs, so reuse a corpus-covered pair
        payload = {
            "pairs": [
                {"problem_id": label, "wrong_code": wrong, "correct_code": correct}
            ],
            "threshold": 50,
        }
        body = client.post("/pairs/report", json=payload).json()
        assert body["total_pairs"] == 1

    def test_validation_error_is_422(self, client):
        response = client.post("/encode", json={"mode": "exact"})
        assert response.status_code == 422
