#!/usr/bin/env python3
"""Regenerate the golden fixtures by driving the gramtok CLI.

Every expected value in golden/cases.json is literal CLI output, so the
client test suite checks the service against the CLI surface, not against
a reimplementation. Run from the repository root:

    python3 frontend/scripts/make_golden.py
"""

import json
import subprocess
import sys
import tempfile
from pathlib import Path

FRONTEND = Path(__file__).resolve().parent.parent
REPO = FRONTEND.parent
GOLDEN = FRONTEND / "golden"

sys.path.insert(0, str(REPO / "tests"))
from corpusgen import build_corpus  # noqa: E402

ODD_SUM = "def get(a, b):\n    return (a + b) % 2 == 1\n"


def cli(*args, stdin: bytes = b"") -> bytes:
    result = subprocess.run(
        [sys.executable, "-m", "gramtok", *args],
        input=stdin,
        capture_output=True,
        cwd=REPO,
    )
    if result.returncode != 0:
        raise RuntimeError(f"CLI failed: {args}\n{result.stderr.decode()}")
    return result.stdout


def main() -> None:
    GOLDEN.mkdir(exist_ok=True)
    work = Path(tempfile.mkdtemp(prefix="gramtok-golden-"))

    # 20 golden source files: 19 generated + the running example
    files = [("odd_sum.py", ODD_SUM.encode("utf-8"))] + build_corpus()[:19]

    corpus_dir = work / "corpus"
    corpus_dir.mkdir()
    for name, data in files:
        (corpus_dir / name).write_bytes(data)

    base_path = work / "base.json"
    subprocess.run(
        [
            sys.executable,
            "-c",
            "import sys; from gramtok.vocab import BaseVocab, RuleVocab, merge_vocabs, save_vocab; "
            "save_vocab(merge_vocabs(BaseVocab.byte_identity(), RuleVocab(rules=())), sys.argv[1])",
            str(base_path),
        ],
        check=True,
    )
    cli(
        "build-vocab",
        "--base", str(base_path),
        "--corpus", str(corpus_dir),
        "--out", str(GOLDEN / "vocab.json"),
    )

    cases = []
    for index, (name, data) in enumerate(files):
        mode = "canonical" if index % 3 == 2 else "exact"
        out = cli(
            "encode",
            "--vocab", str(GOLDEN / "vocab.json"),
            "--mode", mode,
            "--id", name,
            stdin=data,
        )
        payload = json.loads(out)
        cases.append(
            {
                "id": name,
                "text": data.decode("utf-8"),
                "mode": mode,
                "ids": payload["ids"],
            }
        )
    (GOLDEN / "cases.json").write_text(
        json.dumps(cases, ensure_ascii=False, indent=1) + "\n", encoding="utf-8"
    )

    # failure fixtures: payloads plus the core error name each must surface
    odd_sum_ids = next(c["ids"] for c in cases if c["id"] == "odd_sum.py")
    vocab_payload = json.loads((GOLDEN / "vocab.json").read_text())
    total_size = (
        len(vocab_payload["base"]["tokens"])
        + len(vocab_payload["sentinels"])
        + len(vocab_payload["rules"])
    )
    failures = [
        {
            "name": "syntax-error",
            "op": "encode",
            "payload": {"text": "def f(:", "mode": "exact"},
            "expected_error": "SyntaxInvalid",
        },
        {
            "name": "unknown-production",
            "op": "encode",
            "payload": {"text": "from os import path as p\n", "mode": "exact"},
            "expected_error": "UnknownProduction",
        },
        {
            "name": "truncated-sequence",
            "op": "decode",
            "payload": {"ids": odd_sum_ids[:-1]},
            "expected_error": "IncompleteSequence",
        },
        {
            "name": "corrupted-first-token",
            "op": "decode",
            "payload": {"ids": [0] + odd_sum_ids[1:]},
            "expected_error": "InvalidToken",
        },
        {
            "name": "explain-out-of-range",
            "op": "explain",
            "payload": {"ids": [total_size]},
            "expected_error": "OutOfRange",
        },
    ]
    (GOLDEN / "failures.json").write_text(
        json.dumps(failures, ensure_ascii=False, indent=1) + "\n", encoding="utf-8"
    )
    print(f"wrote {len(cases)} cases and {len(failures)} failure fixtures to {GOLDEN}")


if __name__ == "__main__":
    main()
