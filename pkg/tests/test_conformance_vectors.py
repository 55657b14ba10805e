"""Committed conformance vectors must match what the engine actually does."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import pytest

REPO_ROOT = Path(__file__).resolve().parent.parent
VECTORS_PATH = REPO_ROOT / "conformance" / "session-vectors.json"

sys.path.insert(0, str(REPO_ROOT / "tools"))

from gen_session_vectors import generate  # noqa: E402


@pytest.fixture(scope="module")
def committed() -> dict:
    return json.loads(VECTORS_PATH.read_text("utf-8"))


def test_vectors_file_is_current(committed):
    regenerated = generate()
    assert committed == regenerated, (
        "conformance/session-vectors.json is stale; "
        "rerun tools/gen_session_vectors.py"
    )


def test_vectors_cover_both_outcome_kinds(committed):
    outcomes = [("error" in case["expect"]) for case in committed["cases"]]
    assert any(outcomes) and not all(outcomes)


def test_vector_catalog_is_the_shipped_pack(committed):
    from cuentoterapp.grammar import catalog_to_dict, default_catalog

    assert committed["catalog"] == catalog_to_dict(default_catalog())
