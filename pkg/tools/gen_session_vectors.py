#!/usr/bin/env python3
"""Regenerate conformance/session-vectors.json from the session engine.

The vectors pin the engine's observable behaviour for scripted action
sequences so an independent client-side implementation can prove it agrees
action for action. Run from the repository root:

    python3 tools/gen_session_vectors.py
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from cuentoterapp import grammar
from cuentoterapp.grammar import (
    DuplicateCharacterError,
    EmptySelectionError,
    EmptyTextError,
    EmptyTitleError,
    EndingRequiredError,
    GrammarError,
    SessionConfig,
    UnknownCharacterError,
    UnknownSituationError,
    WrongPhaseError,
)

ERROR_KINDS = {
    WrongPhaseError: "wrong_phase",
    UnknownSituationError: "unknown_situation",
    UnknownCharacterError: "unknown_character",
    DuplicateCharacterError: "duplicate_character",
    EmptySelectionError: "empty_selection",
    EmptyTextError: "empty_text",
    EmptyTitleError: "empty_title",
    EndingRequiredError: "ending_required",
}


def reject_writes_script(writes: dict[int, str], title: str,
                         situation_id: int, character_ids: list[int]) -> list[dict]:
    actions: list[dict] = [
        {"action": "choose_situation", "situation_id": situation_id},
        {"action": "choose_characters", "character_ids": character_ids},
    ]
    for fid in range(1, 32):
        if fid in writes:
            actions.append({"action": "write", "text": writes[fid]})
        else:
            actions.append({"action": "reject"})
    actions.append({"action": "set_title", "title": title})
    return actions


def case_definitions(catalog) -> list[dict]:
    by_name = {c.name.lower(): c.id for c in catalog.characters}
    prince, donkey = by_name["prince"], by_name["donkey"]
    first_situation = catalog.situations[0].id
    second_situation = catalog.situations[1].id

    cases: list[dict] = []

    cases.append({
        "name": "guided-tour-main-flow",
        "config": {"require_ending": False},
        "actions": reject_writes_script(
            {
                1: "La primera carta, escrita con el micrófono.",
                3: "La tercera carta, con el texto indicado.",
                10: "La carta diez, con el texto indicado.",
                19: "La carta diecinueve, con el texto indicado.",
            },
            "Wonderful Story", first_situation, [prince, donkey],
        ),
    })

    cases.append({
        "name": "offline-flow-second-situation",
        "config": {"require_ending": False},
        "actions": reject_writes_script(
            {
                2: "La segunda carta, escrita sin conexión.",
                5: "La quinta carta, con el texto indicado.",
                12: "La carta doce, con el texto indicado.",
            },
            "Wonderful Tale 2", second_situation, [prince, donkey],
        ),
    })

    cases.append({
        "name": "reject-everything",
        "config": {"require_ending": False},
        "actions": reject_writes_script({}, "Historia vacía", first_situation, [donkey]),
    })

    cases.append({
        "name": "write-everything",
        "config": {"require_ending": False},
        "actions": reject_writes_script(
            {fid: f"Parte {fid}." for fid in range(1, 32)},
            "Todo escrito", second_situation, [prince],
        ),
    })

    ending_actions = [
        {"action": "choose_situation", "situation_id": first_situation},
        {"action": "choose_characters", "character_ids": [prince]},
    ]
    ending_actions += [{"action": "reject"}] * 31
    cases.append({
        "name": "required-ending-blocks-final-reject",
        "config": {"require_ending": True},
        "actions": ending_actions,
    })

    cases.append({
        "name": "required-ending-written-final-card",
        "config": {"require_ending": True},
        "actions": (
            [
                {"action": "choose_situation", "situation_id": first_situation},
                {"action": "choose_characters", "character_ids": [prince, donkey]},
            ]
            + [{"action": "reject"}] * 30
            + [
                {"action": "write", "text": "Y todos vivieron felices."},
                {"action": "set_title", "title": "Final obligatorio"},
            ]
        ),
    })

    cases.append({
        "name": "write-before-characters-is-wrong-phase",
        "config": {"require_ending": False},
        "actions": [
            {"action": "choose_situation", "situation_id": first_situation},
            {"action": "write", "text": "demasiado pronto"},
        ],
    })

    cases.append({
        "name": "unknown-situation-rejected",
        "config": {"require_ending": False},
        "actions": [{"action": "choose_situation", "situation_id": 999}],
    })

    cases.append({
        "name": "duplicate-character-rejected",
        "config": {"require_ending": False},
        "actions": [
            {"action": "choose_situation", "situation_id": first_situation},
            {"action": "choose_characters", "character_ids": [prince, prince]},
        ],
    })

    cases.append({
        "name": "empty-selection-rejected",
        "config": {"require_ending": False},
        "actions": [
            {"action": "choose_situation", "situation_id": first_situation},
            {"action": "choose_characters", "character_ids": []},
        ],
    })

    cases.append({
        "name": "whitespace-text-rejected",
        "config": {"require_ending": False},
        "actions": [
            {"action": "choose_situation", "situation_id": second_situation},
            {"action": "choose_characters", "character_ids": [donkey]},
            {"action": "write", "text": "   "},
        ],
    })

    cases.append({
        "name": "empty-title-rejected",
        "config": {"require_ending": False},
        "actions": (
            [
                {"action": "choose_situation", "situation_id": first_situation},
                {"action": "choose_characters", "character_ids": [prince]},
            ]
            + [{"action": "reject"}] * 31
            + [{"action": "set_title", "title": " "}]
        ),
    })

    return cases


def apply_action(session, action: dict):
    kind = action["action"]
    if kind == "choose_situation":
        return grammar.choose_situation(session, action["situation_id"])
    if kind == "choose_characters":
        return grammar.choose_characters(session, action["character_ids"])
    if kind == "write":
        return grammar.write_fragment(session, action["text"])
    if kind == "reject":
        return grammar.reject_card(session)
    if kind == "set_title":
        return grammar.set_title(session, action["title"])
    raise ValueError(f"unknown action {kind}")


def evaluate_case(catalog, case: dict) -> dict:
    session = grammar.new_session(
        catalog, SessionConfig(require_ending=case["config"]["require_ending"])
    )
    for index, action in enumerate(case["actions"]):
        try:
            session = apply_action(session, action)
        except GrammarError as exc:
            return {"error": {"at": index, "kind": ERROR_KINDS[type(exc)]}}
    if session.phase is grammar.Phase.DONE:
        story = grammar.finalize(
            session,
            clock=lambda: "2024-01-31T10:00:00Z",
            id_source=lambda: "00000000-0000-4000-8000-000000000000",
        )
        return {
            "phase": "done",
            "title": story.title,
            "situation_id": story.situation_id,
            "character_ids": list(story.character_ids),
            "fragments": [
                {"function_id": f.function_id, "text": f.text} for f in story.fragments
            ],
        }
    return {"phase": session.phase.value, "cursor": session.cursor}


def generate() -> dict:
    catalog = grammar.default_catalog()
    cases = []
    for case in case_definitions(catalog):
        expect = evaluate_case(catalog, case)
        cases.append({**case, "expect": expect})
    return {
        "description": (
            "Scripted action sequences and their outcomes under the reference "
            "session engine. An independent implementation must produce the "
            "same fragments, titles, phases and errors."
        ),
        "catalog": grammar.catalog_to_dict(catalog),
        "cases": cases,
    }


def main() -> None:
    out_path = Path(__file__).resolve().parent.parent / "conformance" / "session-vectors.json"
    out_path.write_text(json.dumps(generate(), ensure_ascii=False, indent=2) + "\n", "utf-8")
    print(f"wrote {out_path}")


if __name__ == "__main__":
    main()
