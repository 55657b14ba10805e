"""Narrative grammar and the guided story-creation session.

The model follows the classic morphology of wonder tales: a fixed catalog of
31 narrative functions that, when present in a story, always appear in the
same canonical order. A guided session walks the author through choosing an
initial situation, picking characters, then accepting (writing) or rejecting
each function card in order, and finally titling the finished story.

Sessions are immutable values: every operation returns a new session, so two
sessions derived from the same catalog can never interfere with each other.
"""

from __future__ import annotations

import json
import uuid
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from enum import Enum
from importlib import resources
from typing import Callable, Iterable, Sequence

FUNCTION_COUNT = 31

__all__ = [
    "FUNCTION_COUNT",
    "GrammarError",
    "CatalogParseError",
    "CatalogValidationError",
    "UnknownFunctionError",
    "WrongPhaseError",
    "UnknownSituationError",
    "UnknownCharacterError",
    "DuplicateCharacterError",
    "EmptySelectionError",
    "EmptyTextError",
    "EmptyTitleError",
    "EndingRequiredError",
    "InvalidStoryError",
    "FunctionCard",
    "Character",
    "InitialSituation",
    "Catalog",
    "SequenceViolation",
    "SessionConfig",
    "Phase",
    "DecisionKind",
    "CardDecision",
    "StorySession",
    "TitlePrompt",
    "TITLE_PROMPT",
    "StoryFragment",
    "Story",
    "load_catalog",
    "catalog_from_dict",
    "catalog_to_dict",
    "default_catalog",
    "validate_sequence",
    "new_session",
    "choose_situation",
    "choose_characters",
    "current_card",
    "write_fragment",
    "reject_card",
    "set_title",
    "finalize",
    "story_from_dict",
    "story_to_dict",
    "validate_story",
    "utc_now_iso",
]


class GrammarError(Exception):
    """Base class for catalog, sequence and session errors."""


class CatalogParseError(GrammarError):
    """Catalog input is not well-formed."""


class CatalogValidationError(GrammarError):
    """Catalog content violates a catalog invariant."""


class UnknownFunctionError(GrammarError):
    """A function id does not exist in the catalog."""


class WrongPhaseError(GrammarError):
    """Operation invoked outside the phase that permits it."""


class UnknownSituationError(GrammarError):
    pass


class UnknownCharacterError(GrammarError):
    pass


class DuplicateCharacterError(GrammarError):
    pass


class EmptySelectionError(GrammarError):
    pass


class EmptyTextError(GrammarError):
    pass


class EmptyTitleError(GrammarError):
    pass


class EndingRequiredError(GrammarError):
    """The final function card may not be rejected for this session."""


class InvalidStoryError(GrammarError):
    """A story document violates a story invariant (names the invariant)."""


# ---------------------------------------------------------------------------
# Catalog types


@dataclass(frozen=True)
class FunctionCard:
    """One narrative function, presented as a card with title and explanation."""

    id: int
    title: str
    description: str

    def __post_init__(self) -> None:
        if self.id < 1:
            raise CatalogValidationError(f"function id must be >= 1, got {self.id}")
        if not self.title.strip():
            raise CatalogValidationError(f"function {self.id}: title is empty")
        if not self.description.strip():
            raise CatalogValidationError(f"function {self.id}: description is empty")


@dataclass(frozen=True)
class Character:
    id: int
    name: str

    def __post_init__(self) -> None:
        if self.id < 1:
            raise CatalogValidationError(f"character id must be >= 1, got {self.id}")
        if not self.name.strip():
            raise CatalogValidationError(f"character {self.id}: name is empty")


@dataclass(frozen=True)
class InitialSituation:
    id: int
    title: str
    description: str
    image_ref: str = ""

    def __post_init__(self) -> None:
        if self.id < 1:
            raise CatalogValidationError(f"situation id must be >= 1, got {self.id}")
        if not self.title.strip():
            raise CatalogValidationError(f"situation {self.id}: title is empty")


@dataclass(frozen=True)
class Catalog:
    """Versioned content pack: function cards, characters and situations.

    Function ids must be contiguous 1..N in order; the shipped pack and every
    pack accepted by :func:`load_catalog` has N = 31 exactly. Tests may build
    smaller packs directly to keep exhaustive path enumeration tractable.
    """

    schema_version: int
    catalog_version: str
    functions: tuple[FunctionCard, ...]
    characters: tuple[Character, ...]
    situations: tuple[InitialSituation, ...]

    def __post_init__(self) -> None:
        for index, card in enumerate(self.functions, start=1):
            if card.id != index:
                raise CatalogValidationError(
                    f"function ids must be 1..{len(self.functions)} in order; "
                    f"position {index} has id {card.id}"
                )

    @property
    def last_function_id(self) -> int:
        return len(self.functions)

    def function(self, function_id: int) -> FunctionCard:
        if not 1 <= function_id <= len(self.functions):
            raise UnknownFunctionError(f"unknown function id {function_id}")
        return self.functions[function_id - 1]

    def has_function(self, function_id: int) -> bool:
        return 1 <= function_id <= len(self.functions)

    def character(self, character_id: int) -> Character:
        for ch in self.characters:
            if ch.id == character_id:
                return ch
        raise UnknownCharacterError(f"unknown character id {character_id}")

    def situation(self, situation_id: int) -> InitialSituation:
        for st in self.situations:
            if st.id == situation_id:
                return st
        raise UnknownSituationError(f"unknown situation id {situation_id}")


def catalog_from_dict(doc: dict) -> Catalog:
    """Build and fully validate a Catalog from a parsed catalog document."""

    if not isinstance(doc, dict):
        raise CatalogParseError("catalog document must be an object")
    try:
        schema_version = int(doc["schema_version"])
        catalog_version = str(doc["catalog_version"])
        raw_functions = doc["functions"]
        raw_characters = doc["characters"]
        raw_situations = doc["situations"]
    except (KeyError, TypeError, ValueError) as exc:
        raise CatalogParseError(f"catalog document missing or malformed field: {exc}") from exc

    if not isinstance(raw_functions, list) or not isinstance(raw_characters, list) \
            or not isinstance(raw_situations, list):
        raise CatalogParseError("functions, characters and situations must be arrays")

    try:
        functions = tuple(
            FunctionCard(id=int(f["id"]), title=str(f["title"]), description=str(f["description"]))
            for f in raw_functions
        )
        characters = tuple(
            Character(id=int(c["id"]), name=str(c["name"])) for c in raw_characters
        )
        situations = tuple(
            InitialSituation(
                id=int(s["id"]),
                title=str(s["title"]),
                description=str(s.get("description", "")),
                image_ref=str(s.get("image", "")),
            )
            for s in raw_situations
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise CatalogParseError(f"malformed catalog entry: {exc}") from exc

    if len(functions) != FUNCTION_COUNT:
        raise CatalogValidationError(
            f"catalog must contain exactly {FUNCTION_COUNT} functions, got {len(functions)}"
        )
    if len(characters) < 2:
        raise CatalogValidationError("catalog must contain at least 2 characters")
    if len(situations) < 2:
        raise CatalogValidationError("catalog must contain at least 2 situations")
    _require_unique_ids("character", (c.id for c in characters))
    _require_unique_ids("situation", (s.id for s in situations))

    return Catalog(
        schema_version=schema_version,
        catalog_version=catalog_version,
        functions=functions,
        characters=characters,
        situations=situations,
    )


def _require_unique_ids(kind: str, ids: Iterable[int]) -> None:
    seen: set[int] = set()
    for value in ids:
        if value in seen:
            raise CatalogValidationError(f"duplicate {kind} id {value}")
        seen.add(value)


def load_catalog(raw: bytes | str) -> Catalog:
    """Parse and validate a catalog file (UTF-8 JSON)."""

    if isinstance(raw, bytes):
        try:
            raw = raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise CatalogParseError(f"catalog is not valid UTF-8: {exc}") from exc
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise CatalogParseError(f"catalog is not valid JSON: {exc}") from exc
    return catalog_from_dict(doc)


def catalog_to_dict(catalog: Catalog) -> dict:
    """Serialize a Catalog back to the catalog document shape."""

    return {
        "schema_version": catalog.schema_version,
        "catalog_version": catalog.catalog_version,
        "functions": [
            {"id": f.id, "title": f.title, "description": f.description}
            for f in catalog.functions
        ],
        "characters": [{"id": c.id, "name": c.name} for c in catalog.characters],
        "situations": [
            {"id": s.id, "title": s.title, "description": s.description, "image": s.image_ref}
            for s in catalog.situations
        ],
    }


def default_catalog_bytes() -> bytes:
    """Raw bytes of the content pack shipped with the package."""

    return resources.files("cuentoterapp.data").joinpath("default_catalog.json").read_bytes()


def default_catalog() -> Catalog:
    return load_catalog(default_catalog_bytes())


# ---------------------------------------------------------------------------
# Canonical-order validation


@dataclass(frozen=True)
class SequenceViolation:
    """First position at which a function-id sequence breaks canonical order."""

    position: int


def validate_sequence(
    catalog: Catalog, function_ids: Sequence[int]
) -> SequenceViolation | None:
    """Check that ``function_ids`` is a strictly increasing subsequence of the catalog.

    Returns None when valid, otherwise the first offending position. Raises
    UnknownFunctionError for ids outside the catalog altogether.
    """

    for fid in function_ids:
        if not catalog.has_function(fid):
            raise UnknownFunctionError(f"unknown function id {fid}")
    previous = 0
    for position, fid in enumerate(function_ids):
        if fid <= previous:
            return SequenceViolation(position=position)
        previous = fid
    return None


# ---------------------------------------------------------------------------
# Session state machine


class Phase(Enum):
    SITUATION_CHOICE = "situation_choice"
    CHARACTER_CHOICE = "character_choice"
    FUNCTION_CARDS = "function_cards"
    TITLE_ENTRY = "title_entry"
    DONE = "done"


class DecisionKind(Enum):
    UNSEEN = "unseen"
    WRITTEN = "written"
    REJECTED = "rejected"


@dataclass(frozen=True)
class CardDecision:
    kind: DecisionKind
    text: str | None = None


_UNSEEN = CardDecision(DecisionKind.UNSEEN)


@dataclass(frozen=True)
class SessionConfig:
    """Per-session knobs. ``require_ending`` forbids rejecting the final card."""

    require_ending: bool = False


class TitlePrompt:
    """Marker returned by current_card once every function card is resolved."""

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return "TitlePrompt()"


TITLE_PROMPT = TitlePrompt()


@dataclass(frozen=True)
class StorySession:
    """One guided creation run. Operations return successor sessions."""

    catalog: Catalog
    config: SessionConfig
    phase: Phase
    situation_id: int | None
    character_ids: tuple[int, ...]
    decisions: tuple[CardDecision, ...]
    cursor: int
    title: str | None


def new_session(catalog: Catalog, config: SessionConfig | None = None) -> StorySession:
    """Start a fresh session: situation choice first, all cards unseen."""

    return StorySession(
        catalog=catalog,
        config=config or SessionConfig(),
        phase=Phase.SITUATION_CHOICE,
        situation_id=None,
        character_ids=(),
        decisions=(_UNSEEN,) * len(catalog.functions),
        cursor=1,
        title=None,
    )


def _require_phase(session: StorySession, *allowed: Phase) -> None:
    if session.phase not in allowed:
        names = " or ".join(p.value for p in allowed)
        raise WrongPhaseError(f"operation requires phase {names}, session is in {session.phase.value}")


def choose_situation(session: StorySession, situation_id: int) -> StorySession:
    _require_phase(session, Phase.SITUATION_CHOICE)
    session.catalog.situation(situation_id)  # raises UnknownSituationError
    return replace(session, situation_id=situation_id, phase=Phase.CHARACTER_CHOICE)


def choose_characters(session: StorySession, character_ids: Sequence[int]) -> StorySession:
    _require_phase(session, Phase.CHARACTER_CHOICE)
    if not character_ids:
        raise EmptySelectionError("a story needs at least one character")
    seen: set[int] = set()
    for cid in character_ids:
        if cid in seen:
            raise DuplicateCharacterError(f"character id {cid} selected twice")
        seen.add(cid)
        session.catalog.character(cid)  # raises UnknownCharacterError
    return replace(
        session,
        character_ids=tuple(character_ids),
        phase=Phase.FUNCTION_CARDS,
        cursor=1,
    )


def current_card(session: StorySession) -> FunctionCard | TitlePrompt:
    """The card at the cursor, or the title prompt once all cards are resolved."""

    _require_phase(session, Phase.FUNCTION_CARDS, Phase.TITLE_ENTRY)
    if session.phase is Phase.TITLE_ENTRY:
        return TITLE_PROMPT
    return session.catalog.function(session.cursor)


def _advance(session: StorySession, decision: CardDecision) -> StorySession:
    index = session.cursor - 1
    decisions = session.decisions[:index] + (decision,) + session.decisions[index + 1:]
    cursor = session.cursor + 1
    phase = Phase.TITLE_ENTRY if cursor > session.catalog.last_function_id else Phase.FUNCTION_CARDS
    return replace(session, decisions=decisions, cursor=cursor, phase=phase)


def write_fragment(session: StorySession, text: str) -> StorySession:
    """Commit text for the current card and advance to the next one."""

    _require_phase(session, Phase.FUNCTION_CARDS)
    if not text.strip():
        raise EmptyTextError("fragment text is empty")
    return _advance(session, CardDecision(DecisionKind.WRITTEN, text))


def reject_card(session: StorySession) -> StorySession:
    """Skip the current card. The final card cannot be skipped under require_ending."""

    _require_phase(session, Phase.FUNCTION_CARDS)
    if session.config.require_ending and session.cursor == session.catalog.last_function_id:
        raise EndingRequiredError("the final function card is mandatory for this session")
    return _advance(session, CardDecision(DecisionKind.REJECTED))


def set_title(session: StorySession, title: str) -> StorySession:
    _require_phase(session, Phase.TITLE_ENTRY)
    title = title.strip()
    if not title:
        raise EmptyTitleError("story title is empty")
    return replace(session, title=title, phase=Phase.DONE)


def utc_now_iso() -> str:
    """Current UTC time as ISO-8601 with seconds precision (sortable text)."""

    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def finalize(
    session: StorySession,
    clock: Callable[[], str] | None = None,
    id_source: Callable[[], str] | None = None,
) -> Story:
    """Turn a completed session into an immutable Story document."""

    _require_phase(session, Phase.DONE)
    fragments = tuple(
        StoryFragment(function_id=index + 1, text=decision.text or "")
        for index, decision in enumerate(session.decisions)
        if decision.kind is DecisionKind.WRITTEN
    )
    assert session.situation_id is not None and session.title is not None
    return Story(
        id=(id_source or (lambda: str(uuid.uuid4())))(),
        title=session.title,
        situation_id=session.situation_id,
        character_ids=session.character_ids,
        fragments=fragments,
        created_at=(clock or utc_now_iso)(),
        finalized=True,
    )


# ---------------------------------------------------------------------------
# Story document


@dataclass(frozen=True)
class StoryFragment:
    function_id: int
    text: str


@dataclass(frozen=True)
class Story:
    id: str
    title: str
    situation_id: int
    character_ids: tuple[int, ...]
    fragments: tuple[StoryFragment, ...]
    created_at: str
    finalized: bool = True


STORY_SCHEMA_VERSION = 1


def validate_story(story: Story, catalog: Catalog | None = None) -> None:
    """Raise InvalidStoryError naming the first violated story invariant."""

    try:
        parsed = uuid.UUID(story.id)
    except (ValueError, AttributeError, TypeError) as exc:
        raise InvalidStoryError(f"id: not a valid UUID: {story.id!r}") from exc
    if parsed.version != 4:
        raise InvalidStoryError(f"id: must be UUID version 4, got version {parsed.version}")
    if story.finalized and not story.title.strip():
        raise InvalidStoryError("title: must be non-empty when finalized")
    if not story.character_ids:
        raise InvalidStoryError("character_ids: must be non-empty")
    if len(set(story.character_ids)) != len(story.character_ids):
        raise InvalidStoryError("character_ids: must be duplicate-free")
    for fragment in story.fragments:
        if not fragment.text.strip():
            raise InvalidStoryError(
                f"fragments: text for function {fragment.function_id} is empty"
            )
    ids = [f.function_id for f in story.fragments]
    if catalog is not None:
        try:
            violation = validate_sequence(catalog, ids)
        except UnknownFunctionError as exc:
            raise InvalidStoryError(f"fragments: {exc}") from exc
        for cid in story.character_ids:
            try:
                catalog.character(cid)
            except UnknownCharacterError as exc:
                raise InvalidStoryError(f"character_ids: {exc}") from exc
        try:
            catalog.situation(story.situation_id)
        except UnknownSituationError as exc:
            raise InvalidStoryError(f"situation_id: {exc}") from exc
    else:
        violation = None
        previous = 0
        for position, fid in enumerate(ids):
            if fid < 1:
                raise InvalidStoryError(f"fragments: function id {fid} is not positive")
            if fid <= previous:
                violation = SequenceViolation(position)
                break
            previous = fid
    if violation is not None:
        raise InvalidStoryError(
            "fragments: function ids must be strictly increasing "
            f"(violation at position {violation.position})"
        )
    try:
        datetime.strptime(story.created_at, "%Y-%m-%dT%H:%M:%SZ")
    except (ValueError, TypeError) as exc:
        raise InvalidStoryError(
            f"created_at: must be ISO-8601 UTC with seconds precision, got {story.created_at!r}"
        ) from exc


def story_to_dict(story: Story) -> dict:
    """Serialize to the story document shape used on disk and on the wire."""

    return {
        "schema_version": STORY_SCHEMA_VERSION,
        "id": story.id,
        "title": story.title,
        "situation_id": story.situation_id,
        "character_ids": list(story.character_ids),
        "fragments": [
            {"function_id": f.function_id, "text": f.text} for f in story.fragments
        ],
        "created_at": story.created_at,
        "finalized": story.finalized,
    }


def story_from_dict(doc: dict, catalog: Catalog | None = None) -> Story:
    """Parse a story document, validating every story invariant."""

    if not isinstance(doc, dict):
        raise InvalidStoryError("story document must be an object")
    if "schema_version" in doc and doc["schema_version"] != STORY_SCHEMA_VERSION:
        raise InvalidStoryError(
            f"schema_version: expected {STORY_SCHEMA_VERSION}, got {doc['schema_version']!r}"
        )

    def _str_field(name: str) -> str:
        value = doc.get(name)
        if not isinstance(value, str):
            raise InvalidStoryError(f"{name}: must be a string")
        return value

    def _int_field(name: str, value: object) -> int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise InvalidStoryError(f"{name}: must be an integer")
        return value

    raw_characters = doc.get("character_ids")
    if not isinstance(raw_characters, list):
        raise InvalidStoryError("character_ids: must be an array")
    raw_fragments = doc.get("fragments")
    if not isinstance(raw_fragments, list):
        raise InvalidStoryError("fragments: must be an array")
    fragments = []
    for entry in raw_fragments:
        if not isinstance(entry, dict) or "function_id" not in entry or "text" not in entry:
            raise InvalidStoryError("fragments: each entry needs function_id and text")
        if not isinstance(entry["text"], str):
            raise InvalidStoryError("fragments: text must be a string")
        fragments.append(
            StoryFragment(
                function_id=_int_field("fragments.function_id", entry["function_id"]),
                text=entry["text"],
            )
        )
    finalized = doc.get("finalized", True)
    if not isinstance(finalized, bool):
        raise InvalidStoryError("finalized: must be a boolean")

    story = Story(
        id=_str_field("id"),
        title=_str_field("title"),
        situation_id=_int_field("situation_id", doc.get("situation_id")),
        character_ids=tuple(_int_field("character_ids", c) for c in raw_characters),
        fragments=tuple(fragments),
        created_at=_str_field("created_at"),
        finalized=finalized,
    )
    validate_story(story, catalog)
    return story
