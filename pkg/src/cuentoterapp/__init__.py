"""Storytelling-therapy support toolkit.

A story-grammar engine built on the 31 canonical narrative functions, a
guided creation session, a crash-safe story library with PDF export, an
offline-first resource gateway, an HTTP service with an installable-web-app
contract, and the usability-metrics arithmetic used to evaluate it.
"""

from cuentoterapp.grammar import (
    Catalog,
    Character,
    FunctionCard,
    InitialSituation,
    Phase,
    SessionConfig,
    Story,
    StoryFragment,
    StorySession,
    choose_characters,
    choose_situation,
    current_card,
    default_catalog,
    finalize,
    load_catalog,
    new_session,
    reject_card,
    set_title,
    validate_sequence,
    write_fragment,
)

__version__ = "0.1.0"

__all__ = [
    "Catalog",
    "Character",
    "FunctionCard",
    "InitialSituation",
    "Phase",
    "SessionConfig",
    "Story",
    "StoryFragment",
    "StorySession",
    "choose_characters",
    "choose_situation",
    "current_card",
    "default_catalog",
    "finalize",
    "load_catalog",
    "new_session",
    "reject_card",
    "set_title",
    "validate_sequence",
    "write_fragment",
    "__version__",
]
