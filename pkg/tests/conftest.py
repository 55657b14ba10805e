from __future__ import annotations

import uuid

import pytest

from cuentoterapp import grammar
from cuentoterapp.grammar import (
    Catalog,
    Character,
    FunctionCard,
    InitialSituation,
    Story,
    StoryFragment,
)


@pytest.fixture(scope="session")
def default_cat() -> Catalog:
    return grammar.default_catalog()


def make_small_catalog(function_count: int = 5) -> Catalog:
    """A tiny catalog for exhaustive path enumeration (bypasses the 31-card load rule)."""

    return Catalog(
        schema_version=1,
        catalog_version=f"test-{function_count}",
        functions=tuple(
            FunctionCard(id=i, title=f"Step {i}", description=f"What happens at step {i}.")
            for i in range(1, function_count + 1)
        ),
        characters=(Character(1, "Prince"), Character(2, "Donkey")),
        situations=(
            InitialSituation(1, "A forest", "Trees all around."),
            InitialSituation(2, "A castle", "Stone walls and towers."),
        ),
    )


@pytest.fixture
def small_cat() -> Catalog:
    return make_small_catalog()


def make_story(
    fragment_ids: tuple[int, ...] = (1, 3, 10, 19),
    title: str = "Wonderful Story",
    situation_id: int = 1,
    character_ids: tuple[int, ...] = (1, 3),
    created_at: str = "2024-01-31T10:00:00Z",
    story_id: str | None = None,
    text_for: dict[int, str] | None = None,
) -> Story:
    texts = text_for or {}
    return Story(
        id=story_id or str(uuid.uuid4()),
        title=title,
        situation_id=situation_id,
        character_ids=character_ids,
        fragments=tuple(
            StoryFragment(fid, texts.get(fid, f"Fragment for step {fid}."))
            for fid in fragment_ids
        ),
        created_at=created_at,
        finalized=True,
    )
