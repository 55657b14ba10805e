"""Durable story library: one JSON document per story, atomic writes.

Layout is deliberately boring: ``<root>/<uuid>.story.json`` with no central
index file. The index is rebuilt by scanning on open, so a crash can never
leave the index and the files disagreeing; writes go through a temp file and
an atomic rename, so a crash can never leave a torn record either.
"""

from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from cuentoterapp.grammar import Story, story_from_dict, story_to_dict, validate_story

__all__ = [
    "StoreError",
    "DuplicateIdError",
    "StoryNotFoundError",
    "CorruptFile",
    "LibraryRecord",
    "StoryLibrary",
    "open_store",
]

STORY_SUFFIX = ".story.json"


class StoreError(Exception):
    pass


class DuplicateIdError(StoreError):
    pass


class StoryNotFoundError(StoreError):
    pass


@dataclass(frozen=True)
class CorruptFile:
    """A file that could not be read as a story during a scan; skipped, not fatal."""

    path: Path
    reason: str


@dataclass(frozen=True)
class LibraryRecord:
    story: Story
    stored_at: datetime


@dataclass(frozen=True)
class _Entry:
    path: Path
    created_at: str
    stored_at: datetime


class StoryLibrary:
    """Single-writer, multi-reader story store rooted at one directory."""

    def __init__(self, root_dir: str | Path):
        self.root_dir = Path(root_dir)
        self.root_dir.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()
        self._index: dict[str, _Entry] = {}
        self.corrupt_files: tuple[CorruptFile, ...] = ()
        self._scan()

    # -- scanning ------------------------------------------------------------

    def _scan(self) -> None:
        index: dict[str, _Entry] = {}
        corrupt: list[CorruptFile] = []
        for path in sorted(self.root_dir.glob(f"*{STORY_SUFFIX}")):
            try:
                story = self._read_story_file(path)
            except (StoreError, OSError) as exc:
                corrupt.append(CorruptFile(path=path, reason=str(exc)))
                continue
            if story.id in index:
                corrupt.append(
                    CorruptFile(path=path, reason=f"duplicate story id {story.id}")
                )
                continue
            stored_at = datetime.fromtimestamp(path.stat().st_mtime, tz=timezone.utc)
            index[story.id] = _Entry(path=path, created_at=story.created_at, stored_at=stored_at)
        with self._lock:
            self._index = index
            self.corrupt_files = tuple(corrupt)

    @staticmethod
    def _read_story_file(path: Path) -> Story:
        raw = path.read_bytes()
        try:
            doc = json.loads(raw.decode("utf-8"))
            return story_from_dict(doc)
        except Exception as exc:
            raise StoreError(f"{path.name}: {exc}") from exc

    # -- operations ------------------------------------------------------------

    def save_story(self, story: Story) -> LibraryRecord:
        """Persist a story durably; the record is on disk before this returns."""

        validate_story(story)
        with self._lock:
            if story.id in self._index:
                raise DuplicateIdError(f"story id {story.id} already stored")
            path = self.root_dir / f"{story.id}{STORY_SUFFIX}"
            payload = json.dumps(story_to_dict(story), ensure_ascii=False, indent=2)
            tmp_path = self.root_dir / f".{story.id}{STORY_SUFFIX}.tmp"
            fd = os.open(tmp_path, os.O_WRONLY | os.O_CREAT | os.O_TRUNC, 0o644)
            try:
                os.write(fd, payload.encode("utf-8"))
                os.fsync(fd)
            finally:
                os.close(fd)
            os.replace(tmp_path, path)
            self._fsync_dir()
            stored_at = datetime.now(timezone.utc)
            self._index[story.id] = _Entry(
                path=path, created_at=story.created_at, stored_at=stored_at
            )
        return LibraryRecord(story=story, stored_at=stored_at)

    def list_stories(self) -> list[LibraryRecord]:
        """Every stored story, newest created_at first, ties broken by id."""

        with self._lock:
            entries = sorted(self._index.items())  # id ascending, then a stable
            entries.sort(key=lambda kv: kv[1].created_at, reverse=True)  # newest first
        records = []
        for story_id, entry in entries:
            try:
                story = self._read_story_file(entry.path)
            except (StoreError, FileNotFoundError):
                continue  # deleted or replaced concurrently
            records.append(LibraryRecord(story=story, stored_at=entry.stored_at))
        return records

    def get_story(self, story_id: str) -> Story:
        with self._lock:
            entry = self._index.get(story_id)
        if entry is None:
            raise StoryNotFoundError(f"no story with id {story_id}")
        return self._read_story_file(entry.path)

    def delete_story(self, story_id: str) -> None:
        with self._lock:
            entry = self._index.pop(story_id, None)
            if entry is None:
                raise StoryNotFoundError(f"no story with id {story_id}")
            entry.path.unlink(missing_ok=True)
            self._fsync_dir()

    def __len__(self) -> int:
        with self._lock:
            return len(self._index)

    def __contains__(self, story_id: str) -> bool:
        with self._lock:
            return story_id in self._index

    def _fsync_dir(self) -> None:
        fd = os.open(self.root_dir, os.O_RDONLY)
        try:
            os.fsync(fd)
        finally:
            os.close(fd)


def open_store(root_dir: str | Path) -> StoryLibrary:
    """Open (or create) a library directory and rebuild its index by scanning."""

    return StoryLibrary(root_dir)
