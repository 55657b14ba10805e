"""Local-first resource gateway with network fallback.

Mirrors the request-interception behaviour of a precaching service worker:
every lookup consults the cache first and touches the network only when the
resource is absent, so that after one warm pass the application keeps working
with no connectivity at all. Entries live until explicitly invalidated; there
is no TTL and no background revalidation, because content packs carry their
own version tags.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
import urllib.error
import urllib.parse
import urllib.request
from dataclasses import dataclass
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Iterable, Protocol

__all__ = [
    "GatewayError",
    "NetworkUnavailableError",
    "NetworkError",
    "OfflineMissError",
    "Origin",
    "FetchResult",
    "CacheEntryInfo",
    "WarmReport",
    "NetworkPort",
    "MemoryCacheStore",
    "DirectoryCacheStore",
    "FileNetworkPort",
    "HttpNetworkPort",
    "ResourceGateway",
]


class GatewayError(Exception):
    pass


class NetworkUnavailableError(GatewayError):
    """The network port cannot reach its origin at all."""


class NetworkError(GatewayError):
    """The origin was reachable but refused or failed the request."""


class OfflineMissError(GatewayError):
    """Nothing cached for the key and the network is unavailable."""


class Origin(Enum):
    LOCAL = "local"
    NETWORK = "network"


@dataclass(frozen=True)
class FetchResult:
    data: bytes
    origin: Origin


@dataclass(frozen=True)
class CacheEntryInfo:
    key: str
    version_tag: str
    stored_at: str


@dataclass(frozen=True)
class WarmReport:
    fetched: tuple[str, ...]
    failed: tuple[tuple[str, str], ...]  # (key, reason)


class NetworkPort(Protocol):
    """Injectable transport: returns (payload, version tag) or raises."""

    def fetch(self, key: str) -> tuple[bytes, str]: ...


def _check_key(key: str) -> str:
    if not key or any(ch.isspace() for ch in key):
        raise ValueError(f"resource key must be non-empty without whitespace: {key!r}")
    return key


def _now_iso() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


# ---------------------------------------------------------------------------
# Cache stores


class MemoryCacheStore:
    """Entry store for tests and throwaway gateways."""

    def __init__(self) -> None:
        self._entries: dict[str, tuple[bytes, str, str]] = {}
        self._lock = threading.Lock()

    def read(self, key: str) -> tuple[bytes, str, str] | None:
        with self._lock:
            return self._entries.get(key)

    def write(self, key: str, data: bytes, version_tag: str, stored_at: str) -> None:
        with self._lock:
            self._entries[key] = (data, version_tag, stored_at)

    def delete(self, key: str) -> bool:
        with self._lock:
            return self._entries.pop(key, None) is not None

    def keys(self) -> list[str]:
        with self._lock:
            return list(self._entries)


class DirectoryCacheStore:
    """Persistent entry store: one data file plus a ``.meta`` sidecar per key.

    Uses the same temp-write-then-rename discipline as the story library, so
    offline capability survives crashes and restarts.
    """

    def __init__(self, data_dir: str | Path):
        self.root = Path(data_dir) / "cache"
        self.root.mkdir(parents=True, exist_ok=True)

    def _data_path(self, key: str) -> Path:
        return self.root / urllib.parse.quote(key, safe="")

    def read(self, key: str) -> tuple[bytes, str, str] | None:
        data_path = self._data_path(key)
        meta_path = data_path.with_name(data_path.name + ".meta")
        try:
            data = data_path.read_bytes()
            meta = json.loads(meta_path.read_text("utf-8"))
            return data, str(meta["version_tag"]), str(meta["stored_at"])
        except (OSError, ValueError, KeyError):
            return None  # absent or incomplete pair counts as a miss

    def write(self, key: str, data: bytes, version_tag: str, stored_at: str) -> None:
        data_path = self._data_path(key)
        meta_path = data_path.with_name(data_path.name + ".meta")
        self._atomic_write(data_path, data)
        meta = json.dumps({"version_tag": version_tag, "stored_at": stored_at})
        self._atomic_write(meta_path, meta.encode("utf-8"))

    def delete(self, key: str) -> bool:
        data_path = self._data_path(key)
        meta_path = data_path.with_name(data_path.name + ".meta")
        existed = data_path.exists()
        data_path.unlink(missing_ok=True)
        meta_path.unlink(missing_ok=True)
        return existed

    def keys(self) -> list[str]:
        found = []
        for path in self.root.iterdir():
            if path.name.endswith(".meta") or path.name.endswith(".tmp"):
                continue
            found.append(urllib.parse.unquote(path.name))
        return found

    @staticmethod
    def _atomic_write(path: Path, data: bytes) -> None:
        tmp = path.with_name(path.name + ".tmp")
        fd = os.open(tmp, os.O_WRONLY | os.O_CREAT | os.O_TRUNC, 0o644)
        try:
            os.write(fd, data)
            os.fsync(fd)
        finally:
            os.close(fd)
        os.replace(tmp, path)


# ---------------------------------------------------------------------------
# Network ports


class FileNetworkPort:
    """Serves resources from a directory; version tags are content hashes."""

    def __init__(self, root: str | Path):
        self.root = Path(root)

    def fetch(self, key: str) -> tuple[bytes, str]:
        path = self.root / key
        try:
            data = path.read_bytes()
        except FileNotFoundError as exc:
            raise NetworkError(f"no such resource: {key}") from exc
        except OSError as exc:
            raise NetworkUnavailableError(str(exc)) from exc
        return data, hashlib.sha256(data).hexdigest()[:16]


class HttpNetworkPort:
    """Fetches resources over HTTP; version tags mirror the origin's ETag."""

    def __init__(self, base_url: str, timeout: float = 10.0):
        self.base_url = base_url.rstrip("/")
        self.timeout = timeout

    def fetch(self, key: str) -> tuple[bytes, str]:
        url = f"{self.base_url}/{key.lstrip('/')}"
        try:
            with urllib.request.urlopen(url, timeout=self.timeout) as response:
                data = response.read()
                etag = response.headers.get("ETag")
        except urllib.error.HTTPError as exc:
            raise NetworkError(f"{url}: HTTP {exc.code}") from exc
        except (urllib.error.URLError, OSError, TimeoutError) as exc:
            raise NetworkUnavailableError(f"{url}: {exc}") from exc
        return data, etag or hashlib.sha256(data).hexdigest()[:16]


# ---------------------------------------------------------------------------
# Gateway


class ResourceGateway:
    """Cache-first resolution with per-key single-flight network fetches."""

    def __init__(self, port: NetworkPort, store: MemoryCacheStore | DirectoryCacheStore | None = None):
        self.port = port
        self.store = store if store is not None else MemoryCacheStore()
        self._locks_guard = threading.Lock()
        self._key_locks: dict[str, threading.Lock] = {}

    def _key_lock(self, key: str) -> threading.Lock:
        with self._locks_guard:
            lock = self._key_locks.get(key)
            if lock is None:
                lock = threading.Lock()
                self._key_locks[key] = lock
            return lock

    def get(self, key: str) -> FetchResult:
        """Serve from cache when present; otherwise fetch, store, and serve."""

        _check_key(key)
        entry = self.store.read(key)
        if entry is not None:
            return FetchResult(data=entry[0], origin=Origin.LOCAL)
        with self._key_lock(key):
            entry = self.store.read(key)  # a concurrent fetch may have landed
            if entry is not None:
                return FetchResult(data=entry[0], origin=Origin.LOCAL)
            try:
                data, version_tag = self.port.fetch(key)
            except NetworkUnavailableError as exc:
                raise OfflineMissError(
                    f"{key}: not cached and network unavailable"
                ) from exc
            self.store.write(key, data, version_tag, _now_iso())
            return FetchResult(data=data, origin=Origin.NETWORK)

    def warm(self, keys: Iterable[str]) -> WarmReport:
        """Precache every key; failures are reported per key, never raised."""

        fetched: list[str] = []
        failed: list[tuple[str, str]] = []
        for key in keys:
            try:
                self.get(key)
            except (GatewayError, ValueError) as exc:
                failed.append((key, str(exc)))
            else:
                fetched.append(key)
        return WarmReport(fetched=tuple(fetched), failed=tuple(failed))

    def invalidate(self, key: str) -> bool:
        _check_key(key)
        return self.store.delete(key)

    def snapshot(self) -> list[CacheEntryInfo]:
        """Read-only listing of cached entries, sorted by key."""

        rows = []
        for key in sorted(self.store.keys()):
            entry = self.store.read(key)
            if entry is None:
                continue
            rows.append(CacheEntryInfo(key=key, version_tag=entry[1], stored_at=entry[2]))
        return rows
