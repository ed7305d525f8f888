"""Run cache using msgpack, keyed by a hash of everything that determines a run."""

from __future__ import annotations

import hashlib
import json
import logging
from datetime import datetime, timedelta
from pathlib import Path
from typing import Any

import msgpack

logger = logging.getLogger(__name__)

DEFAULT_CACHE_DIR = Path.home() / ".cache" / "tsac" / "runs"


def cache_key(payload: Any) -> str:
    """SHA-256 of the canonical JSON of payload."""
    canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


class CacheManager:
    """Stores finished episodes as msgpack files."""

    def __init__(self, cache_dir: Path | None = None):
        """
        Args:
            cache_dir: Directory to store cache files.
                      Defaults to ~/.cache/tsac/runs/
        """
        self.cache_dir = cache_dir or DEFAULT_CACHE_DIR
        self.cache_dir.mkdir(parents=True, exist_ok=True)

    def _get_cache_path(self, key: str) -> Path:
        return self.cache_dir / f"{key}.msgpack"

    def _get_metadata_path(self, key: str) -> Path:
        return self.cache_dir / f"{key}.meta"

    def set(self, key: str, data: Any) -> None:
        """
        Store data in cache.

        Args:
            key: Cache key (filename without extension).
            data: Data to cache. Must be msgpack-serializable.
        """
        cache_path = self._get_cache_path(key)
        tmp_path = cache_path.with_suffix(".msgpack.tmp")

        with open(tmp_path, "wb") as f:
            f.write(msgpack.packb(data, use_bin_type=True))
        tmp_path.replace(cache_path)

        with open(self._get_metadata_path(key), "w") as f:
            f.write(str(datetime.now().timestamp()))

    def get(self, key: str) -> Any | None:
        """Cached data, or None when missing or unreadable."""
        cache_path = self._get_cache_path(key)
        if not cache_path.exists():
            return None

        try:
            with open(cache_path, "rb") as f:
                data = msgpack.unpackb(f.read(), raw=False)
        except (msgpack.exceptions.UnpackException, ValueError, OSError):
            logger.warning("Ignoring unreadable cache entry %s", key)
            return None

        logger.debug("Cache hit %s", key)
        return data

    def get_age(self, key: str) -> timedelta | None:
        meta_path = self._get_metadata_path(key)
        if not meta_path.exists():
            return None

        try:
            with open(meta_path, "r") as f:
                timestamp = float(f.read().strip())
            return datetime.now() - datetime.fromtimestamp(timestamp)
        except (ValueError, OSError):
            return None

    def is_stale(self, key: str, max_age: timedelta) -> bool:
        """True if the entry is older than max_age or missing."""
        age = self.get_age(key)
        return age is None or age > max_age

    def delete(self, key: str) -> bool:
        """
        Delete a cache entry.

        Returns:
            True if deleted, False if it didn't exist.
        """
        cache_path = self._get_cache_path(key)
        deleted = cache_path.exists()
        cache_path.unlink(missing_ok=True)
        self._get_metadata_path(key).unlink(missing_ok=True)
        return deleted

    def clear(self) -> int:
        """
        Clear all cache entries.

        Returns:
            Number of cache entries deleted.
        """
        count = 0
        for path in self.cache_dir.glob("*.msgpack"):
            path.unlink()
            count += 1
        for path in self.cache_dir.glob("*.meta"):
            path.unlink()
        return count

    def list_keys(self) -> list[str]:
        return [path.stem for path in self.cache_dir.glob("*.msgpack")]
