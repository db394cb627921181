"""
Exact-result cache.

Provides hash-based caching so exhaustive oracle results are computed once.
Cache key is based on: quantity + degrees + L set + any extra parameters.
Values are stored as strings so big integers and rationals round-trip exactly.
"""

import hashlib
import json
import os
import time
from contextlib import contextmanager
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, Iterable, Iterator, List, Optional, Union

ExactValue = Union[int, Fraction]


class ExactResultCache:
    """Manages cached oracle results on disk."""

    def __init__(self, cache_dir: Optional[str] = None):
        """
        Initialize the cache.

        Args:
            cache_dir: Directory to store cached results. Defaults to ./cache
        """
        self.cache_dir = Path(cache_dir or os.getenv("CACHE_DIRECTORY", "./cache"))
        self.cache_dir.mkdir(parents=True, exist_ok=True)

        self.metadata_file = self.cache_dir / "metadata.json"
        if not self.metadata_file.exists():
            self.metadata_file.write_text("{}", encoding="utf-8")

    def generate_cache_key(
        self, quantity: str, degrees: Iterable[int], left: Iterable[int] = (), extra: str = ""
    ) -> str:
        """
        Generate a unique cache key for an oracle query.

        Args:
            quantity: Name of the computed quantity (e.g. 'g', 'g_bgraph')
            degrees: Degree sequence
            left: L vertices (0-based)
            extra: Any further parameters, already rendered as text

        Returns:
            MD5 hash as cache key
        """
        cache_string = "|".join(
            [quantity, ",".join(map(str, degrees)), ",".join(map(str, sorted(left))), extra]
        )
        return hashlib.md5(cache_string.encode("utf-8")).hexdigest()

    def _entry_file(self, cache_key: str) -> Path:
        return self.cache_dir / f"{cache_key}.json"

    def _entry_files(self) -> List[Path]:
        return [path for path in self.cache_dir.glob("*.json") if path != self.metadata_file]

    def exists(self, cache_key: str) -> bool:
        """Check if a cached result exists for the given key."""
        return self._entry_file(cache_key).exists()

    def get(self, cache_key: str) -> Optional[ExactValue]:
        """
        Retrieve a cached result.

        Args:
            cache_key: Cache key from generate_cache_key()

        Returns:
            The int or Fraction stored, or None if not found
        """
        try:
            entry = json.loads(self._entry_file(cache_key).read_text(encoding="utf-8"))
        except (FileNotFoundError, json.JSONDecodeError):
            return None
        with self._metadata() as metadata:
            metadata["cache_hits"] = metadata.get("cache_hits", 0) + 1
        return self._decode(entry["value"])

    def put(self, cache_key: str, value: ExactValue, metadata: Optional[Dict[str, Any]] = None) -> str:
        """
        Store a result in the cache.

        Args:
            cache_key: Cache key from generate_cache_key()
            value: Exact integer or rational
            metadata: Additional metadata (quantity, instance, ...)

        Returns:
            Path to the cache entry
        """
        entry_file = self._entry_file(cache_key)
        entry_file.write_text(json.dumps({"value": str(value)}), encoding="utf-8")
        with self._metadata() as index:
            index.setdefault("entries", {})[cache_key] = {**(metadata or {}), "created_at": time.time()}
        return str(entry_file)

    def clear(self) -> int:
        """
        Clear all cached entries.

        Returns:
            Number of entries deleted
        """
        entries = self._entry_files()
        for entry_file in entries:
            entry_file.unlink(missing_ok=True)
        with self._metadata() as metadata:
            metadata.clear()
        return len(entries)

    def get_stats(self) -> Dict[str, Any]:
        """
        Get cache statistics.

        Returns:
            Dictionary with cache stats
        """
        metadata = self._read_metadata()
        entries = self._entry_files()
        return {
            "total_entries": len(entries),
            "total_size_kb": round(sum(f.stat().st_size for f in entries) / 1024, 2),
            "cache_hits": metadata.get("cache_hits", 0),
        }

    @staticmethod
    def _decode(text: str) -> ExactValue:
        value = Fraction(text)
        return value.numerator if value.denominator == 1 else value

    def _read_metadata(self) -> Dict[str, Any]:
        try:
            return json.loads(self.metadata_file.read_text(encoding="utf-8"))
        except (FileNotFoundError, json.JSONDecodeError):
            return {}

    @contextmanager
    def _metadata(self) -> Iterator[Dict[str, Any]]:
        """Yield metadata.json as a dict; changes are written back on exit."""
        metadata = self._read_metadata()
        yield metadata
        self.metadata_file.write_text(json.dumps(metadata, indent=2), encoding="utf-8")
