"""Results cache: computed stage outputs, content-addressed by config hash.

Layout: {root}/{stage}/{corruption_key}/{config_hash}.jsonl. A changed
pipeline configuration changes the hash, so stale results read as misses and
are never silently reused. Writes go through a temp file and atomic rename
(single writer, many readers).
"""

from __future__ import annotations

import json
import re
from pathlib import Path
from typing import Iterable

from ..errors import InputError

CACHE_MAGIC = "corrobe-results-cache"
CACHE_VERSION = 1

_SAFE = re.compile(r"^[A-Za-z0-9._@-]+$")


def _check_component(name: str, what: str) -> str:
    if not _SAFE.match(name):
        raise InputError(f"unsafe {what} for cache path: {name!r}")
    return name


class ResultsCache:
    def __init__(self, root: Path):
        self.root = Path(root)

    def _path(self, stage: str, corruption_key: str, config_hash: str) -> Path:
        return (
            self.root
            / _check_component(stage, "stage")
            / _check_component(corruption_key, "corruption key")
            / f"{_check_component(config_hash, 'config hash')}.jsonl"
        )

    def put(
        self,
        stage: str,
        corruption_key: str,
        config_hash: str,
        records: Iterable[dict],
        meta: dict | None = None,
    ) -> Path:
        path = self._path(stage, corruption_key, config_hash)
        path.parent.mkdir(parents=True, exist_ok=True)
        header = {
            "magic": CACHE_MAGIC,
            "version": CACHE_VERSION,
            "stage": stage,
            "corruption_key": corruption_key,
            "config_hash": config_hash,
        }
        if meta:
            header["meta"] = meta
        tmp = path.with_suffix(".tmp")
        with tmp.open("w") as f:
            f.write(json.dumps(header, sort_keys=True) + "\n")
            for rec in records:
                f.write(json.dumps(rec, sort_keys=True) + "\n")
        tmp.replace(path)
        return path

    def get(self, stage: str, corruption_key: str, config_hash: str) -> tuple[dict, list[dict]] | None:
        """Stored (header, records), or None on miss (including hash mismatch)."""
        path = self._path(stage, corruption_key, config_hash)
        if not path.exists():
            return None
        lines = path.read_text().splitlines()
        if not lines:
            return None
        header = json.loads(lines[0])
        if (
            header.get("magic") != CACHE_MAGIC
            or header.get("version") != CACHE_VERSION
            or header.get("config_hash") != config_hash
        ):
            return None  # never silently reuse mismatched content
        return header, [json.loads(line) for line in lines[1:]]

    def has(self, stage: str, corruption_key: str, config_hash: str) -> bool:
        return self.get(stage, corruption_key, config_hash) is not None
