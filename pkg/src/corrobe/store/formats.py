"""Shared conventions for the line-delimited record files.

Every text artifact starts with a JSON header line carrying a magic string
and a format version so stale or foreign files fail loudly at load time.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable

from ..errors import FormatError


def write_records(path: Path, magic: str, version: int, records: Iterable[dict], extra_header: dict | None = None) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header = {"magic": magic, "version": version}
    if extra_header:
        header.update(extra_header)
    tmp = path.with_suffix(path.suffix + ".tmp")
    with tmp.open("w") as f:
        f.write(json.dumps(header, sort_keys=True) + "\n")
        for rec in records:
            f.write(json.dumps(rec, sort_keys=True) + "\n")
    tmp.replace(path)


def read_records(path: Path, magic: str, version: int) -> tuple[dict, list[dict]]:
    path = Path(path)
    if not path.exists():
        raise FormatError("file does not exist", path=str(path))
    records = []
    header = None
    with path.open() as f:
        for ln, raw in enumerate(f, start=1):
            raw = raw.strip()
            if not raw:
                continue
            try:
                obj = json.loads(raw)
            except json.JSONDecodeError as e:
                raise FormatError(f"malformed JSON record: {e}", path=str(path), line=ln) from e
            if header is None:
                header = obj
                if header.get("magic") != magic:
                    raise FormatError(
                        f"wrong magic {header.get('magic')!r}, expected {magic!r}",
                        path=str(path), line=1,
                    )
                if header.get("version") != version:
                    raise FormatError(
                        f"unsupported version {header.get('version')!r}, expected {version}",
                        path=str(path), line=1,
                    )
                continue
            records.append(obj)
    if header is None:
        raise FormatError("file is empty (missing header record)", path=str(path))
    return header, records
