"""Dataset manifest: the instance table driving every pipeline stage.

Line-delimited JSON; one record per instance:

    {"image_id": "...", "image_path": "...",
     "ground_truths": ["...", ...],              # at least one
     "captions": {"clean": "...", "snow_4": "...", ...}}  # at least "clean"
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from ..errors import FormatError
from .formats import read_records, write_records

logger = logging.getLogger(__name__)

MANIFEST_MAGIC = "corrobe-dataset-manifest"
MANIFEST_VERSION = 1

CLEAN_KEY = "clean"


@dataclass(frozen=True)
class InstanceRecord:
    image_id: str
    image_path: str
    ground_truths: tuple[str, ...]
    captions: dict[str, str]


@dataclass(frozen=True)
class DatasetManifest:
    instances: tuple[InstanceRecord, ...]
    path: str | None = None

    def __len__(self) -> int:
        return len(self.instances)

    def __iter__(self):
        return iter(self.instances)

    def by_id(self, image_id: str) -> InstanceRecord | None:
        return self._index().get(image_id)

    def _index(self) -> dict[str, InstanceRecord]:
        if not hasattr(self, "_idx"):
            object.__setattr__(self, "_idx", {r.image_id: r for r in self.instances})
        return self._idx  # type: ignore[attr-defined]

    def caption_keys(self) -> list[str]:
        keys = set()
        for r in self.instances:
            keys.update(r.captions.keys())
        return sorted(keys)

    def max_ground_truths(self) -> int:
        return max(len(r.ground_truths) for r in self.instances)


def _validate_record(obj: dict, line: int, path: str) -> InstanceRecord:
    for field_name in ("image_id", "image_path", "ground_truths", "captions"):
        if field_name not in obj:
            raise FormatError(f"record missing field {field_name!r}", path=path, line=line)
    gts = obj["ground_truths"]
    if not isinstance(gts, list) or not gts or not all(isinstance(g, str) and g.strip() for g in gts):
        raise FormatError("ground_truths must be a non-empty list of sentences", path=path, line=line)
    caps = obj["captions"]
    if not isinstance(caps, dict) or CLEAN_KEY not in caps:
        raise FormatError(f"captions must be a map containing {CLEAN_KEY!r}", path=path, line=line)
    return InstanceRecord(
        image_id=str(obj["image_id"]),
        image_path=str(obj["image_path"]),
        ground_truths=tuple(gts),
        captions={str(k): str(v) for k, v in caps.items()},
    )


def load_manifest(path: Path) -> DatasetManifest:
    """Load and validate a manifest; duplicate ids or missing GTs reject loudly."""
    path = Path(path)
    header, raw = read_records(path, MANIFEST_MAGIC, MANIFEST_VERSION)
    instances = []
    seen: dict[str, int] = {}
    for ln, obj in enumerate(raw, start=2):  # header occupies line 1
        rec = _validate_record(obj, ln, str(path))
        if rec.image_id in seen:
            raise FormatError(
                f"duplicate image_id {rec.image_id!r} (first seen on line {seen[rec.image_id]})",
                path=str(path), line=ln,
            )
        seen[rec.image_id] = ln
        instances.append(rec)
    if not instances:
        raise FormatError("manifest has no instances", path=str(path))
    return DatasetManifest(instances=tuple(instances), path=str(path))


def save_manifest(manifest: DatasetManifest | Iterable[InstanceRecord], path: Path) -> None:
    instances = manifest.instances if isinstance(manifest, DatasetManifest) else tuple(manifest)
    write_records(
        Path(path),
        MANIFEST_MAGIC,
        MANIFEST_VERSION,
        (
            {
                "image_id": r.image_id,
                "image_path": r.image_path,
                "ground_truths": list(r.ground_truths),
                "captions": r.captions,
            }
            for r in instances
        ),
    )
