"""Batch corruption of whole datasets.

Output layout: {output_dir}/{spec.key}/{image_id}.png — always a lossless
container, even for jpeg_compression results (those are decoded back to
raster before saving). Items are independent, so workers can process them in
any order without changing a single output byte.
"""

from __future__ import annotations

import logging
import re
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from ..errors import InputError
from ..store.manifest import DatasetManifest
from .engine import RgbImage, corrupt
from .specs import CorruptionSpec, ParamTable, load_params

logger = logging.getLogger(__name__)

_SAFE_ID = re.compile(r"^[A-Za-z0-9._-]+$")


@dataclass
class CorruptionRunReport:
    images: int = 0
    specs: int = 0
    files_written: int = 0
    failures: list[dict] = field(default_factory=list)
    wall_time_s: float = 0.0

    def to_dict(self) -> dict:
        return {
            "images": self.images,
            "specs": self.specs,
            "files_written": self.files_written,
            "failures": self.failures,
            "wall_time_s": self.wall_time_s,
        }


def output_path(output_dir: Path, spec_key: str, image_id: str) -> Path:
    if not _SAFE_ID.match(image_id):
        raise InputError(f"image id {image_id!r} is not filesystem-safe")
    return Path(output_dir) / spec_key / f"{image_id}.png"


def corrupt_dataset(
    manifest: DatasetManifest,
    specs: Sequence[CorruptionSpec],
    seed: int,
    output_dir: Path,
    params: ParamTable | None = None,
    workers: int = 4,
) -> CorruptionRunReport:
    """Write one PNG per (image, spec); unreadable inputs are recorded as
    per-item failures and the run continues. Unwritable output is fatal."""
    if params is None:
        params = load_params()
    output_dir = Path(output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)

    report = CorruptionRunReport(images=len(manifest), specs=len(specs))
    start = time.monotonic()

    loaded: dict[str, RgbImage | None] = {}
    for rec in manifest:
        try:
            loaded[rec.image_id] = RgbImage.from_file(rec.image_path)
        except Exception as e:
            loaded[rec.image_id] = None
            report.failures.append({"image_id": rec.image_id, "error": str(e)})
            logger.warning("skipping unreadable image %s: %s", rec.image_id, e)

    def one(item: tuple[str, CorruptionSpec]) -> int:
        image_id, spec = item
        img = loaded[image_id]
        if img is None:
            return 0
        out = corrupt(img, spec, seed, image_id=image_id, params=params)
        out.save_png(output_path(output_dir, spec.key, image_id))
        return 1

    jobs = [(rec.image_id, spec) for rec in manifest for spec in specs]
    if workers <= 1:
        results = map(one, jobs)
        report.files_written = sum(results)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            report.files_written = sum(pool.map(one, jobs))

    report.wall_time_s = time.monotonic() - start
    return report
