"""Scene-graph files: ingestion surface for externally parsed graphs.

Line-delimited JSON after the header:

    {"id": "...", "corruption_key": "clean",
     "tuples": [["car"], ["car", "gray"], ["car", "on", "street"]]}
"""

from __future__ import annotations

from pathlib import Path
from typing import Iterable, Mapping

from ..errors import FormatError
from ..sg import SceneGraph, SgTuple, Source
from .formats import read_records, write_records

SG_MAGIC = "corrobe-scene-graphs"
SG_VERSION = 1


def load_scene_graphs(path: Path) -> dict[tuple[str, str], SceneGraph]:
    """Map (instance id, corruption key) -> scene graph."""
    header, records = read_records(Path(path), SG_MAGIC, SG_VERSION)
    out: dict[tuple[str, str], SceneGraph] = {}
    for ln, rec in enumerate(records, start=2):
        try:
            key = (str(rec["id"]), str(rec["corruption_key"]))
            tuples = [SgTuple.from_list(parts) for parts in rec["tuples"]]
        except Exception as e:
            raise FormatError(f"bad scene-graph record: {e}", path=str(path), line=ln) from e
        if key in out:
            raise FormatError(f"duplicate scene graph for {key}", path=str(path), line=ln)
        out[key] = SceneGraph.of(tuples, Source.CANDIDATE)
    return out


def save_scene_graphs(graphs: Mapping[tuple[str, str], SceneGraph] | Iterable, path: Path) -> None:
    items = graphs.items() if isinstance(graphs, Mapping) else graphs
    write_records(
        Path(path),
        SG_MAGIC,
        SG_VERSION,
        (
            {
                "id": iid,
                "corruption_key": key,
                "tuples": sorted(t.to_list() for t in sg.tuples),
            }
            for (iid, key), sg in items
        ),
    )
