"""Embedding tables: binary flat matrices with a text sidecar index.

`<name>.emb` layout (little-endian):

    8 bytes   magic b"CRRBEMB\\0"
    u32       format version (1)
    u32       dimension d
    u64       row count
    then      count x d float32 row-major

`<name>.idx` is plain text, one id per line, in row order. The binary layout
gives bit-exact round trips and O(1) row access for large tables.
"""

from __future__ import annotations

import struct
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

from ..errors import FormatError, InputError

EMB_MAGIC = b"CRRBEMB\x00"
EMB_VERSION = 1
_HEADER = struct.Struct("<8sIIQ")


def write_embeddings(path: Path, ids: Sequence[str], matrix: np.ndarray) -> None:
    """Write a table; `path` is the .emb file, the .idx sidecar sits next to it."""
    path = Path(path)
    mat = np.ascontiguousarray(np.asarray(matrix, dtype="<f4"))
    if mat.ndim != 2:
        raise InputError(f"embedding matrix must be 2D, got shape {mat.shape}")
    if len(ids) != mat.shape[0]:
        raise InputError(f"{len(ids)} ids but {mat.shape[0]} rows")
    if not np.all(np.isfinite(mat)):
        raise InputError("embedding matrix contains non-finite values")
    if len(set(ids)) != len(ids):
        raise InputError("duplicate ids in embedding table")
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("wb") as f:
        f.write(_HEADER.pack(EMB_MAGIC, EMB_VERSION, mat.shape[1], mat.shape[0]))
        f.write(mat.tobytes())
    path.with_suffix(".idx").write_text("".join(i + "\n" for i in ids))


class EmbeddingTable:
    """Read-only view over an .emb/.idx pair. Rows are float32, finite."""

    def __init__(self, ids: Sequence[str], matrix: np.ndarray, path: str | None = None):
        self.ids = tuple(ids)
        self.matrix = matrix
        self.path = path
        self._row = {iid: i for i, iid in enumerate(self.ids)}

    @property
    def dimension(self) -> int:
        return self.matrix.shape[1]

    def __len__(self) -> int:
        return len(self.ids)

    def __contains__(self, image_id: str) -> bool:
        return image_id in self._row

    def __iter__(self) -> Iterator[str]:
        return iter(self.ids)

    def get(self, image_id: str) -> np.ndarray:
        if image_id not in self._row:
            raise InputError(f"id {image_id!r} not in embedding table {self.path or ''}")
        return self.matrix[self._row[image_id]]

    @classmethod
    def load(cls, path: Path) -> "EmbeddingTable":
        path = Path(path)
        idx_path = path.with_suffix(".idx")
        if not path.exists():
            raise FormatError("embedding file does not exist", path=str(path))
        if not idx_path.exists():
            raise FormatError("embedding index sidecar missing", path=str(idx_path))
        raw = path.read_bytes()
        if len(raw) < _HEADER.size:
            raise FormatError("embedding file truncated before header", path=str(path))
        magic, version, dim, count = _HEADER.unpack_from(raw)
        if magic != EMB_MAGIC:
            raise FormatError(f"wrong magic {magic!r}", path=str(path))
        if version != EMB_VERSION:
            raise FormatError(f"unsupported embedding format version {version}", path=str(path))
        expected = _HEADER.size + 4 * dim * count
        if len(raw) != expected:
            raise FormatError(
                f"size mismatch: expected {expected} bytes for {count}x{dim}, got {len(raw)}",
                path=str(path),
            )
        mat = np.frombuffer(raw, dtype="<f4", offset=_HEADER.size).reshape(count, dim).copy()
        if not np.all(np.isfinite(mat)):
            raise FormatError("embedding matrix contains non-finite values", path=str(path))
        ids = idx_path.read_text().splitlines()
        if len(ids) != count:
            raise FormatError(
                f"index lists {len(ids)} ids but table has {count} rows", path=str(idx_path)
            )
        return cls(ids, mat, path=str(path))


def pool_max(token_matrix: np.ndarray) -> np.ndarray:
    """Element-wise max over the token axis of a (tokens, dim) matrix."""
    mat = np.asarray(token_matrix)
    if mat.ndim != 2 or mat.shape[0] < 1:
        raise InputError(f"pool_max needs a (tokens >= 1, dim) matrix, got shape {mat.shape}")
    return mat.max(axis=0)
