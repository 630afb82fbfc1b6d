"""Bit-exact embedding storage plus the two vector measures used everywhere.

On-disk layout of a vector file:

    bytes 0-7    ASCII magic ``COIREMB1``
    bytes 8-11   row count, unsigned 32-bit little-endian
    bytes 12-15  dimension H, unsigned 32-bit little-endian
    then         count * H IEEE-754 binary32 little-endian, row-major

Row identity lives in a sidecar UTF-8 text file, one id per line; line i
names row i. Keeping the payload a pure rectangular array makes it
memory-mappable from any language.
"""

from __future__ import annotations

import math
import struct
from pathlib import Path

import numpy as np

from .errors import EmbeddingIOError, VectorLookupError

MAGIC = b"COIREMB1"
_HEADER = struct.Struct("<8sII")


class EmbeddingMatrix:
    """Immutable dense float32 matrix with named rows."""

    def __init__(self, ids, data):
        data = np.asarray(data, dtype=np.float32)
        if data.ndim != 2:
            raise EmbeddingIOError(f"embedding data must be 2-D, got shape {data.shape}")
        ids = [str(i) for i in ids]
        if len(ids) != data.shape[0]:
            raise EmbeddingIOError(
                f"{len(ids)} ids for {data.shape[0]} rows"
            )
        bad = np.flatnonzero(~np.isfinite(data).all(axis=1))
        if bad.size:
            raise EmbeddingIOError(f"non-finite value at row {int(bad[0])}")
        index = {}
        for pos, rid in enumerate(ids):
            if rid in index:
                raise EmbeddingIOError(f"duplicate row id {rid!r}")
            index[rid] = pos
        self.ids = ids
        self.data = data
        self.index = index
        self._data64 = None

    @property
    def dim(self) -> int:
        return self.data.shape[1]

    def __len__(self) -> int:
        return self.data.shape[0]

    def __contains__(self, rid: str) -> bool:
        return rid in self.index

    def vector(self, rid: str) -> np.ndarray:
        try:
            return self.data[self.index[rid]]
        except KeyError:
            raise VectorLookupError(f"no vector for id {rid!r}") from None

    def as_float64(self) -> np.ndarray:
        """Float64 view used by the numeric kernels; computed once."""
        if self._data64 is None:
            self._data64 = self.data.astype(np.float64)
        return self._data64


def write_embeddings(matrix: EmbeddingMatrix, vec_path, ids_path) -> None:
    payload = np.ascontiguousarray(matrix.data, dtype="<f4")
    header = _HEADER.pack(MAGIC, len(matrix), matrix.dim)
    Path(vec_path).write_bytes(header + payload.tobytes())
    Path(ids_path).write_text("".join(f"{rid}\n" for rid in matrix.ids), encoding="utf-8")


def load_embeddings(vec_path, ids_path) -> EmbeddingMatrix:
    raw = Path(vec_path).read_bytes()
    if len(raw) < _HEADER.size:
        raise EmbeddingIOError(f"{vec_path}: truncated header ({len(raw)} bytes)")
    magic, count, dim = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise EmbeddingIOError(f"{vec_path}: bad magic {magic!r} at byte 0")
    expected = _HEADER.size + count * dim * 4
    if len(raw) != expected:
        raise EmbeddingIOError(
            f"{vec_path}: payload is {len(raw)} bytes, header implies {expected}"
        )
    data = np.frombuffer(raw, dtype="<f4", offset=_HEADER.size).reshape(count, dim)
    ids = Path(ids_path).read_text(encoding="utf-8").splitlines()
    if len(ids) != count:
        raise EmbeddingIOError(
            f"{ids_path}: {len(ids)} id lines but header count is {count}"
        )
    return EmbeddingMatrix(ids, np.array(data))


def cosine(u, v) -> float:
    """Cosine similarity, accumulated in float64 and clipped to [-1, 1]."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape} vs {v.shape}")
    nu = math.sqrt(float(u @ u))
    nv = math.sqrt(float(v @ v))
    if nu == 0.0 or nv == 0.0:
        raise ValueError("cosine is undefined for a zero-norm vector")
    return float(np.clip((u @ v) / (nu * nv), -1.0, 1.0))


def euclidean(u, v) -> float:
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape} vs {v.shape}")
    return float(np.linalg.norm(u - v))


def cosine_to_rows(matrix: EmbeddingMatrix, v) -> np.ndarray:
    """Cosine similarity between one vector and every row of a matrix.

    Zero-norm rows (or a zero-norm query) raise, matching :func:`cosine`.
    """
    v = np.asarray(v, dtype=np.float64)
    if v.shape != (matrix.dim,):
        raise ValueError(f"query is {v.shape}-shaped, rows are {matrix.dim}-dim")
    rows = matrix.as_float64()
    norms = np.linalg.norm(rows, axis=1)
    qn = np.linalg.norm(v)
    if qn == 0.0:
        raise ValueError("cosine is undefined for a zero-norm query")
    zero = np.flatnonzero(norms == 0.0)
    if zero.size:
        raise ValueError(
            f"cosine is undefined for zero-norm row {matrix.ids[int(zero[0])]!r}"
        )
    return np.clip((rows @ v) / (norms * qn), -1.0, 1.0)
