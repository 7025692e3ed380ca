"""Binary edge-list ingestion, degree computation, power-law graph generation.

Graph files are raw binary with no header: 8 bytes per edge, two
little-endian unsigned 32-bit vertex ids. Streams are restreamable, so
every pass yields the same edges in the same order.
"""
from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, FormatError, IdRangeError

EDGE_DTYPE = np.dtype("<u4")
EDGE_RECORD_BYTES = 8
DEFAULT_CHUNK_EDGES = 1 << 18


class EdgeStream:
    """A restreamable edge list backed by a binary file.

    The edge count is fixed by the file size. The vertex count is either
    declared up front or inferred (max id + 1) on the first full pass.
    """

    def __init__(self, path: str | os.PathLike, vertex_count: int | None = None):
        size = os.path.getsize(path)
        if size % EDGE_RECORD_BYTES:
            raise FormatError(
                f"{path}: size {size} is not a multiple of {EDGE_RECORD_BYTES} bytes"
            )
        if vertex_count is not None and vertex_count < 0:
            raise ConfigError("vertex_count must be nonnegative")
        self.path = str(path)
        self.edge_count = size // EDGE_RECORD_BYTES
        self._vertex_count = vertex_count

    @property
    def declared_vertex_count(self) -> int | None:
        return self._vertex_count

    def declare_vertex_count(self, n: int) -> None:
        if self._vertex_count is not None and self._vertex_count != n:
            raise ConfigError(
                f"vertex count already declared as {self._vertex_count}, got {n}"
            )
        self._vertex_count = n

    @property
    def vertex_count(self) -> int:
        if self._vertex_count is None:
            top = -1
            for chunk in self.iter_chunks():
                top = max(top, int(chunk.max()))
            self._vertex_count = top + 1
        return self._vertex_count

    def iter_chunks(self, chunk_edges: int = DEFAULT_CHUNK_EDGES):
        """Yield (n, 2) uint32 arrays covering the stream in order."""
        with open(self.path, "rb") as fh:
            while True:
                flat = np.fromfile(fh, dtype=EDGE_DTYPE, count=2 * chunk_edges)
                if flat.size == 0:
                    return
                if flat.size % 2:
                    raise FormatError(f"{self.path}: truncated edge record")
                yield flat.reshape(-1, 2)

    def iter_edges(self):
        """Yield edges one at a time as (first, second) int tuples."""
        for chunk in self.iter_chunks():
            for u, v in chunk.tolist():
                yield u, v


def open_stream(path: str | os.PathLike, vertex_count: int | None = None) -> EdgeStream:
    """Open a binary edge file as a restreamable EdgeStream."""
    return EdgeStream(path, vertex_count=vertex_count)


def write_edge_file(
    path: str | os.PathLike, edges, vertex_count: int | None = None
) -> EdgeStream:
    """Write (first, second) id pairs as a binary edge file and open it."""
    arr = np.asarray(list(edges), dtype=np.uint32)
    if arr.size == 0:
        arr = arr.reshape(0, 2)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ConfigError("edges must be (first, second) pairs")
    with open(path, "wb") as fh:
        arr.astype(EDGE_DTYPE, copy=False).tofile(fh)
    return EdgeStream(path, vertex_count=vertex_count)


@dataclass
class DegreeTable:
    """Per-vertex true degree counts; a self-loop adds 2 to its endpoint."""

    counts: np.ndarray

    def __len__(self) -> int:
        return len(self.counts)

    @property
    def total(self) -> int:
        return int(self.counts.sum())


def compute_degrees(stream: EdgeStream) -> DegreeTable:
    """Count endpoint occurrences per vertex in one full pass.

    The counts always sum to 2 * edge_count. When the stream has no declared
    vertex count it is inferred here, so the degree pass doubles as the
    id-discovery pass.
    """
    declared = stream.declared_vertex_count
    if declared is not None:
        counts = np.zeros(declared, dtype=np.int64)
        for chunk in stream.iter_chunks():
            flat = chunk.ravel()
            top = int(flat.max())
            if top >= declared:
                raise IdRangeError(
                    f"vertex id {top} outside declared range of {declared}"
                )
            counts += np.bincount(flat, minlength=declared)
    else:
        counts = np.zeros(0, dtype=np.int64)
        for chunk in stream.iter_chunks():
            seen = np.bincount(chunk.ravel())
            if seen.size > counts.size:
                grown = np.zeros(seen.size, dtype=np.int64)
                grown[: counts.size] = counts
                counts = grown
            counts[: seen.size] += seen
        stream.declare_vertex_count(len(counts))
    return DegreeTable(counts)


@dataclass(frozen=True)
class GeneratorConfig:
    """Settings for the random power-law graph generator."""

    n_vertices: int
    exponent: float
    seed: int = 0

    def __post_init__(self):
        if self.n_vertices < 2:
            raise ConfigError("n_vertices must be >= 2")
        if not self.exponent > 1.0:
            raise ConfigError("power-law exponent must be > 1")


def generate_power_law(cfg: GeneratorConfig, out_path: str | os.PathLike) -> EdgeStream:
    """Write a random power-law graph and return a stream over it.

    Degrees are sampled i.i.d. from P(d) proportional to d**(-exponent) on
    1 <= d <= n_vertices - 1, then wired by pairing a shuffled list of degree
    stubs (configuration model). Self-loops and duplicate pairs are kept as
    ordinary stream edges. An odd stub total gets one extra uniformly random
    stub, so the edge count is ceil(sum(d) / 2). Output bytes are a pure
    function of the config.
    """
    rng = np.random.default_rng(cfg.seed)
    n = cfg.n_vertices
    weights = np.arange(1, n, dtype=np.float64) ** (-cfg.exponent)
    weights /= weights.sum()
    degrees = rng.choice(n - 1, size=n, p=weights) + 1
    stubs = np.repeat(np.arange(n, dtype=np.uint32), degrees)
    if stubs.size % 2:
        stubs = np.append(stubs, np.uint32(rng.integers(0, n)))
    rng.shuffle(stubs)
    with open(out_path, "wb") as fh:
        stubs.reshape(-1, 2).astype(EDGE_DTYPE, copy=False).tofile(fh)
    return EdgeStream(out_path, vertex_count=n)
