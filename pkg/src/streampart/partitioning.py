"""Phase two: cluster placement, pre-partitioning, capped remaining-edge pass.

The cluster map from phase one is first packed onto partitions with a
largest-volume-first greedy (a 4/3-approximation of minimum makespan).
A pre-partitioning pass then assigns every edge whose endpoints share a
cluster, or whose clusters landed on the same partition, directly to that
partition; overflowing edges are redirected by HDRF scoring over the
non-full partitions. A final pass scores all remaining edges the same way.
No partition ever exceeds ceil(alpha * |E| / k) edges.

Auxiliary state is sized by |V| and k only. Per-edge assignments are
spooled to temp files per pass and merged back into stream order, so the
partitioner never holds an |E|-sized structure in memory.
"""
from __future__ import annotations

import heapq
import os
import tempfile
import time
from dataclasses import dataclass

import numpy as np

from .clustering import UNASSIGNED, ClusteringState, streaming_clustering
from .errors import ConfigError, FormatError
from .graphio import DegreeTable, EdgeStream, compute_degrees
from .metrics import RunReport, observed_imbalance, partition_capacity, replication_factor
from .scoring import (
    ASSIGNMENT_DTYPE,
    DEFAULT_LAMBDA,
    PartitionLoads,
    ReplicationMatrix,
    hdrf_assign,
)

TMPDIR_ENV = "STREAMPART_TMPDIR"
_SPOOL_DTYPE = np.dtype([("index", "<u8"), ("pid", "<u4")])
_SPOOL_FLUSH = 1 << 16


@dataclass
class ClusterPlacement:
    """Cluster-to-partition map plus the accumulated cluster volume per partition."""

    c2p: list[int]
    vol_p: list[int]


def map_clusters_to_partitions(state: ClusteringState, k: int) -> ClusterPlacement:
    """Pack non-empty clusters onto partitions, largest volume first.

    Each cluster in turn goes to the currently least-loaded partition.
    Ties on volume break toward the lower cluster id, ties on load toward
    the lower partition id, so the placement is deterministic.
    """
    if k < 1:
        raise ConfigError("k must be >= 1")
    order = sorted(state.nonempty_clusters(), key=lambda c: (-int(state.vol[c]), c))
    heap = [(0, p) for p in range(k)]
    c2p = [UNASSIGNED] * len(state.vol)
    vol_p = [0] * k
    for c in order:
        load, p = heapq.heappop(heap)
        load += int(state.vol[c])
        c2p[c] = p
        vol_p[p] = load
        heapq.heappush(heap, (load, p))
    return ClusterPlacement(c2p=c2p, vol_p=vol_p)


class ListSink:
    """In-memory (stream index, partition id) collector for small runs."""

    def __init__(self):
        self.records: list[tuple[int, int]] = []

    def emit(self, index: int, pid: int) -> None:
        self.records.append((index, pid))


class SpoolSink:
    """Spools (stream index, partition id) records to a temp file.

    Records must arrive in increasing index order, which both phase-two
    passes produce naturally; buffering is bounded.
    """

    def __init__(self, dir: str | None = None):
        fd, self.path = tempfile.mkstemp(suffix=".spool", dir=dir)
        self._fh = os.fdopen(fd, "wb")
        self._indices: list[int] = []
        self._pids: list[int] = []

    def emit(self, index: int, pid: int) -> None:
        self._indices.append(index)
        self._pids.append(pid)
        if len(self._indices) >= _SPOOL_FLUSH:
            self._flush()

    def _flush(self) -> None:
        records = np.empty(len(self._indices), dtype=_SPOOL_DTYPE)
        records["index"] = self._indices
        records["pid"] = self._pids
        records.tofile(self._fh)
        self._indices.clear()
        self._pids.clear()

    def close(self) -> str:
        self._flush()
        self._fh.close()
        return self.path

    def discard(self) -> None:
        try:
            self._fh.close()
        except OSError:
            pass
        try:
            os.unlink(self.path)
        except OSError:
            pass


class _SpoolReader:
    def __init__(self, path: str, chunk_records: int = _SPOOL_FLUSH):
        self._fh = open(path, "rb")
        self._chunk = chunk_records
        self._buf = None
        self._pos = 0
        self._refill()

    def _refill(self) -> None:
        self._buf = np.fromfile(self._fh, dtype=_SPOOL_DTYPE, count=self._chunk)
        self._pos = 0

    def head(self) -> int | None:
        if self._pos >= len(self._buf):
            self._refill()
            if len(self._buf) == 0:
                return None
        return int(self._buf["index"][self._pos])

    def take_run(self, expected: int) -> np.ndarray:
        """Pop the maximal run of consecutive indices starting at `expected`."""
        idx = self._buf["index"][self._pos:]
        gaps = np.flatnonzero(idx != expected + np.arange(idx.size, dtype=np.uint64))
        run = int(gaps[0]) if gaps.size else idx.size
        pids = np.ascontiguousarray(self._buf["pid"][self._pos : self._pos + run])
        self._pos += run
        return pids

    def close(self) -> None:
        self._fh.close()


def merge_assignment_spools(first: str, second: str, out_path: str, edge_count: int) -> None:
    """Interleave two index-sorted spools into one uint32-per-edge file.

    The spools must jointly cover every stream index exactly once; any gap
    or overlap is reported as corruption.
    """
    readers = (_SpoolReader(first), _SpoolReader(second))
    expected = 0
    try:
        with open(out_path, "wb") as out:
            while expected < edge_count:
                if readers[0].head() == expected:
                    pids = readers[0].take_run(expected)
                elif readers[1].head() == expected:
                    pids = readers[1].take_run(expected)
                else:
                    raise FormatError(f"no assignment spooled for stream index {expected}")
                pids.tofile(out)
                expected += len(pids)
        if readers[0].head() is not None or readers[1].head() is not None:
            raise FormatError("assignment records beyond stream end")
    finally:
        for r in readers:
            r.close()


@dataclass
class PrepartitionStats:
    assigned: int = 0
    redirected: int = 0
    intra_edges: int = 0


@dataclass
class RemainingStats:
    assigned: int = 0
    skipped: int = 0


def prepartition_edges(
    stream: EdgeStream,
    clustering: ClusteringState,
    placement: ClusterPlacement,
    degrees: DegreeTable,
    matrix: ReplicationMatrix,
    loads: PartitionLoads,
    lam: float = DEFAULT_LAMBDA,
    sink=None,
) -> PrepartitionStats:
    """First phase-two pass: place edges that the clustering already decides.

    An edge qualifies when both endpoints share a cluster or their clusters
    map to the same partition; its target is that partition. A full target
    redirects the edge to the best-scoring non-full partition instead.
    Non-qualifying edges are left for the remaining pass. Also counts
    same-cluster edges, which is all the modularity numerator needs.
    """
    if loads.capacity is None:
        raise ConfigError("pre-partitioning requires loads with a capacity")
    v2c = clustering.v2c
    c2p = placement.c2p
    bits = matrix.bits
    sizes = loads.sizes
    capacity = loads.capacity
    stats = PrepartitionStats()
    index = 0
    for chunk in stream.iter_chunks():
        for u, v in chunk.tolist():
            c1 = v2c[u]
            c2 = v2c[v]
            if c1 == c2:
                stats.intra_edges += 1
                p = c2p[c1]
            elif c2p[c1] == c2p[c2]:
                p = c2p[c1]
            else:
                index += 1
                continue
            if sizes[p] >= capacity:
                p = hdrf_assign((u, v), matrix, loads, degrees, lam=lam)
                stats.redirected += 1
            else:
                sizes[p] += 1
                bits[u, p] = True
                bits[v, p] = True
            if sink is not None:
                sink.emit(index, p)
            stats.assigned += 1
            index += 1
    return stats


def partition_remaining_edges(
    stream: EdgeStream,
    clustering: ClusteringState,
    placement: ClusterPlacement,
    degrees: DegreeTable,
    matrix: ReplicationMatrix,
    loads: PartitionLoads,
    lam: float = DEFAULT_LAMBDA,
    sink=None,
) -> RemainingStats:
    """Second phase-two pass: HDRF-score every edge the first pass skipped.

    Edges matching the pre-partitioning predicate are skipped here, and only
    partitions below capacity are candidates, so the hard cap holds.
    """
    if loads.capacity is None:
        raise ConfigError("remaining-edge pass requires loads with a capacity")
    v2c = clustering.v2c
    c2p = placement.c2p
    stats = RemainingStats()
    index = 0
    for chunk in stream.iter_chunks():
        for u, v in chunk.tolist():
            c1 = v2c[u]
            c2 = v2c[v]
            if c1 == c2 or c2p[c1] == c2p[c2]:
                stats.skipped += 1
                index += 1
                continue
            p = hdrf_assign((u, v), matrix, loads, degrees, lam=lam)
            if sink is not None:
                sink.emit(index, p)
            stats.assigned += 1
            index += 1
    return stats


def run_2ps(
    stream: EdgeStream,
    k: int,
    alpha: float = 1.05,
    lam: float = DEFAULT_LAMBDA,
    out_path: str | os.PathLike | None = None,
    tmp_dir: str | None = None,
) -> RunReport:
    """Run the full two-phase pipeline over a stream.

    Five stream passes total: degrees, two clustering passes, the
    pre-partitioning pass, and the remaining-edge pass. When out_path is
    given, a binary assignment file (one little-endian uint32 partition id
    per edge, in stream order) is produced via the spool-and-merge path.
    """
    if k < 2:
        raise ConfigError("k must be >= 2")
    if alpha < 1.0:
        raise ConfigError("alpha must be >= 1.0")
    if tmp_dir is None:
        tmp_dir = os.environ.get(TMPDIR_ENV) or None
    times: dict[str, float] = {}
    total_start = time.perf_counter()

    t = time.perf_counter()
    degrees = compute_degrees(stream)
    times["degrees"] = time.perf_counter() - t

    t = time.perf_counter()
    state = streaming_clustering(stream, degrees, k)
    times["clustering"] = time.perf_counter() - t

    t = time.perf_counter()
    placement = map_clusters_to_partitions(state, k)
    times["mapping"] = time.perf_counter() - t

    edge_count = stream.edge_count
    vertex_count = len(degrees)
    capacity = partition_capacity(edge_count, k, alpha)
    matrix = ReplicationMatrix.empty(vertex_count, k)
    loads = PartitionLoads.empty(k, capacity=capacity)

    pre_sink = SpoolSink(dir=tmp_dir) if out_path is not None else None
    rem_sink = SpoolSink(dir=tmp_dir) if out_path is not None else None
    try:
        t = time.perf_counter()
        pre = prepartition_edges(
            stream, state, placement, degrees, matrix, loads, lam=lam, sink=pre_sink
        )
        times["prepartition"] = time.perf_counter() - t

        t = time.perf_counter()
        rem = partition_remaining_edges(
            stream, state, placement, degrees, matrix, loads, lam=lam, sink=rem_sink
        )
        times["remaining"] = time.perf_counter() - t

        assert pre.assigned + rem.assigned == edge_count
        assert rem.skipped == pre.assigned

        if out_path is not None:
            t = time.perf_counter()
            merge_assignment_spools(pre_sink.close(), rem_sink.close(), str(out_path), edge_count)
            times["merge"] = time.perf_counter() - t
    finally:
        for sink in (pre_sink, rem_sink):
            if sink is not None:
                sink.discard()

    degenerate = edge_count == 0 or matrix.covered_vertices() == 0
    if degenerate:
        rf = 1.0
        mod = 0.0
        ratio = 0.0
    else:
        rf = replication_factor(matrix)
        vol = np.asarray(state.vol, dtype=np.float64)
        mod = pre.intra_edges / edge_count - float(((vol / (2.0 * edge_count)) ** 2).sum())
        ratio = pre.assigned / edge_count
    times["total"] = time.perf_counter() - total_start

    return RunReport(
        algo="2ps",
        edge_count=edge_count,
        vertex_count=vertex_count,
        k=k,
        alpha=alpha,
        lam=lam,
        rf=rf,
        alpha_observed=observed_imbalance(loads, edge_count),
        modularity=mod,
        prepartitioned_ratio=ratio,
        degenerate=degenerate,
        alpha_violation=bool(edge_count and int(loads.sizes.max()) > capacity),
        cluster_count=len(state.nonempty_clusters()),
        prepartitioned_edges=pre.assigned,
        redirected_edges=pre.redirected,
        phase_times=times,
        peak_state={
            "degree_entries": len(degrees),
            "vertex_to_cluster_entries": len(state.v2c),
            "cluster_volume_entries": len(state.vol),
            "cluster_to_partition_entries": len(placement.c2p),
            "partition_volume_entries": len(placement.vol_p),
            "partition_load_entries": int(loads.sizes.size),
            "replication_matrix_bits": int(matrix.bits.size),
        },
    )
