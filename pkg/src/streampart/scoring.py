"""Stateful HDRF scoring and assignment, plus the stateless DBH baseline.

The score of edge (u, v) on partition p is C_REP + C_BAL with

    theta(u) = d(u) / (d(u) + d(v))
    g(u, p)  = 1 + (1 - theta(u))   if u is in p's cover set, else 0
    C_REP    = g(u, p) + g(v, p)
    C_BAL(p) = lambda * (maxsize - size(p)) / (1 + maxsize - minsize)

where maxsize/minsize are the current extreme partition loads. Degrees are
the true degrees computed upfront, the same table the clustering phase uses.
"""
from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, ConfigError
from .graphio import DegreeTable, EdgeStream
from .metrics import (
    RunReport,
    observed_imbalance,
    partition_capacity,
    replication_factor,
)

DEFAULT_LAMBDA = 1.1
ASSIGNMENT_DTYPE = np.dtype("<u4")
_MASK64 = (1 << 64) - 1


@dataclass
class ReplicationMatrix:
    """Vertex-to-partition cover bits: bits[v, p] once v has an edge on p."""

    bits: np.ndarray

    @classmethod
    def empty(cls, vertex_count: int, k: int) -> "ReplicationMatrix":
        return cls(np.zeros((vertex_count, k), dtype=bool))

    def covered_vertices(self) -> int:
        return int(self.bits.any(axis=1).sum())

    def cover_sizes(self) -> np.ndarray:
        return self.bits.sum(axis=0)


@dataclass
class PartitionLoads:
    """Per-partition assigned edge counts, with an optional hard capacity."""

    sizes: np.ndarray
    capacity: int | None = None

    @classmethod
    def empty(cls, k: int, capacity: int | None = None) -> "PartitionLoads":
        return cls(np.zeros(k, dtype=np.int64), capacity)


def _score_terms(u, v, sizes, deg, lam):
    du = float(deg[u])
    dv = float(deg[v])
    total = du + dv
    rep_u = 2.0 - du / total  # 1 + (1 - theta(u)) folded
    rep_v = 2.0 - dv / total
    maxsize = int(sizes.max())
    minsize = int(sizes.min())
    bal_unit = lam / (1.0 + maxsize - minsize)
    return rep_u, rep_v, maxsize, bal_unit


def hdrf_score(edge, p: int, matrix: ReplicationMatrix, loads: PartitionLoads,
               degrees: DegreeTable, lam: float = DEFAULT_LAMBDA) -> float:
    """Score one (edge, partition) pair; pure function of its inputs."""
    u, v = edge
    sizes = loads.sizes
    rep_u, rep_v, maxsize, bal_unit = _score_terms(u, v, sizes, degrees.counts, lam)
    bits = matrix.bits
    rep = (rep_u if bits[u, p] else 0.0) + (rep_v if bits[v, p] else 0.0)
    return rep + (maxsize - int(sizes[p])) * bal_unit


def _score_vector(u, v, bits, sizes, deg, lam):
    rep_u, rep_v, maxsize, bal_unit = _score_terms(u, v, sizes, deg, lam)
    return bits[u] * rep_u + bits[v] * rep_v + (maxsize - sizes) * bal_unit


def hdrf_assign(edge, matrix: ReplicationMatrix, loads: PartitionLoads,
                degrees: DegreeTable, lam: float = DEFAULT_LAMBDA,
                candidates=None) -> int:
    """Assign an edge to the best-scoring admissible partition and update state.

    Candidates default to all partitions, restricted to the non-full ones when
    the loads carry a capacity. Ties break toward the lowest partition id.
    Both endpoints' cover bits are set and the load is incremented.
    """
    u, v = edge
    sizes = loads.sizes
    score = _score_vector(u, v, matrix.bits, sizes, degrees.counts, lam)
    if candidates is not None:
        mask = np.zeros(len(sizes), dtype=bool)
        mask[list(candidates)] = True
        score = np.where(mask, score, -np.inf)
    elif loads.capacity is not None:
        score = np.where(sizes < loads.capacity, score, -np.inf)
    p = int(score.argmax())
    if score[p] == -np.inf:
        raise CapacityError("every candidate partition is at capacity")
    sizes[p] += 1
    matrix.bits[u, p] = True
    matrix.bits[v, p] = True
    return p


def _mix64(x: int) -> int:
    """SplitMix64 finalizer, the fixed avalanche mixer behind DBH hashing."""
    x &= _MASK64
    x ^= x >> 30
    x = (x * 0xBF58476D1CE4E5B9) & _MASK64
    x ^= x >> 27
    x = (x * 0x94D049BB133111EB) & _MASK64
    x ^= x >> 31
    return x


def _mix64_array(x: np.ndarray) -> np.ndarray:
    x = x.astype(np.uint64)
    x ^= x >> np.uint64(30)
    x *= np.uint64(0xBF58476D1CE4E5B9)
    x ^= x >> np.uint64(27)
    x *= np.uint64(0x94D049BB133111EB)
    x ^= x >> np.uint64(31)
    return x


def dbh_assign(edge, degrees: DegreeTable, k: int) -> int:
    """Hash the lower-degree endpoint (ties: lower id) onto a partition."""
    u, v = edge
    du = int(degrees.counts[u])
    dv = int(degrees.counts[v])
    pivot = u if du < dv or (du == dv and u <= v) else v
    return _mix64(pivot) % k


def _finish_report(algo, stream, k, alpha, lam, matrix, loads, elapsed):
    edge_count = stream.edge_count
    degenerate = edge_count == 0 or matrix.covered_vertices() == 0
    rf = 1.0 if degenerate else replication_factor(matrix)
    cap = partition_capacity(edge_count, k, alpha)
    return RunReport(
        algo=algo,
        edge_count=edge_count,
        vertex_count=stream.vertex_count,
        k=k,
        alpha=alpha,
        lam=lam,
        rf=rf,
        alpha_observed=observed_imbalance(loads, edge_count),
        degenerate=degenerate,
        alpha_violation=bool(edge_count and int(loads.sizes.max()) > cap),
        phase_times={"partition": elapsed},
        peak_state={
            "degree_entries": int(matrix.bits.shape[0]),
            "partition_load_entries": int(loads.sizes.size),
            "replication_matrix_bits": int(matrix.bits.size),
        },
    )


def hdrf_partitioner(stream: EdgeStream, degrees: DegreeTable, k: int,
                     lam: float = DEFAULT_LAMBDA, alpha: float = 1.05,
                     out_path=None) -> RunReport:
    """Plain single-pass HDRF over all k partitions.

    No hard cap is enforced; balance rests on C_BAL alone and the report
    flags the run when the observed maximum exceeds the alpha capacity.
    """
    if k < 1:
        raise ConfigError("k must be >= 1")
    start = time.perf_counter()
    matrix = ReplicationMatrix.empty(stream.vertex_count, k)
    loads = PartitionLoads.empty(k)
    out = open(out_path, "wb") if out_path is not None else None
    try:
        for chunk in stream.iter_chunks():
            pids = [
                hdrf_assign((u, v), matrix, loads, degrees, lam=lam)
                for u, v in chunk.tolist()
            ]
            if out is not None:
                np.asarray(pids, dtype=ASSIGNMENT_DTYPE).tofile(out)
    finally:
        if out is not None:
            out.close()
    elapsed = time.perf_counter() - start
    return _finish_report("hdrf", stream, k, alpha, lam, matrix, loads, elapsed)


def dbh_partitioner(stream: EdgeStream, degrees: DegreeTable, k: int,
                    alpha: float = 1.05, out_path=None) -> RunReport:
    """Stateless degree-based hashing baseline, vectorized per chunk."""
    if k < 1:
        raise ConfigError("k must be >= 1")
    start = time.perf_counter()
    matrix = ReplicationMatrix.empty(stream.vertex_count, k)
    loads = PartitionLoads.empty(k)
    deg = degrees.counts
    out = open(out_path, "wb") if out_path is not None else None
    try:
        for chunk in stream.iter_chunks():
            us = chunk[:, 0].astype(np.int64)
            vs = chunk[:, 1].astype(np.int64)
            du = deg[us]
            dv = deg[vs]
            first = (du < dv) | ((du == dv) & (us <= vs))
            pivot = np.where(first, us, vs)
            pids = (_mix64_array(pivot) % np.uint64(k)).astype(np.int64)
            matrix.bits[us, pids] = True
            matrix.bits[vs, pids] = True
            loads.sizes += np.bincount(pids, minlength=k)
            if out is not None:
                pids.astype(ASSIGNMENT_DTYPE).tofile(out)
    finally:
        if out is not None:
            out.close()
    elapsed = time.perf_counter() - start
    return _finish_report("dbh", stream, k, alpha, None, matrix, loads, elapsed)
