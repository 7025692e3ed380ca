"""Partitioning quality metrics and small-instance brute-force oracles.

Replication factor is the average number of partitions covering each
vertex that has at least one assigned edge; the balance constraint caps
every partition at alpha * |E| / k edges.
"""
from __future__ import annotations

import itertools
import math
import os
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import TYPE_CHECKING

import numpy as np

from .clustering import UNASSIGNED
from .errors import FormatError
from .graphio import DegreeTable, EdgeStream

if TYPE_CHECKING:
    from .scoring import PartitionLoads, ReplicationMatrix

ASSIGNMENT_DTYPE = np.dtype("<u4")


def partition_capacity(edge_count: int, k: int, alpha: float) -> int:
    """Hard per-partition edge cap: ceil(alpha * |E| / k).

    Evaluated in exact decimal arithmetic so that e.g. alpha=1.1, |E|=20,
    k=2 yields 11 instead of a float-rounding artifact of 12. The ceiling
    guarantees the k capacities sum to at least |E| whenever alpha >= 1.
    """
    return int(math.ceil(Fraction(str(alpha)) * edge_count / k))


@dataclass
class RunReport:
    """Outcome summary for one partitioning run."""

    algo: str
    edge_count: int
    vertex_count: int
    k: int
    alpha: float
    rf: float
    alpha_observed: float
    lam: float | None = None
    modularity: float | None = None
    prepartitioned_ratio: float | None = None
    degenerate: bool = False
    alpha_violation: bool = False
    cluster_count: int | None = None
    prepartitioned_edges: int | None = None
    redirected_edges: int | None = None
    phase_times: dict[str, float] = field(default_factory=dict)
    peak_state: dict[str, int] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def replication_factor(matrix: ReplicationMatrix) -> float:
    """(sum of per-partition cover set sizes) / (number of covered vertices).

    Vertices without any assigned edge do not enter the denominator; with no
    covered vertices at all the value is undefined and a ValueError is raised
    (callers report that case with a degenerate flag instead).
    """
    bits = matrix.bits
    covered = int(bits.any(axis=1).sum())
    if covered == 0:
        raise ValueError("no covered vertices, replication factor undefined")
    return float(bits.sum()) / covered


def observed_imbalance(loads: PartitionLoads, edge_count: int) -> float:
    """Max partition size divided by the ideal |E| / k."""
    if edge_count == 0:
        return 1.0
    return float(loads.sizes.max()) * len(loads.sizes) / edge_count


def modularity(stream: EdgeStream, v2c, degrees: DegreeTable) -> float:
    """Clustering quality: intra-cluster edge share minus the random expectation.

    Computed per cluster as sum_c(intra_c / |E| - (vol_c / (2|E|))**2), which
    on undirected graphs equals the quadratic pairwise definition. Self-loops
    count once toward intra_c and contribute 2 to their cluster volume.
    Returns 0.0 for an empty stream (degenerate).
    """
    m = stream.edge_count
    if m == 0:
        return 0.0
    assign = np.asarray(v2c, dtype=np.int64)
    intra = 0
    for chunk in stream.iter_chunks():
        cu = assign[chunk[:, 0]]
        cv = assign[chunk[:, 1]]
        intra += int(np.count_nonzero((cu == cv) & (cu != UNASSIGNED)))
    clustered = assign != UNASSIGNED
    vol = np.bincount(
        assign[clustered], weights=degrees.counts[clustered].astype(np.float64)
    )
    return intra / m - float(((vol / (2.0 * m)) ** 2).sum())


def assignment_cover(
    stream: EdgeStream, assignment_path: str | os.PathLike, k: int
) -> tuple[ReplicationMatrix, PartitionLoads]:
    """Rebuild cover bits and loads from an assignment file.

    This is an independent recomputation path: it trusts only the graph file
    and the one-uint32-per-edge assignment file, not partitioner state.
    """
    from .scoring import PartitionLoads, ReplicationMatrix

    size = os.path.getsize(assignment_path)
    if size != ASSIGNMENT_DTYPE.itemsize * stream.edge_count:
        raise FormatError(
            f"{assignment_path}: expected {stream.edge_count} records, "
            f"file holds {size // ASSIGNMENT_DTYPE.itemsize}"
        )
    matrix = ReplicationMatrix.empty(stream.vertex_count, k)
    loads = PartitionLoads.empty(k)
    with open(assignment_path, "rb") as fh:
        for chunk in stream.iter_chunks():
            pids = np.fromfile(fh, dtype=ASSIGNMENT_DTYPE, count=len(chunk))
            if pids.size != len(chunk):
                raise FormatError(f"{assignment_path}: truncated")
            if pids.size and int(pids.max()) >= k:
                raise FormatError(f"{assignment_path}: partition id out of range")
            matrix.bits[chunk[:, 0], pids] = True
            matrix.bits[chunk[:, 1], pids] = True
            loads.sizes += np.bincount(pids, minlength=k)
    return matrix, loads


def brute_force_min_rf(edges, k: int, alpha: float = 1.0) -> float:
    """Exhaustive optimum replication factor for tiny instances (tests only).

    Enumerates all k**|E| assignments that respect the capacity rule
    ceil(alpha * |E| / k). Refuses instances beyond |E| <= 10, k <= 3.
    """
    edges = [tuple(e) for e in edges]
    if len(edges) > 10 or k > 3:
        raise ValueError("instance too large for exhaustive search")
    if not edges:
        raise ValueError("replication factor undefined without edges")
    cap = partition_capacity(len(edges), k, alpha)
    touched = {x for e in edges for x in e}
    best = None
    for assign in itertools.product(range(k), repeat=len(edges)):
        counts = [0] * k
        covers = [set() for _ in range(k)]
        for (u, v), p in zip(edges, assign):
            counts[p] += 1
            covers[p].add(u)
            covers[p].add(v)
        if max(counts) > cap:
            continue
        total = sum(len(c) for c in covers)
        if best is None or total < best:
            best = total
    if best is None:
        raise ValueError("no feasible assignment under the capacity rule")
    return best / len(touched)
