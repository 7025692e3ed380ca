"""Phase one of the two-phase partitioner: streaming vertex clustering.

Two passes over the same stream refine one shared state. A cluster's
volume is the summed true degree of its members. Processing an edge first
opens singleton clusters for unseen endpoints, then migrates the endpoint
sitting in the lighter cluster into the heavier one, but only while both
clusters are within the volume cap and the destination stays within it
after the move. The cap starts at (2|E|/k) * 0.5 and doubles for the
second pass; everything else carries over between passes.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import ConfigError
from .graphio import DegreeTable, EdgeStream

UNASSIGNED = -1


@dataclass
class ClusteringState:
    """Mutable clustering state shared by both stream passes."""

    v2c: list[int]  # vertex id -> cluster id, UNASSIGNED until first seen
    vol: list[int]  # cluster id -> summed member degree
    max_vol: float  # migration cap for the current pass
    next_id: int = 0  # next fresh cluster id

    def nonempty_clusters(self) -> list[int]:
        return [c for c in range(self.next_id) if self.vol[c] > 0]

    def assigned_vertices(self) -> int:
        return sum(1 for c in self.v2c if c != UNASSIGNED)


def _cluster_edge(v2c, vol, deg, max_vol, u, v, next_id):
    cu = v2c[u]
    if cu == UNASSIGNED:
        cu = next_id
        v2c[u] = cu
        vol[cu] += deg[u]
        next_id += 1
    cv = v2c[v]
    if cv == UNASSIGNED:
        cv = next_id
        v2c[v] = cv
        vol[cv] += deg[v]
        next_id += 1
    if cu != cv and vol[cu] <= max_vol and vol[cv] <= max_vol:
        # Lighter endpoint cluster donates its vertex to the heavier one;
        # on equal volumes the first-listed endpoint is the one that moves.
        if vol[cu] <= vol[cv]:
            mover, src, dst = u, cu, cv
        else:
            mover, src, dst = v, cv, cu
        d_mover = deg[mover]
        if vol[dst] + d_mover <= max_vol:
            v2c[mover] = dst
            vol[dst] += d_mover
            vol[src] -= d_mover
    return next_id


def process_edge(state: ClusteringState, edge, degrees: DegreeTable) -> None:
    """Apply a single edge to the clustering state (assign, then migrate)."""
    u, v = edge
    state.next_id = _cluster_edge(
        state.v2c, state.vol, degrees.counts, state.max_vol, u, v, state.next_id
    )


def _streaming_pass(stream: EdgeStream, state: ClusteringState, deg: list[int]) -> None:
    step = _cluster_edge
    v2c, vol, max_vol = state.v2c, state.vol, state.max_vol
    next_id = state.next_id
    for chunk in stream.iter_chunks():
        for u, v in chunk.tolist():
            next_id = step(v2c, vol, deg, max_vol, u, v, next_id)
    state.next_id = next_id


def streaming_clustering(stream: EdgeStream, degrees: DegreeTable, k: int) -> ClusteringState:
    """Run both clustering passes and return the final state.

    Every vertex that appears in the stream ends up in exactly one cluster;
    isolated vertices stay UNASSIGNED.
    """
    if k < 2:
        raise ConfigError("k must be >= 2")
    n = len(degrees)
    state = ClusteringState(
        v2c=[UNASSIGNED] * n,
        vol=[0] * n,
        max_vol=(2 * stream.edge_count / k) * 0.5,
    )
    deg = degrees.counts.tolist()
    _streaming_pass(stream, state, deg)
    state.max_vol *= 2
    _streaming_pass(stream, state, deg)
    return state
