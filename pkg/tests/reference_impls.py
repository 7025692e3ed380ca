"""Independent straight-line reference implementations used as test oracles.

Everything here is deliberately written against plain dicts and loops,
separate from the package's array-based code paths.
"""
from __future__ import annotations

import itertools
from collections import Counter


def cluster_reference(edges, degrees, k):
    """Two-pass volume-capped streaming clustering over an in-memory edge list.

    Returns the vertex -> cluster dict after both passes. The cap starts at
    (2|E|/k) * 0.5 and doubles for the second pass; migrations move the
    endpoint in the lighter cluster (ties: the first-listed endpoint) into
    the heavier one when the destination stays within the cap.
    """
    edge_count = len(edges)
    v2c: dict[int, int] = {}
    vol: Counter = Counter()
    next_id = 0
    max_vol = (2 * edge_count / k) * 0.5
    for _pass in range(2):
        for u, v in edges:
            for w in (u, v):
                if w not in v2c:
                    v2c[w] = next_id
                    vol[next_id] += degrees[w]
                    next_id += 1
            cu, cv = v2c[u], v2c[v]
            if cu == cv:
                continue
            if vol[cu] > max_vol or vol[cv] > max_vol:
                continue
            if vol[cu] <= vol[cv]:
                mover, src, dst = u, cu, cv
            else:
                mover, src, dst = v, cv, cu
            if vol[dst] + degrees[mover] <= max_vol:
                v2c[mover] = dst
                vol[dst] += degrees[mover]
                vol[src] -= degrees[mover]
        max_vol *= 2
    return v2c


def modularity_double_sum(edges, v2c, degrees, n_vertices):
    """Quadratic pairwise modularity: (1/2|E|) sum_uv (w_uv - d_u d_v / 2|E|).

    w counts edges between u and v with the undirected convention (each
    self-loop contributes 2 to w_uu); the sum runs over ordered pairs in the
    same cluster.
    """
    m = len(edges)
    if m == 0:
        return 0.0
    w: Counter = Counter()
    for u, v in edges:
        if u == v:
            w[(u, u)] += 2
        else:
            w[(u, v)] += 1
            w[(v, u)] += 1
    total = 0.0
    for u in range(n_vertices):
        cu = v2c.get(u) if isinstance(v2c, dict) else v2c[u]
        if cu is None or cu < 0:
            continue
        for v in range(n_vertices):
            cv = v2c.get(v) if isinstance(v2c, dict) else v2c[v]
            if cv is None or cv < 0 or cu != cv:
                continue
            total += w.get((u, v), 0) - degrees[u] * degrees[v] / (2 * m)
    return total / (2 * m)


def min_makespan(volumes, k):
    """Exhaustive minimum makespan for placing volumes onto k bins."""
    best = None
    for assign in itertools.product(range(k), repeat=len(volumes)):
        loads = [0] * k
        for vol, b in zip(volumes, assign):
            loads[b] += vol
        span = max(loads)
        if best is None or span < best:
            best = span
    return best
