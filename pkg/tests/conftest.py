from __future__ import annotations

import numpy as np
import pytest

from streampart import compute_degrees, open_stream, write_edge_file


@pytest.fixture
def make_stream(tmp_path):
    """Write an edge list to a temp file and open a stream over it."""
    counter = {"n": 0}

    def _make(edges, vertex_count=None):
        counter["n"] += 1
        path = tmp_path / f"graph_{counter['n']}.bin"
        return write_edge_file(path, edges, vertex_count=vertex_count)

    return _make


def random_edges(rng, n_vertices, n_edges):
    """Uniform random endpoints; self-loops and duplicates allowed."""
    return [
        (int(rng.integers(n_vertices)), int(rng.integers(n_vertices)))
        for _ in range(n_edges)
    ]


def write_uniform_graph(path, n_vertices, n_edges, seed):
    rng = np.random.default_rng(seed)
    arr = rng.integers(0, n_vertices, size=(n_edges, 2), dtype=np.uint32)
    arr.astype("<u4").tofile(path)
    return open_stream(path, vertex_count=n_vertices)


def degrees_of(stream):
    return compute_degrees(stream)


TRIANGLE = [(0, 1), (1, 2), (2, 0)]
TWO_TRIANGLES = [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]
K4_PAIR = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3),
           (4, 5), (4, 6), (4, 7), (5, 6), (5, 7), (6, 7)]
