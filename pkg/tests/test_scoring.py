from __future__ import annotations

import numpy as np
import pytest

from streampart import (
    CapacityError,
    PartitionLoads,
    ReplicationMatrix,
    compute_degrees,
    dbh_assign,
    dbh_partitioner,
    hdrf_assign,
    hdrf_partitioner,
    hdrf_score,
)
from streampart.graphio import DegreeTable
from conftest import random_edges


def _fresh(n, k, capacity=None):
    return ReplicationMatrix.empty(n, k), PartitionLoads.empty(k, capacity)


def test_score_both_endpoints_replicated_equal_degrees():
    # theta(u) = theta(v) = 0.5 so C_REP = 1.5 + 1.5 = 3.0; equal loads zero
    # out the balance term
    matrix, loads = _fresh(2, 2)
    matrix.bits[0, 1] = True
    matrix.bits[1, 1] = True
    degrees = DegreeTable(np.array([4, 4]))
    assert hdrf_score((0, 1), 1, matrix, loads, degrees, lam=1.1) == pytest.approx(3.0)


def test_score_zero_when_neither_endpoint_present():
    matrix, loads = _fresh(2, 2)
    degrees = DegreeTable(np.array([1, 1]))
    assert hdrf_score((0, 1), 0, matrix, loads, degrees) == 0.0


def test_equal_loads_make_balance_constant():
    matrix, loads = _fresh(2, 3)
    loads.sizes[:] = 7
    degrees = DegreeTable(np.array([2, 3]))
    scores = [hdrf_score((0, 1), p, matrix, loads, degrees) for p in range(3)]
    assert scores[0] == scores[1] == scores[2]


def test_score_monotone_in_replication():
    rng = np.random.default_rng(3)
    for _ in range(50):
        k = int(rng.integers(2, 6))
        matrix, loads = _fresh(4, k)
        matrix.bits[:] = rng.random((4, k)) < 0.5
        loads.sizes[:] = rng.integers(0, 10, size=k)
        degrees = DegreeTable(rng.integers(1, 9, size=4))
        p = int(rng.integers(k))
        before = hdrf_score((0, 1), p, matrix, loads, degrees)
        matrix.bits[0, p] = True
        assert hdrf_score((0, 1), p, matrix, loads, degrees) >= before


def test_argmax_invariant_to_constant_load_shift():
    rng = np.random.default_rng(8)
    degrees = DegreeTable(np.array([3, 5]))
    for _ in range(30):
        k = 4
        matrix, loads = _fresh(2, k)
        matrix.bits[:] = rng.random((2, k)) < 0.5
        loads.sizes[:] = rng.integers(0, 6, size=k)
        base = [hdrf_score((0, 1), p, matrix, loads, degrees) for p in range(k)]
        loads.sizes += 13
        shifted = [hdrf_score((0, 1), p, matrix, loads, degrees) for p in range(k)]
        assert int(np.argmax(base)) == int(np.argmax(shifted))


def test_assign_first_edge_breaks_tie_to_partition_zero():
    matrix, loads = _fresh(2, 2)
    degrees = DegreeTable(np.array([1, 1]))
    assert hdrf_assign((0, 1), matrix, loads, degrees) == 0
    assert loads.sizes.tolist() == [1, 0]
    assert matrix.bits[0, 0] and matrix.bits[1, 0]


def test_assign_prefers_partition_with_replicated_endpoint():
    matrix, loads = _fresh(2, 3)
    matrix.bits[0, 1] = True
    degrees = DegreeTable(np.array([2, 2]))
    assert hdrf_assign((0, 1), matrix, loads, degrees) == 1


def test_assign_matches_scalar_argmax():
    rng = np.random.default_rng(12)
    for _ in range(50):
        k = int(rng.integers(2, 7))
        matrix, loads = _fresh(6, k)
        matrix.bits[:] = rng.random((6, k)) < 0.4
        loads.sizes[:] = rng.integers(0, 12, size=k)
        degrees = DegreeTable(rng.integers(1, 10, size=6))
        u, v = int(rng.integers(6)), int(rng.integers(6))
        expected_scores = [
            hdrf_score((u, v), p, matrix, loads, degrees) for p in range(k)
        ]
        expected = int(np.argmax(expected_scores))
        assert hdrf_assign((u, v), matrix, loads, degrees) == expected


def test_assign_single_forced_candidate():
    matrix, loads = _fresh(2, 4)
    matrix.bits[0, 0] = True  # partition 0 would win on score
    degrees = DegreeTable(np.array([1, 1]))
    assert hdrf_assign((0, 1), matrix, loads, degrees, candidates=[3]) == 3


def test_assign_skips_full_partitions():
    matrix, loads = _fresh(2, 2, capacity=2)
    loads.sizes[0] = 2
    matrix.bits[0, 0] = True
    degrees = DegreeTable(np.array([1, 1]))
    assert hdrf_assign((0, 1), matrix, loads, degrees) == 1


def test_assign_capacity_exhaustion():
    matrix, loads = _fresh(2, 2, capacity=1)
    loads.sizes[:] = 1
    degrees = DegreeTable(np.array([1, 1]))
    with pytest.raises(CapacityError):
        hdrf_assign((0, 1), matrix, loads, degrees)


def test_dbh_depends_only_on_lower_degree_endpoint():
    degrees = DegreeTable(np.array([1, 5, 9]))
    k = 7
    # vertex 0 is the low-degree endpoint of both edges
    assert dbh_assign((0, 1), degrees, k) == dbh_assign((0, 2), degrees, k)
    # changing the partner's degree does not move the edge
    heavier = DegreeTable(np.array([1, 50, 9]))
    assert dbh_assign((0, 1), heavier, k) == dbh_assign((0, 1), degrees, k)


def test_dbh_is_pure_and_stateless():
    degrees = DegreeTable(np.array([2, 3]))
    assert dbh_assign((0, 1), degrees, 4) == dbh_assign((0, 1), degrees, 4)


def test_dbh_k_one():
    degrees = DegreeTable(np.array([2, 3]))
    assert dbh_assign((0, 1), degrees, 1) == 0


def test_dbh_tie_uses_smaller_id():
    degrees = DegreeTable(np.array([3, 3]))
    assert dbh_assign((0, 1), degrees, 5) == dbh_assign((1, 0), degrees, 5)


def test_hdrf_partitioner_star_balances_with_large_lambda(make_stream, tmp_path):
    edges = [(0, leaf) for leaf in range(1, 13)]
    stream = make_stream(edges)
    degrees = compute_degrees(stream)
    out = tmp_path / "star.bin"
    hdrf_partitioner(stream, degrees, k=2, lam=100.0, out_path=out)
    loads = np.bincount(np.fromfile(out, dtype="<u4"), minlength=2)
    assert loads.sum() == 12
    assert abs(int(loads[0]) - int(loads[1])) <= 1


def test_hdrf_partitioner_single_edge_rf_one(make_stream):
    stream = make_stream([(0, 1)])
    report = hdrf_partitioner(stream, compute_degrees(stream), k=2)
    assert report.rf == 1.0


def test_hdrf_partitioner_assigns_every_edge(make_stream, tmp_path):
    rng = np.random.default_rng(19)
    edges = random_edges(rng, 30, 200)
    stream = make_stream(edges)
    out = tmp_path / "hdrf.bin"
    hdrf_partitioner(stream, compute_degrees(stream), k=3, out_path=out)
    pids = np.fromfile(out, dtype="<u4")
    assert pids.size == 200
    assert pids.max() < 3


def test_dbh_partitioner_matches_scalar_assign(make_stream, tmp_path):
    rng = np.random.default_rng(29)
    edges = random_edges(rng, 40, 300)
    stream = make_stream(edges)
    degrees = compute_degrees(stream)
    out = tmp_path / "dbh.bin"
    dbh_partitioner(stream, degrees, k=5, out_path=out)
    pids = np.fromfile(out, dtype="<u4").tolist()
    expected = [dbh_assign(e, degrees, 5) for e in edges]
    assert pids == expected


def test_baseline_reports_alpha_violation_on_locality_stream(make_stream):
    # a path streamed in path order keeps C_REP on one partition ahead of the
    # balance term, so plain HDRF piles every edge onto partition 0
    edges = [(i, i + 1) for i in range(40)]
    stream = make_stream(edges)
    report = hdrf_partitioner(stream, compute_degrees(stream), k=2, lam=1.1, alpha=1.05)
    assert report.alpha_violation
    assert report.alpha_observed > 1.05
