"""streampart: streaming vertex-cut edge partitioning toolkit.

Implements a two-phase streaming partitioner (2PS): a volume-capped
streaming clustering pass discovers vertex communities, and a second
streaming phase pre-partitions intra-cluster edges before HDRF-scoring the
rest under a hard balance cap. HDRF and DBH single-pass baselines, a
power-law graph generator, and a quality-metrics suite round out the
toolkit.
"""
from .clustering import UNASSIGNED, ClusteringState, process_edge, streaming_clustering
from .errors import (
    CapacityError,
    ConfigError,
    FormatError,
    IdRangeError,
    StreampartError,
)
from .graphio import (
    DegreeTable,
    EdgeStream,
    GeneratorConfig,
    compute_degrees,
    generate_power_law,
    open_stream,
    write_edge_file,
)
from .metrics import (
    RunReport,
    assignment_cover,
    brute_force_min_rf,
    modularity,
    observed_imbalance,
    partition_capacity,
    replication_factor,
)
from .partitioning import (
    ClusterPlacement,
    ListSink,
    SpoolSink,
    map_clusters_to_partitions,
    merge_assignment_spools,
    partition_remaining_edges,
    prepartition_edges,
    run_2ps,
)
from .scoring import (
    DEFAULT_LAMBDA,
    PartitionLoads,
    ReplicationMatrix,
    dbh_assign,
    dbh_partitioner,
    hdrf_assign,
    hdrf_partitioner,
    hdrf_score,
)

__version__ = "0.1.0"

__all__ = [
    "CapacityError",
    "ClusterPlacement",
    "ClusteringState",
    "ConfigError",
    "DEFAULT_LAMBDA",
    "DegreeTable",
    "EdgeStream",
    "FormatError",
    "GeneratorConfig",
    "IdRangeError",
    "ListSink",
    "PartitionLoads",
    "ReplicationMatrix",
    "RunReport",
    "SpoolSink",
    "StreampartError",
    "UNASSIGNED",
    "assignment_cover",
    "brute_force_min_rf",
    "compute_degrees",
    "dbh_assign",
    "dbh_partitioner",
    "generate_power_law",
    "hdrf_assign",
    "hdrf_partitioner",
    "hdrf_score",
    "map_clusters_to_partitions",
    "merge_assignment_spools",
    "modularity",
    "observed_imbalance",
    "open_stream",
    "partition_capacity",
    "partition_remaining_edges",
    "prepartition_edges",
    "process_edge",
    "replication_factor",
    "run_2ps",
    "streaming_clustering",
    "write_edge_file",
]
