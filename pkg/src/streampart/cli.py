"""Command-line front end: generate, cluster, partition, metrics, sweep."""
from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
import time

import numpy as np

from .clustering import UNASSIGNED, streaming_clustering
from .errors import ConfigError, StreampartError
from .graphio import GeneratorConfig, compute_degrees, generate_power_law, open_stream
from .metrics import assignment_cover, modularity, observed_imbalance, replication_factor
from .partitioning import TMPDIR_ENV, run_2ps
from .scoring import dbh_partitioner, hdrf_partitioner

ALGOS = ("2ps", "hdrf", "dbh")
CLUSTER_SENTINEL = 0xFFFFFFFF  # dumped in place of UNASSIGNED


def _check_k(k: int) -> int:
    if k < 2:
        raise ConfigError("k must be >= 2")
    return k


def _check_alpha(alpha: float) -> float:
    if alpha < 1.0:
        raise ConfigError("alpha must be >= 1.0")
    return alpha


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.6f}"
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


def _print_report(report) -> None:
    data = report.to_dict()
    data.pop("phase_times", None)  # timings vary run to run; see --report
    peak = data.pop("peak_state", {})
    for key, value in data.items():
        if value is not None:
            print(f"{key}={_fmt(value)}")
    for key, value in peak.items():
        print(f"peak_state.{key}={value}")


def cmd_generate(args) -> int:
    cfg = GeneratorConfig(n_vertices=args.vertices, exponent=args.exponent, seed=args.seed)
    stream = generate_power_law(cfg, args.out)
    print(f"wrote {args.out}: {stream.vertex_count} vertices, {stream.edge_count} edges")
    return 0


def cmd_cluster(args) -> int:
    k = _check_k(args.k)
    stream = open_stream(args.graph, vertex_count=args.vertices)
    degrees = compute_degrees(stream)
    state = streaming_clustering(stream, degrees, k)
    dump = np.asarray(
        [c if c != UNASSIGNED else CLUSTER_SENTINEL for c in state.v2c], dtype="<u4"
    )
    dump.tofile(args.out)
    print(f"wrote {args.out}: {len(state.nonempty_clusters())} clusters over {len(dump)} vertices")
    return 0


def cmd_partition(args) -> int:
    k = _check_k(args.k)
    alpha = _check_alpha(args.alpha)
    stream = open_stream(args.graph, vertex_count=args.vertices)
    if args.algo == "2ps":
        report = run_2ps(stream, k, alpha=alpha, lam=args.lam, out_path=args.out)
    else:
        t = time.perf_counter()
        degrees = compute_degrees(stream)
        degree_time = time.perf_counter() - t
        if args.algo == "hdrf":
            report = hdrf_partitioner(
                stream, degrees, k, lam=args.lam, alpha=alpha, out_path=args.out
            )
        else:
            report = dbh_partitioner(stream, degrees, k, alpha=alpha, out_path=args.out)
        report.phase_times["degrees"] = degree_time
    if args.report:
        with open(args.report, "w") as fh:
            json.dump(report.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")
    _print_report(report)
    return 0


def cmd_metrics(args) -> int:
    k = _check_k(args.k)
    stream = open_stream(args.graph, vertex_count=args.vertices)
    matrix, loads = assignment_cover(stream, args.assignment, k)
    degenerate = stream.edge_count == 0 or matrix.covered_vertices() == 0
    rf = 1.0 if degenerate else replication_factor(matrix)
    print(f"edge_count={stream.edge_count}")
    print(f"vertex_count={stream.vertex_count}")
    print(f"k={k}")
    print(f"rf={_fmt(rf)}")
    print(f"alpha_observed={_fmt(observed_imbalance(loads, stream.edge_count))}")
    print(f"max_load={int(loads.sizes.max())}")
    print(f"degenerate={_fmt(degenerate)}")
    if args.clusters:
        v2c = np.fromfile(args.clusters, dtype="<u4").astype(np.int64)
        if v2c.size != stream.vertex_count:
            raise ConfigError(
                f"{args.clusters}: {v2c.size} entries for {stream.vertex_count} vertices"
            )
        v2c[v2c == CLUSTER_SENTINEL] = UNASSIGNED
        degrees = compute_degrees(stream)
        print(f"modularity={_fmt(modularity(stream, v2c, degrees))}")
    return 0


def _failure_status(exc: Exception) -> str:
    text = " ".join(str(exc).split())  # keep the TSV single-line
    return f"failed({text})"


def _sweep_cell(stream, algo, k, alpha, lam):
    if algo == "2ps":
        return run_2ps(stream, k, alpha=alpha, lam=lam)
    degrees = compute_degrees(stream)
    if algo == "hdrf":
        return hdrf_partitioner(stream, degrees, k, lam=lam, alpha=alpha)
    return dbh_partitioner(stream, degrees, k, alpha=alpha)


def cmd_sweep(args) -> int:
    exponents = [float(x) for x in args.exponents.split(",") if x.strip()]
    seeds = [int(x) for x in args.seeds.split(",") if x.strip()]
    algos = [x.strip() for x in args.algos.split(",") if x.strip()]
    if not exponents:
        raise ConfigError("at least one exponent is required")
    if not seeds:
        raise ConfigError("at least one seed is required")
    if not algos:
        raise ConfigError("at least one algorithm is required")
    for algo in algos:
        if algo not in ALGOS:
            raise ConfigError(f"unknown algorithm {algo!r}")
    k = _check_k(args.k)
    alpha = _check_alpha(args.alpha)

    header = ["exponent", "seed", "algo", "status", "rf", "modularity",
              "prepartitioned_ratio", "alpha_observed"]
    rows = []
    with tempfile.TemporaryDirectory(dir=os.environ.get(TMPDIR_ENV) or None) as tmp:
        for exponent in exponents:
            for seed in seeds:
                graph_path = os.path.join(tmp, f"g_{exponent:g}_{seed}.bin")
                try:
                    cfg = GeneratorConfig(args.vertices, exponent, seed)
                    stream = generate_power_law(cfg, graph_path)
                except StreampartError as exc:
                    for algo in algos:
                        rows.append([f"{exponent:g}", str(seed), algo,
                                     _failure_status(exc), "", "", "", ""])
                    continue
                for algo in algos:
                    try:
                        report = _sweep_cell(stream, algo, k, alpha, args.lam)
                    except Exception as exc:
                        rows.append([f"{exponent:g}", str(seed), algo,
                                     _failure_status(exc), "", "", "", ""])
                        continue
                    rows.append([
                        f"{exponent:g}",
                        str(seed),
                        algo,
                        "ok",
                        _fmt(report.rf),
                        _fmt(report.modularity) if report.modularity is not None else "",
                        _fmt(report.prepartitioned_ratio)
                        if report.prepartitioned_ratio is not None else "",
                        _fmt(report.alpha_observed),
                    ])

    table = "\t".join(header) + "\n" + "".join("\t".join(r) + "\n" for r in rows)
    summary = _sweep_summary(rows)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(table)
        print(summary, end="")
    else:
        sys.stdout.write(table)
        print(summary, end="", file=sys.stderr)
    return 0


def _sweep_summary(rows) -> str:
    grouped: dict[tuple[str, str], list[list[str]]] = {}
    for row in rows:
        grouped.setdefault((row[0], row[2]), []).append(row)
    lines = []
    for (exponent, algo), cells in grouped.items():
        ok = [c for c in cells if c[3] == "ok"]
        line = f"summary exponent={exponent} algo={algo} cells={len(cells)} ok={len(ok)}"
        if ok:
            line += f" rf={np.mean([float(c[4]) for c in ok]):.6f}"
            if all(c[5] for c in ok):
                line += f" modularity={np.mean([float(c[5]) for c in ok]):.6f}"
            if all(c[6] for c in ok):
                line += f" prepartitioned_ratio={np.mean([float(c[6]) for c in ok]):.6f}"
        lines.append(line)
    return "".join(line + "\n" for line in lines)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="streampart",
        description="Streaming vertex-cut edge partitioning toolkit.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a random power-law graph")
    p.add_argument("--vertices", type=int, required=True)
    p.add_argument("--exponent", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("cluster", help="run streaming clustering, dump vertex-to-cluster ids")
    p.add_argument("--graph", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--vertices", type=int, default=None)
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("partition", help="partition a graph's edges")
    p.add_argument("--algo", choices=ALGOS, required=True)
    p.add_argument("--graph", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--alpha", type=float, default=1.05)
    p.add_argument("--lambda", dest="lam", type=float, default=1.1)
    p.add_argument("--out", default=None, help="assignment file (uint32 per edge)")
    p.add_argument("--report", default=None, help="write the full report as JSON")
    p.add_argument("--vertices", type=int, default=None)
    p.set_defaults(func=cmd_partition)

    p = sub.add_parser("metrics", help="recompute quality metrics from files")
    p.add_argument("--graph", required=True)
    p.add_argument("--assignment", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--clusters", default=None, help="v2c dump; adds modularity")
    p.add_argument("--vertices", type=int, default=None)
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("sweep", help="generate-partition-measure over exponents and seeds")
    p.add_argument("--exponents", required=True, help="comma-separated list")
    p.add_argument("--seeds", default="0", help="comma-separated list")
    p.add_argument("--algos", default="2ps", help="comma-separated subset of 2ps,hdrf,dbh")
    p.add_argument("--vertices", type=int, default=100_000)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--alpha", type=float, default=1.05)
    p.add_argument("--lambda", dest="lam", type=float, default=1.1)
    p.add_argument("--out", default=None, help="write the TSV table here instead of stdout")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (StreampartError, FileNotFoundError, IsADirectoryError, PermissionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
