"""
The ``tkcore`` command line tool.

Exit codes are 0 on success, 1 on usage errors, 2 on data or file errors
and 3 when verification finds a mismatch.
"""
import argparse
import os
import sys
import time

import numpy as np
from astropy.table import Table

from tkcore import ctmsf, log, pecb
from tkcore.bench import (INDEX_BUILDERS, measure_kmax, parse_k_list, run_bench, verify,
                          write_edge_list)
from tkcore.config import conf
from tkcore.coretime import all_edge_core_times
from tkcore.exceptions import IndexFormatError
from tkcore.graph import (aggregate_days, axis_window, compress_timestamps, load_edge_list,
                          normalize_timestamps)
from tkcore.oracle import tccs_oracle
from tkcore.query import Query, batch_query

__all__ = ['main', 'run', 'load_index', 'load_graph']

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_MISMATCH = 3

#: Magic bytes to deserializer.
INDEX_READERS = {pecb.MAGIC: pecb.deserialize, ctmsf.MAGIC: ctmsf.deserialize}

BATCH_COLUMNS = ("u", "ts", "te", "size", "vertices", "micros")


class UsageError(Exception):
    pass


class _ArgumentParser(argparse.ArgumentParser):

    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def load_index(path):
    """
    Read an index file of any kind, recognised by its magic bytes.

    Returns
    -------
    index: `tkcore.meta.TemporalIndexABC`
    """
    with open(path, "rb") as f:
        magic = f.read(4)
    if magic not in INDEX_READERS:
        raise IndexFormatError(f"{path} is not a tkcore index file (magic {magic!r}).")
    return INDEX_READERS[magic](path)


def load_graph(args):
    """
    Load ``args.input`` and apply the requested timestamp handling.

    Without ``--normalize`` or ``--aggregate-days`` the raw timestamps are
    rank-compressed but kept as the graph's time axis, so builds sweep only
    the distinct timestamps and windows are still given in raw time.
    """
    g = load_edge_list(args.input)
    if args.aggregate_days:
        g = aggregate_days(g, epoch_seconds=not args.milliseconds)
    elif args.normalize:
        g, _ = normalize_timestamps(g)
    else:
        g = compress_timestamps(g)
    log.debug(f"Loaded {args.input}: n={g.n}, m={g.m}, {g.t_max} distinct times")
    return g


def _vertex_id(labels, label):
    hits = np.flatnonzero(np.asarray(labels) == label)
    if len(hits) == 0:
        raise ValueError(f"Vertex {label} does not occur in the graph.")
    return int(hits[0])


def _format_vertices(labels, vertices):
    return " ".join(str(int(labels[vertex])) for vertex in vertices)


def _cmd_build(args):
    g = load_graph(args)
    idx = INDEX_BUILDERS[args.index_kind](g, args.k, None)
    idx.serialize(args.output)
    print(f"{idx.kind} index for k={idx.k}: {g.n} vertices, t_max={g.t_max}, "
          f"{idx.nbytes} bytes written to {args.output}")
    return EXIT_OK


def _cmd_query(args):
    idx = load_index(args.index)
    u = _vertex_id(idx.labels, args.vertex)
    window = axis_window(idx.times, args.start, args.end)
    result = idx.query(u, *window) if window else ()
    print(_format_vertices(idx.labels, result))
    return EXIT_OK


def _cmd_batch(args):
    idx = load_index(args.index)
    workload = Table.read(args.queries, format="ascii.csv")
    missing = {"u", "ts", "te"} - set(workload.colnames)
    if missing:
        raise ValueError(f"{args.queries} lacks the column(s) {sorted(missing)}.")
    vertices = [_vertex_id(idx.labels, int(row["u"])) for row in workload]
    windows = [axis_window(idx.times, int(row["ts"]), int(row["te"])) for row in workload]
    # Windows without any timestamp have an empty answer.
    hits = [i for i, window in enumerate(windows) if window is not None]
    results, stats = batch_query(idx, [Query(vertices[i], *windows[i]) for i in hits],
                                 workers=args.workers, with_stats=True)
    answers = [((), 0.0)] * len(workload)
    for i, result, s in zip(hits, results, stats):
        answers[i] = (result, s.elapsed * 1e6)
    rows = [(int(row["u"]), int(row["ts"]), int(row["te"]), len(result),
             _format_vertices(idx.labels, result), micros)
            for row, (result, micros) in zip(workload, answers)]
    report = Table(rows=rows or None, names=BATCH_COLUMNS,
                   dtype=(int, int, int, int, str, float))
    report.write(args.output, format="ascii.csv", overwrite=True)
    log.info(f"Answered {len(rows)} queries into {args.output}")
    return EXIT_OK


def _cmd_oracle(args):
    g = load_graph(args)
    u = _vertex_id(g.labels, args.vertex)
    window = axis_window(g.time_axis, args.start, args.end)
    result = tccs_oracle(g, args.k, u, window) if window else ()
    print(_format_vertices(g.labels, result))
    return EXIT_OK


def _cmd_coretimes(args):
    g = load_graph(args)
    rows = all_edge_core_times(g, args.k).to_table(g)
    if args.output:
        rows.write(args.output, format="ascii.csv", overwrite=True)
    else:
        rows.write(sys.stdout, format="ascii.csv")
    return EXIT_OK


def _cmd_verify(args):
    g = load_graph(args)
    if args.index:
        idx = load_index(args.index)
        if idx.k != args.k:
            raise ValueError(f"{args.index} was built for k={idx.k}, not k={args.k}.")
        if (idx.n_vertices, idx.t_max) != (g.n, g.t_max):
            raise ValueError(f"{args.index} was not built from {args.input} with these options.")
    else:
        idx = INDEX_BUILDERS[args.index_kind](g, args.k, None)
    report = verify(idx, g, exhaustive=True if args.exhaustive else None,
                    samples=args.samples, seed=args.seed, workers=args.workers)
    mode = "exhaustive" if report.exhaustive else "sampled"
    times = g.time_axis
    for q, got, expected in report.mismatches[:10]:
        print(f"mismatch u={g.label_of(q.u)} [{times[q.ts - 1]}, {times[q.te - 1]}]: index "
              f"{{{_format_vertices(g.labels, got)}}} oracle "
              f"{{{_format_vertices(g.labels, expected)}}}")
    status = "pass" if report.passed else "FAIL"
    print(f"{status}: {report.checks - len(report.mismatches)}/{report.checks} {mode} "
          f"checks agree with the oracle")
    return EXIT_OK if report.passed else EXIT_MISMATCH


def _cmd_bench(args):
    g = load_graph(args)
    kmax = measure_kmax(g)
    ks = parse_k_list(args.k or ",".join(f"{p.strip()}%" for p in
                                         conf.default_k_percentages.split(",")), kmax)
    kinds = [kind.strip() for kind in args.kinds.split(",")]
    unknown = set(kinds) - set(INDEX_BUILDERS)
    if unknown:
        raise UsageError(f"Unknown index kind(s) {sorted(unknown)}.")
    log.info(f"k_max={kmax}, benchmarking k={ks}")
    report = run_bench(g, ks, kinds=kinds, query_count=args.queries, seed=args.seed,
                       workers=args.workers, time_limit=args.time_limit,
                       dataset=os.path.basename(args.input))
    if args.output:
        report.write(args.output, format="ascii.csv", overwrite=True)
    else:
        report.write(sys.stdout, format="ascii.csv")
    return EXIT_OK


def _cmd_gen(args):
    write_edge_list(args.output, args.vertices, args.edges, args.tmax, args.seed)
    return EXIT_OK


def _cmd_stats(args):
    idx = load_index(args.index)
    print(f"kind: {idx.kind}")
    print(f"k: {idx.k}")
    print(f"vertices: {idx.n_vertices}")
    print(f"t_max: {idx.t_max}")
    if idx.t_max:
        print(f"times: {int(idx.times[0])} to {int(idx.times[-1])}")
    if idx.kind == "pecb":
        stats = idx.stats()
        for key, value in stats.summary().items():
            print(f"{key}: {value}")
        print(f"max_depth: {int(stats.depth_per_ts.max(initial=0))}")
        if args.per_ts:
            stats.to_table().write(args.per_ts, format="ascii.csv", overwrite=True)
    else:
        print(f"records: {len(idx.arrays['record_start'])}")
        print(f"list_items: {len(idx.arrays['item_edge'])}")
        print(f"bytes: {idx.nbytes}")
    return EXIT_OK


def _add_graph_options(parser, k=True):
    parser.add_argument("--input", required=True, help="Edge list with 'u v t' lines.")
    if k:
        parser.add_argument("--k", type=int, required=True, help="Core order k >= 1.")
    times = parser.add_mutually_exclusive_group()
    times.add_argument("--normalize", action="store_true",
                       help="Rank-compress timestamps to 1..t_max.")
    times.add_argument("--aggregate-days", action="store_true",
                       help="Bucket epoch timestamps into days, then normalize.")
    parser.add_argument("--milliseconds", action="store_true",
                        help="With --aggregate-days, epoch timestamps are in milliseconds.")


def _index_kind_option(parser):
    parser.add_argument("--index-kind", choices=sorted(INDEX_BUILDERS), default="pecb",
                        help="Index to build (default: pecb).")


def _workers_option(parser):
    parser.add_argument("--workers", type=int, default=None,
                        help="Query threads (default: conf.query_workers).")


def make_parser():
    parser = _ArgumentParser(prog="tkcore",
                             description="Historical temporal k-core component search.")
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("--verbose", action="store_true", help="Log debug messages.")
    verbosity.add_argument("--quiet", action="store_true", help="Log warnings only.")
    commands = parser.add_subparsers(dest="command", metavar="command",
                                     parser_class=_ArgumentParser)
    commands.required = True

    p = commands.add_parser("build", help="Build an index file.")
    _add_graph_options(p)
    _index_kind_option(p)
    p.add_argument("--output", required=True, help="Index file to write.")
    p.set_defaults(func=_cmd_build)

    p = commands.add_parser("query", help="Answer one query from an index file.")
    p.add_argument("--index", required=True)
    p.add_argument("--vertex", type=int, required=True, help="Original vertex label.")
    p.add_argument("--start", type=int, required=True)
    p.add_argument("--end", type=int, required=True)
    p.set_defaults(func=_cmd_query)

    p = commands.add_parser("batch", help="Answer a CSV of 'u,ts,te' queries.")
    p.add_argument("--index", required=True)
    p.add_argument("--queries", required=True, help="CSV with columns u,ts,te.")
    p.add_argument("--output", required=True, help="CSV of answers.")
    _workers_option(p)
    p.set_defaults(func=_cmd_batch)

    p = commands.add_parser("oracle", help="Answer one query by brute force.")
    _add_graph_options(p)
    p.add_argument("--vertex", type=int, required=True, help="Original vertex label.")
    p.add_argument("--start", type=int, required=True)
    p.add_argument("--end", type=int, required=True)
    p.set_defaults(func=_cmd_oracle)

    p = commands.add_parser("coretimes", help="Write the edge core time table as CSV.")
    _add_graph_options(p)
    p.add_argument("--output", help="CSV file (default: standard output).")
    p.set_defaults(func=_cmd_coretimes)

    p = commands.add_parser("verify", help="Compare an index with the oracle.")
    _add_graph_options(p)
    _index_kind_option(p)
    p.add_argument("--index", help="Verify this index file instead of building one.")
    checks = p.add_mutually_exclusive_group()
    checks.add_argument("--exhaustive", action="store_true",
                        help="Check every vertex against every window.")
    checks.add_argument("--samples", type=int, default=None,
                        help="Number of sampled checks (default: conf.sampled_checks).")
    p.add_argument("--seed", type=int, default=None)
    _workers_option(p)
    p.set_defaults(func=_cmd_verify)

    p = commands.add_parser("bench", help="Benchmark index kinds as CSV.")
    _add_graph_options(p, k=False)
    p.add_argument("--k", help="Comma separated k values or percentages of k_max, "
                               "e.g. '50%%,70%%,4'.")
    p.add_argument("--kinds", default="pecb,ctmsf")
    p.add_argument("--queries", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--time-limit", type=float, default=None,
                   help="Skip the remaining kinds of a k once a build takes longer (s).")
    p.add_argument("--output", help="CSV file (default: standard output).")
    _workers_option(p)
    p.set_defaults(func=_cmd_bench)

    p = commands.add_parser("gen", help="Write a seeded random temporal graph.")
    p.add_argument("--vertices", type=int, required=True)
    p.add_argument("--edges", type=int, required=True)
    p.add_argument("--tmax", type=int, required=True)
    p.add_argument("--seed", type=int, default=conf.default_seed)
    p.add_argument("--output", required=True)
    p.set_defaults(func=_cmd_gen)

    p = commands.add_parser("stats", help="Report the size and shape of an index file.")
    p.add_argument("--index", required=True)
    p.add_argument("--per-ts", help="Also write per start time counts to this CSV.")
    p.set_defaults(func=_cmd_stats)
    return parser


def run(argv=None):
    """
    Run the command line tool.

    Returns
    -------
    code: `int`
        The exit code.
    """
    try:
        args = make_parser().parse_args(argv)
    except UsageError as e:
        print(e, file=sys.stderr)
        return EXIT_USAGE
    level = log.level
    if args.verbose:
        log.setLevel("DEBUG")
    elif args.quiet:
        log.setLevel("WARNING")
    start = time.perf_counter()
    try:
        code = args.func(args)
        log.debug(f"{args.command} finished in {time.perf_counter() - start:.3f} s")
    except UsageError as e:
        print(f"tkcore {args.command}: error: {e}", file=sys.stderr)
        code = EXIT_USAGE
    except (ValueError, OSError) as e:
        print(f"tkcore {args.command}: error: {e}", file=sys.stderr)
        code = EXIT_DATA
    finally:
        log.setLevel(level)
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
