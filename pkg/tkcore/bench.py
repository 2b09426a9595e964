"""
Random graphs and workloads, oracle verification and benchmark reports.
"""
import os
import time
from dataclasses import dataclass, field

import astropy.units as u
import networkx as nx
import numpy as np
from astropy.table import Table

from tkcore import log
from tkcore.config import conf
from tkcore.coretime import all_edge_core_times
from tkcore.ctmsf import build_ctmsf
from tkcore.graph import TemporalGraph, core_numbers, project
from tkcore.oracle import window_components
from tkcore.pecb import build
from tkcore.query import Query, batch_query

__all__ = ['INDEX_BUILDERS', 'measure_kmax', 'parse_k_list', 'random_graph', 'clustered_graph',
           'write_edge_list', 'random_queries', 'VerifyReport', 'verify', 'run_bench',
           'BENCH_COLUMNS']

#: Index kind name to build function ``(g, k, table) -> index``.
INDEX_BUILDERS = {"pecb": build, "ctmsf": build_ctmsf}

BENCH_COLUMNS = ("dataset", "k", "kind", "coretime_seconds", "build_seconds", "index_bytes",
                 "avg_query_us", "median_query_us", "queries", "pass_rate")

K_ITEM_ERROR = "Cannot parse k value {0!r}; expected an integer or a percentage like '70%'."


def measure_kmax(g):
    """
    Largest ``k`` whose k-core of the full window is nonempty.

    Returns 0 for a graph without edges.
    """
    if not g.m:
        return 0
    return max(core_numbers(project(g, (1, g.t_max))).values())


def parse_k_list(text, kmax):
    """
    Parse a comma separated list of ``k`` values.

    Items ending in ``%`` are percentages of ``kmax``, rounded half up and
    never below 1.  Duplicates are dropped, order is kept.

    Examples
    --------
    >>> parse_k_list("50%,90%,3", 10)
    [5, 9, 3]
    """
    ks = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        try:
            if item.endswith("%"):
                k = max(1, int(np.floor(float(item[:-1]) * kmax / 100 + 0.5)))
            else:
                k = int(item)
        except ValueError:
            raise ValueError(K_ITEM_ERROR.format(item)) from None
        if k < 1:
            raise ValueError(K_ITEM_ERROR.format(item))
        if k not in ks:
            ks.append(k)
    if not ks:
        raise ValueError("Empty list of k values.")
    return ks


def _random_edges(n_vertices, n_edges, t_max, seed):
    if n_vertices < 2 or n_edges < 1 or t_max < 1:
        raise ValueError("Random graphs need at least 2 vertices, 1 edge and t_max >= 1.")
    rng = np.random.default_rng(seed)
    src = rng.integers(0, n_vertices, n_edges)
    dst = rng.integers(0, n_vertices - 1, n_edges)
    dst = dst + (dst >= src)
    times = rng.integers(1, t_max + 1, n_edges)
    return src, dst, times


def random_graph(n_vertices, n_edges, t_max, seed):
    """
    A seeded uniform random temporal graph without self-loops.

    Timestamps are drawn from ``1 .. t_max`` and may leave gaps.
    """
    src, dst, times = _random_edges(n_vertices, n_edges, t_max, seed)
    return TemporalGraph(src, dst, times, n=n_vertices,
                         meta={"source": f"random(n={n_vertices}, m={n_edges}, "
                                         f"t_max={t_max}, seed={seed})"})


def clustered_graph(n_vertices, n_edges, t_max, club_size, club_edges, seed):
    """
    A seeded temporal graph shaped like a messaging network.

    Most messages repeat the pairs of a scale-free contact graph
    (`networkx.barabasi_albert_graph` with two links per vertex), whose
    k-cores are empty for ``k >= 3``.  The first ``club_size`` vertices form
    a club that exchanges ``club_edges`` messages covering every club pair,
    so the full window has ``k_max = club_size - 1`` and cores of high ``k``
    stay inside the club.  Days are uniform over ``1 .. t_max``.

    Returns
    -------
    graph: `tkcore.graph.TemporalGraph`
    """
    club_pairs = [(a, b) for a in range(club_size) for b in range(a + 1, club_size)]
    if not (4 <= club_size < n_vertices and len(club_pairs) <= club_edges < n_edges and
            t_max >= 1):
        raise ValueError("Clustered graphs need 4 <= club_size < n_vertices, "
                         "club_size * (club_size - 1) / 2 <= club_edges < n_edges and "
                         "t_max >= 1.")
    rng = np.random.default_rng(seed)
    contacts = np.array(list(nx.barabasi_albert_graph(n_vertices, 2, seed=seed).edges))
    club = np.array(club_pairs)
    picks = np.concatenate([
        contacts[rng.integers(0, len(contacts), n_edges - club_edges)],
        club,
        club[rng.integers(0, len(club), club_edges - len(club))],
    ])
    times = rng.integers(1, t_max + 1, n_edges)
    return TemporalGraph(picks[:, 0], picks[:, 1], times, n=n_vertices,
                         meta={"source": f"clustered(n={n_vertices}, m={n_edges}, "
                                         f"t_max={t_max}, club={club_size}, seed={seed})"})


def write_edge_list(path, n_vertices, n_edges, t_max, seed):
    """
    Write a seeded random temporal graph as a ``u v t`` edge list.

    The same arguments always produce the same bytes.
    """
    src, dst, times = _random_edges(n_vertices, n_edges, t_max, seed)
    with open(path, "w", newline="\n") as f:
        f.write(f"# random temporal graph n={n_vertices} m={n_edges} "
                f"t_max={t_max} seed={seed}\n")
        for a, b, t in zip(src.tolist(), dst.tolist(), times.tolist()):
            f.write(f"{a} {b} {t}\n")


def random_queries(n_vertices, t_max, count, seed):
    """
    Seeded queries with a uniform vertex and a uniform window.

    Windows are uniform over all ordered pairs ``1 <= ts <= te <= t_max``.

    Returns
    -------
    queries: `list` of `tkcore.query.Query`
    """
    rng = np.random.default_rng(seed)
    us = rng.integers(0, n_vertices, count)
    starts, ends = [], []
    while len(starts) < count:
        a = rng.integers(1, t_max + 1, 2 * count)
        b = rng.integers(1, t_max + 1, 2 * count)
        keep = a <= b
        starts.extend(a[keep].tolist())
        ends.extend(b[keep].tolist())
    return [Query(int(vertex), ts, te)
            for vertex, ts, te in zip(us.tolist(), starts[:count], ends[:count])]


@dataclass
class VerifyReport:
    """
    Outcome of comparing an index against the brute-force oracle.
    """
    checks: int = 0
    exhaustive: bool = False
    mismatches: list = field(default_factory=list)

    @property
    def passed(self):
        return not self.mismatches

    @property
    def pass_rate(self):
        if not self.checks:
            return 1.0
        return 1.0 - len(self.mismatches) / self.checks


def _check_window(report, idx, g, k, ts, te, vertices, workers):
    expected = window_components(g, k, (ts, te))
    answers = batch_query(idx, [Query(vertex, ts, te) for vertex in vertices], workers=workers)
    for vertex, answer in zip(vertices, answers):
        report.checks += 1
        if answer != expected.get(vertex, ()):
            report.mismatches.append((Query(vertex, ts, te), answer, expected.get(vertex, ())))


def verify(idx, g, exhaustive=None, samples=None, seed=None, workers=None):
    """
    Compare ``idx`` with the oracle on ``g``.

    Parameters
    ----------
    idx: `tkcore.meta.TemporalIndexABC`
        Index built from ``g``.
    g: `tkcore.graph.TemporalGraph`
    exhaustive: `bool`, optional
        Check every vertex against every window.  Default is to do so when
        there are at most ``conf.exhaustive_check_limit`` checks.
    samples: `int`, optional
        Number of random checks otherwise; default ``conf.sampled_checks``.
    seed: `int`, optional
        Seed of the sampled checks; default ``conf.default_seed``.
    workers: `int`, optional

    Returns
    -------
    report: `VerifyReport`
    """
    t_max = g.t_max
    n_checks = g.n * t_max * (t_max + 1) // 2
    if exhaustive is None:
        exhaustive = n_checks <= conf.exhaustive_check_limit
    report = VerifyReport(exhaustive=exhaustive)
    start = time.perf_counter()
    if exhaustive:
        vertices = list(range(g.n))
        for ts in range(1, t_max + 1):
            for te in range(ts, t_max + 1):
                _check_window(report, idx, g, idx.k, ts, te, vertices, workers)
    else:
        samples = conf.sampled_checks if samples is None else samples
        seed = conf.default_seed if seed is None else seed
        by_window = {}
        for q in random_queries(g.n, t_max, samples, seed):
            by_window.setdefault((q.ts, q.te), []).append(q.u)
        for (ts, te), vertices in sorted(by_window.items()):
            _check_window(report, idx, g, idx.k, ts, te, vertices, workers)
    log.info(f"Verified {idx.kind} index for k={idx.k}: {report.checks} checks, "
             f"{len(report.mismatches)} mismatches in {time.perf_counter() - start:.3f} s")
    return report


def run_bench(g, ks, kinds=("pecb", "ctmsf"), query_count=None, seed=None, workers=None,
              oracle_samples=None, time_limit=None, dataset=None):
    """
    Build every index kind for every ``k`` and time a random workload.

    Parameters
    ----------
    g: `tkcore.graph.TemporalGraph`
    ks: iterable of `int`
    kinds: iterable of `str`
        Keys of `INDEX_BUILDERS`.
    query_count, seed, oracle_samples: `int`, optional
        Defaults from `tkcore.config.conf`.
    workers: `int`, optional
    time_limit: `float`, optional
        Seconds; once a build exceeds it the remaining kinds of that ``k``
        are skipped.
    dataset: `str`, optional
        Name written in the ``dataset`` column.

    Returns
    -------
    report: `astropy.table.Table`
        One row per built ``(k, kind)`` with the `BENCH_COLUMNS`.
        ``build_seconds`` includes the ``coretime_seconds`` of that ``k``.
    """
    query_count = conf.bench_query_count if query_count is None else query_count
    seed = conf.default_seed if seed is None else seed
    oracle_samples = conf.bench_oracle_samples if oracle_samples is None else oracle_samples
    if dataset is None:
        dataset = os.path.basename(g.meta.source or "graph")
    queries = random_queries(g.n, g.t_max, query_count, seed)
    checked = queries[:oracle_samples]
    rows = []
    for k in ks:
        start = time.perf_counter()
        table = all_edge_core_times(g, k)
        coretime_seconds = time.perf_counter() - start
        expected = {}
        for q in checked:
            window = (q.ts, q.te)
            if window not in expected:
                expected[window] = window_components(g, k, window)
        for kind in kinds:
            start = time.perf_counter()
            idx = INDEX_BUILDERS[kind](g, k, table)
            # Build times include the shared core-time step.
            build_seconds = coretime_seconds + time.perf_counter() - start
            results, stats = batch_query(idx, queries, workers=workers, with_stats=True)
            micros = np.array([s.elapsed for s in stats]) * 1e6
            agree = sum(result == expected[(q.ts, q.te)].get(q.u, ())
                        for q, result in zip(checked, results))
            rows.append((dataset, k, kind, coretime_seconds, build_seconds, idx.nbytes,
                         float(micros.mean()) if len(micros) else 0.0,
                         float(np.median(micros)) if len(micros) else 0.0,
                         len(queries), agree / len(checked) if checked else 1.0))
            log.info(f"bench {dataset} k={k} {kind}: build {build_seconds:.3f} s, "
                     f"{idx.nbytes} bytes")
            if time_limit is not None and build_seconds > time_limit:
                log.warning(f"Build of {kind} for k={k} took {build_seconds:.1f} s, more than "
                            f"the {time_limit} s limit; skipping the remaining kinds.")
                break
    report = Table(rows=rows or None, names=BENCH_COLUMNS,
                   dtype=(str, int, str, float, float, int, float, float, int, float))
    report["coretime_seconds"].unit = u.s
    report["build_seconds"].unit = u.s
    report["index_bytes"].unit = u.byte
    report["avg_query_us"].unit = u.us
    report["median_query_us"].unit = u.us
    return report
