"""End-to-end analysis over one partition: graphs, communities, chains, report.

Per-day work is a pure function of the partition, so days can be processed
with a thread pool (capped by DFA_THREADS) without changing any output;
results are always assembled in day order.
"""

from __future__ import annotations

import datetime as dt
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .classify import CategorySet
from .community import (DEFAULT_K_MIN, DEFAULT_THETA, Community,
                        CommunityChain, extract_communities, track_communities)
from .graph import (DailyGraph, Projection, build_day_graph,
                    co_engagement_projection, filter_graph)
from .ingest import EventPartition
from .metrics import CategoryDistribution, FragmentationReport, build_report


def thread_count() -> int:
    """Worker cap from DFA_THREADS; defaults to 1 (sequential)."""
    raw = os.environ.get("DFA_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


@dataclass(frozen=True)
class DayResult:
    day: dt.date
    graph: DailyGraph
    projections: dict[str, Projection]
    communities: list[Community]


@dataclass(frozen=True)
class PartitionAnalysis:
    partition: EventPartition
    categories: CategorySet
    days: list[DayResult]
    chains_by_category: dict[str, list[CommunityChain]]
    report: FragmentationReport

    @property
    def communities_by_day(self) -> dict[dt.date, list[Community]]:
        return {d.day: d.communities for d in self.days}


def _analyze_day(partition: EventPartition, categories: CategorySet,
                 day: dt.date, k_min: int) -> DayResult:
    g = filter_graph(build_day_graph(partition, day))
    projections = {label: co_engagement_projection(g, label, categories)
                   for label in categories.labels}
    communities: list[Community] = []
    for label in categories.labels:
        communities.extend(extract_communities(projections[label], day, k_min))
    return DayResult(day=day, graph=g, projections=projections,
                     communities=communities)


def analyze_partition(partition: EventPartition, categories: CategorySet,
                      k_min: int = DEFAULT_K_MIN, theta: float = DEFAULT_THETA,
                      baseline: CategoryDistribution | None = None,
                      top_n: int = 10,
                      threads: int | None = None) -> PartitionAnalysis:
    """Run the full per-partition analysis and assemble its report block."""
    window_days = partition.window.days()
    workers = thread_count() if threads is None else max(1, threads)
    if workers > 1 and len(window_days) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            day_results = list(pool.map(
                lambda d: _analyze_day(partition, categories, d, k_min),
                window_days))
    else:
        day_results = [_analyze_day(partition, categories, d, k_min)
                       for d in window_days]

    chains_by_category: dict[str, list[CommunityChain]] = {}
    for label in categories.labels:
        cat_comms = [c for r in day_results for c in r.communities
                     if c.category == label]
        chains_by_category[label] = track_communities(cat_comms, theta) if cat_comms else []

    report = build_report(
        partition=partition,
        categories=categories,
        day_graphs={r.day: r.graph for r in day_results},
        projections={r.day: r.projections for r in day_results},
        communities_by_day={r.day: r.communities for r in day_results},
        chains_by_category=chains_by_category,
        baseline=baseline,
        top_n=top_n,
    )
    return PartitionAnalysis(partition=partition, categories=categories,
                             days=day_results,
                             chains_by_category=chains_by_category,
                             report=report)
