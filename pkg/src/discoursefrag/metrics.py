"""Fragmentation metric suite over partitions, day graphs, and chains.

Edge-based metrics always work on deduplicated undirected edges between
sender personas. Undefined values are explicit (None plus a defined flag
in serialized form), never NaN, so reports stay machine-diffable.
"""

from __future__ import annotations

import datetime as dt
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .classify import CategorySet
from .community import (Community, CommunityChain, LifespanStats,
                        chain_to_dict, lifespan_stats)
from .graph import DailyGraph, PersonaNode, Projection
from .ingest import EventPartition, EventWindow

REACTION_CAP = 1e6
REACTION_FLOOR = 1e-9

# the fourteen analytical elements and the report fields that serve each
ELEMENTS: dict[str, tuple[str, ...]] = {
    "content_focus": ("dominance_series", "comparisons"),
    "societal_discourse_themes": ("dominance_series", "comparisons"),
    "cultural_and_societal_trends": ("dominance_series", "comparisons"),
    "relational_dynamics": ("influencers", "degree_stats"),
    "influential_participants": ("influencers",),
    "opinion_formation_and_evolution": ("community_size_series", "community_share_series"),
    "polarization": ("ei_series",),
    "segmentation": ("segmentation_series", "community_count_series"),
    "ephemerality": ("lifespan_stats",),
    "historical_comparisons": ("comparisons",),
    "reaction_to_social_and_political_issues": ("reaction_indices",),
    "dominance": ("dominance_series",),
    "diversity_and_echo_chambers": ("diversity_series", "chain_growth", "scatter_series"),
    "discussion_cohesiveness": ("cohesiveness_table",),
}


@dataclass(frozen=True)
class CategoryDistribution:
    """Per-category shares of labeled posts; undefined when nothing counted."""

    shares: dict[str, float]
    sample_count: int

    def __post_init__(self):
        if self.sample_count > 0:
            total = sum(self.shares.values())
            if abs(total - 1.0) > 1e-9:
                raise ValueError(f"shares must sum to 1, got {total}")

    @property
    def defined(self) -> bool:
        return self.sample_count > 0


def distribution_of(labels: Iterable[str], categories: CategorySet) -> CategoryDistribution:
    counts = {label: 0 for label in categories.labels}
    n = 0
    for label in labels:
        counts[label] += 1
        n += 1
    shares = {label: (counts[label] / n if n else 0.0) for label in categories.labels}
    return CategoryDistribution(shares=shares, sample_count=n)


def dominance_series(partition: EventPartition,
                     categories: CategorySet) -> dict[dt.date, CategoryDistribution]:
    """Per-day share of labeled posts per category, over the whole window.

    Days with no posts yield an undefined (empty-flagged) distribution.
    """
    by_day: dict[dt.date, list[str]] = {day: [] for day in partition.window.days()}
    for p in partition.posts:
        by_day[p.day].append(p.label)
    return {day: distribution_of(by_day[day], categories)
            for day in partition.window.days()}


def _sender_edge_split(g: DailyGraph, category: str | None = None) -> tuple[int, int]:
    """(external, internal) counts over deduplicated sender-sender edges."""
    external = internal = 0
    for a, b in g.simple_sender_edges():
        if category is not None and category not in (a.category, b.category):
            continue
        if a.category == b.category:
            internal += 1
        else:
            external += 1
    return external, internal


def ei_index(g: DailyGraph, category: str | None = None) -> float | None:
    """Krackhardt-style E-I index: (external - internal) / (external + internal).

    Computed over deduplicated undirected edges whose both endpoints are
    sender personas; -1 is fully insular, +1 fully cross-cutting. None
    when no such edges exist. The per-category variant restricts to edges
    touching that category.
    """
    external, internal = _sender_edge_split(g, category)
    if external + internal == 0:
        return None
    return (external - internal) / (external + internal)


def diversity_fraction(g: DailyGraph) -> float | None:
    """Cross-category fraction of sender-sender edges; None when none."""
    external, internal = _sender_edge_split(g)
    if external + internal == 0:
        return None
    return external / (external + internal)


@dataclass(frozen=True)
class Segmentation:
    community_count: dict[str, int]
    modularity: float | None


def modularity_by_category(g: DailyGraph) -> float | None:
    """Newman modularity of the category partition on sender-sender edges.

    Q = sum_c (e_cc - a_c^2) over the deduplicated undirected subgraph;
    None when that subgraph has no edges.
    """
    edges = g.simple_sender_edges()
    m = len(edges)
    if m == 0:
        return None
    within: dict[str, int] = {}
    endpoints: dict[str, int] = {}
    for a, b in edges:
        endpoints[a.category] = endpoints.get(a.category, 0) + 1
        endpoints[b.category] = endpoints.get(b.category, 0) + 1
        if a.category == b.category:
            within[a.category] = within.get(a.category, 0) + 1
    q = 0.0
    for cat in sorted(endpoints):
        e_cc = within.get(cat, 0) / m
        a_c = endpoints[cat] / (2 * m)
        q += e_cc - a_c * a_c
    return q


def segmentation(g: DailyGraph, communities: Sequence[Community],
                 categories: CategorySet) -> Segmentation:
    counts = {label: 0 for label in categories.labels}
    for c in communities:
        counts[c.category] += 1
    return Segmentation(community_count=counts, modularity=modularity_by_category(g))


@dataclass(frozen=True)
class Cohesiveness:
    internal_density: float
    conductance: float | None


def cohesiveness(community: Community, projection: Projection,
                 g: DailyGraph,
                 projection_edges: Sequence[tuple] | None = None,
                 graph_edges: Sequence[tuple] | None = None) -> Cohesiveness:
    """Internal density on the projection and conductance on the day graph.

    Density counts projection edges among the community's members over
    n(n-1)/2. Conductance is cut / min(vol(S), vol(rest)) on the
    deduplicated day graph with S = the members' sender personas; a zero
    cut is reported as 0. The edge lists can be precomputed and passed in
    when scoring many communities of one day.
    """
    if projection_edges is None:
        projection_edges = projection.edge_list()
    if graph_edges is None:
        graph_edges = g.simple_edges()
    member_nodes = {PersonaNode(u, community.category) for u in community.members}
    n = len(member_nodes)
    m_in = sum(1 for a, b in projection_edges
               if a in member_nodes and b in member_nodes)
    density = 2.0 * m_in / (n * (n - 1)) if n > 1 else 0.0

    cut = 0
    vol_s = 0
    vol_rest = 0
    for a, b in graph_edges:
        a_in, b_in = a in member_nodes, b in member_nodes
        vol_s += a_in + b_in
        vol_rest += (not a_in) + (not b_in)
        if a_in != b_in:
            cut += 1
    if cut == 0:
        conductance = 0.0
    elif min(vol_s, vol_rest) == 0:
        conductance = None
    else:
        conductance = cut / min(vol_s, vol_rest)
    return Cohesiveness(internal_density=density, conductance=conductance)


def scatter_ratio(g: DailyGraph, category: str,
                  communities: Sequence[Community]) -> float | None:
    """Fraction of a category's senders outside any of its communities."""
    personas = [n for n in g.sender_nodes() if n.category == category]
    if not personas:
        return None
    in_communities: set[str] = set()
    for c in communities:
        if c.category == category:
            in_communities |= c.members
    inside = sum(1 for n in personas if n.user_id in in_communities)
    return 1.0 - inside / len(personas)


@dataclass(frozen=True)
class ReactionIndex:
    value: float | None
    saturated: bool
    defined: bool


def reaction_index(dominance: Mapping[dt.date, CategoryDistribution],
                   window: EventWindow, category: str) -> ReactionIndex:
    """Relative shift of a category's mean share after the event.

    Pre-window is [start, event day - 1], post-window [event day, end];
    only days with posts enter the means. The pre mean is floored at 1e-9
    and reported values are capped at +/-1e6 with a saturation flag.
    """
    pre_days = [d for d in window.days() if d < window.event_date]
    post_days = [d for d in window.days() if d >= window.event_date]

    def mean_share(days: list[dt.date]) -> float | None:
        vals = [dominance[d].shares[category] for d in days
                if d in dominance and dominance[d].defined]
        if not vals:
            return None
        return sum(vals) / len(vals)

    pre = mean_share(pre_days)
    post = mean_share(post_days)
    if pre is None or post is None:
        return ReactionIndex(value=None, saturated=False, defined=False)
    raw = (post - pre) / max(pre, REACTION_FLOOR)
    if abs(raw) > REACTION_CAP:
        return ReactionIndex(value=math.copysign(REACTION_CAP, raw),
                             saturated=True, defined=True)
    return ReactionIndex(value=raw, saturated=False, defined=True)


@dataclass(frozen=True)
class DistributionComparison:
    deltas: dict[str, float]
    rank_left: list[str]
    rank_right: list[str]
    total_variation: float
    defined: bool


def compare_distributions(p: CategoryDistribution,
                          q: CategoryDistribution) -> DistributionComparison:
    """Per-category delta (q - p), rank tables, and total variation distance."""
    if set(p.shares) != set(q.shares):
        raise ValueError("distributions cover different category sets")
    order = list(p.shares)
    rank = {label: i for i, label in enumerate(order)}
    deltas = {label: q.shares[label] - p.shares[label] for label in order}
    tvd = 0.5 * sum(abs(deltas[label]) for label in order)
    rank_left = sorted(order, key=lambda l: (-p.shares[l], rank[l]))
    rank_right = sorted(order, key=lambda l: (-q.shares[l], rank[l]))
    return DistributionComparison(deltas=deltas, rank_left=rank_left,
                                  rank_right=rank_right, total_variation=tvd,
                                  defined=p.defined and q.defined)


@dataclass(frozen=True)
class InfluencerReport:
    senders: list[dict]
    receivers: list[dict]
    degree_histogram: dict[int, int]
    edge_kind_breakdown: dict[str, float] | None


def influencers_and_degrees(g: DailyGraph, top_n: int = 10) -> InfluencerReport:
    """Top personas by deduplicated degree, plus degree and edge-kind stats.

    Sender and receiver personas rank separately (degree descending, then
    user id). The kind breakdown keeps parallel edges since each stands
    for a distinct interaction.
    """
    adj = g.undirected_adjacency()
    degree = {n: len(adj[n]) for n in g.nodes}

    senders = sorted((n for n in g.nodes if n.category is not None),
                     key=lambda n: (-degree[n], n.user_id, n.category))
    receivers = sorted((n for n in g.nodes if n.category is None),
                       key=lambda n: (-degree[n], n.user_id))
    histogram: dict[int, int] = {}
    for n in g.nodes:
        histogram[degree[n]] = histogram.get(degree[n], 0) + 1
    histogram = {k: histogram[k] for k in sorted(histogram)}

    kind_counts = {k: 0 for k in ("reply", "retweet", "mention")}
    for e in g.edges:
        kind_counts[e.kind] += 1
    total = sum(kind_counts.values())
    breakdown = ({k: kind_counts[k] / total for k in kind_counts}
                 if total else None)
    return InfluencerReport(
        senders=[{"user_id": n.user_id, "category": n.category, "degree": degree[n]}
                 for n in senders[:top_n]],
        receivers=[{"user_id": n.user_id, "degree": degree[n]}
                   for n in receivers[:top_n]],
        degree_histogram=histogram,
        edge_kind_breakdown=breakdown,
    )


# ---------------------------------------------------------------------------
# report assembly
# ---------------------------------------------------------------------------

@dataclass
class FragmentationReport:
    """All metric series for one or more (area, event) partitions."""

    blocks: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"schema": "fragmentation-report/1",
                "elements": {k: list(v) for k, v in ELEMENTS.items()},
                "blocks": self.blocks}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, indent=2) + "\n"


def _series_rows(values: Mapping[dt.date, float | None]) -> list[dict]:
    return [{"day": d.isoformat(), "value": values[d], "defined": values[d] is not None}
            for d in sorted(values)]


def _distribution_dict(dist: CategoryDistribution) -> dict:
    return {"shares": dist.shares, "sample_count": dist.sample_count,
            "defined": dist.defined}


def build_report(partition: EventPartition,
                 categories: CategorySet,
                 day_graphs: Mapping[dt.date, DailyGraph],
                 projections: Mapping[dt.date, Mapping[str, Projection]],
                 communities_by_day: Mapping[dt.date, Sequence[Community]],
                 chains_by_category: Mapping[str, Sequence[CommunityChain]],
                 baseline: CategoryDistribution | None = None,
                 top_n: int = 10) -> FragmentationReport:
    """Assemble every analytical element for one partition.

    Missing or empty inputs surface as per-field undefined flags; the
    fourteen element keys are always present.
    """
    window = partition.window
    days = window.days()
    dominance = dominance_series(partition, categories)

    ei_vals: dict[dt.date, float | None] = {}
    div_vals: dict[dt.date, float | None] = {}
    mod_vals: dict[dt.date, float | None] = {}
    count_rows: list[dict] = []
    size_rows: list[dict] = []
    share_rows: list[dict] = []
    scatter_rows: list[dict] = []
    cohesion_rows: list[dict] = []
    influencer_rows: list[dict] = []
    degree_rows: list[dict] = []

    for day in days:
        g = day_graphs.get(day)
        comms = list(communities_by_day.get(day, ()))
        if g is None or g.is_empty:
            ei_vals[day] = None
            div_vals[day] = None
            mod_vals[day] = None
            count_rows.append({"day": day.isoformat(),
                               "counts": {l: 0 for l in categories.labels},
                               "defined": False})
            size_rows.append({"day": day.isoformat(),
                              "sizes": {l: [] for l in categories.labels},
                              "defined": False})
            share_rows.append({"day": day.isoformat(),
                               "shares": {l: None for l in categories.labels},
                               "defined": False})
            scatter_rows.append({"day": day.isoformat(),
                                 "ratios": {l: None for l in categories.labels},
                                 "defined": False})
            continue
        ei_vals[day] = ei_index(g)
        div_vals[day] = diversity_fraction(g)
        seg = segmentation(g, comms, categories)
        mod_vals[day] = seg.modularity
        count_rows.append({"day": day.isoformat(), "counts": seg.community_count,
                           "defined": True})
        sizes = {l: sorted((c.size for c in comms if c.category == l), reverse=True)
                 for l in categories.labels}
        size_rows.append({"day": day.isoformat(), "sizes": sizes, "defined": True})
        shares: dict[str, float | None] = {}
        ratios: dict[str, float | None] = {}
        for label in categories.labels:
            ratio = scatter_ratio(g, label, comms)
            ratios[label] = ratio
            shares[label] = None if ratio is None else 1.0 - ratio
        share_rows.append({"day": day.isoformat(), "shares": shares, "defined": True})
        scatter_rows.append({"day": day.isoformat(), "ratios": ratios, "defined": True})
        day_proj = projections.get(day, {})
        day_edges = g.simple_edges()
        proj_edges = {cat: p.edge_list() for cat, p in day_proj.items()}
        for c in comms:
            proj = day_proj.get(c.category)
            if proj is None:
                continue
            coh = cohesiveness(c, proj, g,
                               projection_edges=proj_edges[c.category],
                               graph_edges=day_edges)
            cohesion_rows.append({
                "day": day.isoformat(), "community": c.id, "category": c.category,
                "size": c.size, "internal_density": coh.internal_density,
                "conductance": coh.conductance,
                "conductance_defined": coh.conductance is not None,
            })
        inf = influencers_and_degrees(g, top_n=top_n)
        influencer_rows.append({"day": day.isoformat(), "senders": inf.senders,
                                "receivers": inf.receivers})
        degree_rows.append({
            "day": day.isoformat(),
            "degree_histogram": {str(k): v for k, v in inf.degree_histogram.items()},
            "edge_kind_breakdown": inf.edge_kind_breakdown,
            "edge_kind_defined": inf.edge_kind_breakdown is not None,
        })

    reaction = {label: reaction_index(dominance, window, label)
                for label in categories.labels}
    stats_all = lifespan_stats([ch for chains in chains_by_category.values()
                                for ch in chains])
    stats_per_cat = {label: lifespan_stats(chains_by_category.get(label, ()))
                     for label in categories.labels}

    overall = distribution_of((p.label for p in partition.posts), categories)
    pre_posts = [p.label for p in partition.posts if p.day < window.event_date]
    post_posts = [p.label for p in partition.posts if p.day >= window.event_date]
    pre_dist = distribution_of(pre_posts, categories)
    post_dist = distribution_of(post_posts, categories)
    comparisons = {
        "event_shift": _comparison_dict(compare_distributions(pre_dist, post_dist)),
        "historical": (_comparison_dict(compare_distributions(baseline, overall))
                       if baseline is not None else {"defined": False}),
        "overall_distribution": _distribution_dict(overall),
    }

    chain_growth = {
        label: [chain_to_dict(ch) for ch in chains_by_category.get(label, ())]
        for label in categories.labels
    }

    block = {
        "area": partition.area.name,
        "event": window.event_name,
        "event_date": window.event_date.isoformat(),
        "days": [d.isoformat() for d in days],
        "post_count": len(partition.posts),
        "fields": {
            "dominance_series": [
                {"day": d.isoformat(), **_distribution_dict(dominance[d])}
                for d in days
            ],
            "ei_series": _series_rows(ei_vals),
            "diversity_series": _series_rows(div_vals),
            "segmentation_series": _series_rows(mod_vals),
            "community_count_series": count_rows,
            "community_size_series": size_rows,
            "community_share_series": share_rows,
            "scatter_series": scatter_rows,
            "cohesiveness_table": cohesion_rows,
            "influencers": influencer_rows,
            "degree_stats": degree_rows,
            "lifespan_stats": {
                "overall": _lifespan_dict(stats_all),
                "per_category": {l: _lifespan_dict(stats_per_cat[l])
                                 for l in categories.labels},
            },
            "reaction_indices": {
                l: {"value": reaction[l].value, "saturated": reaction[l].saturated,
                    "defined": reaction[l].defined}
                for l in categories.labels
            },
            "chain_growth": chain_growth,
            "comparisons": comparisons,
        },
    }
    return FragmentationReport(blocks=[block])


def _comparison_dict(cmp: DistributionComparison) -> dict:
    return {"deltas": cmp.deltas, "rank_left": cmp.rank_left,
            "rank_right": cmp.rank_right, "total_variation": cmp.total_variation,
            "defined": cmp.defined}


def _lifespan_dict(stats: LifespanStats) -> dict:
    return {"histogram": {str(k): v for k, v in sorted(stats.histogram.items())},
            "mean": stats.mean, "median": stats.median,
            "share_leq_3": stats.share_leq_3, "defined": stats.defined}


def combine_reports(reports: Iterable[FragmentationReport]) -> FragmentationReport:
    merged = FragmentationReport()
    for r in reports:
        merged.blocks.extend(r.blocks)
    return merged
