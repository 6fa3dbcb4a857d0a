"""Same-category communities per day and their continuation across days.

A community is a connected component of the co-engagement projection with
at least ``k_min`` members. Day-adjacent communities of one category are
matched greedily by Jaccard overlap; a maximal run of matched days is a
chain whose length is the community's lifespan.
"""

from __future__ import annotations

import csv
import datetime as dt
import io
import json
from dataclasses import dataclass
from typing import Iterable, Sequence

from .graph import Projection, connected_components, persona_sort_key

DEFAULT_K_MIN = 3
DEFAULT_THETA = 0.3


@dataclass(frozen=True)
class Community:
    """A same-category cluster of users on one day."""

    id: str
    day: dt.date
    category: str
    ordinal: int
    members: frozenset[str]

    @property
    def size(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class CommunityChain:
    """A community matched across consecutive days."""

    category: str
    links: tuple[tuple[dt.date, Community], ...]

    @property
    def lifespan(self) -> int:
        return len(self.links)

    @property
    def start_day(self) -> dt.date:
        return self.links[0][0]

    @property
    def peak_size(self) -> int:
        return max(c.size for _, c in self.links)

    def sizes(self) -> list[int]:
        return [c.size for _, c in self.links]

    @property
    def growth_rate(self) -> float:
        """Mean per-day membership change across the chain."""
        sizes = self.sizes()
        return (sizes[-1] - sizes[0]) / max(1, self.lifespan - 1)


def extract_communities(projection: Projection, day: dt.date,
                        k_min: int = DEFAULT_K_MIN) -> list[Community]:
    """Projection components of size >= k_min, largest first.

    Equal-size components order by their smallest member user id; ordinals
    follow that order and feed into the community ids.
    """
    if k_min < 1:
        raise ValueError(f"k_min must be >= 1, got {k_min}")
    comps = connected_components(projection.vertices, projection.edge_list(),
                                 key=persona_sort_key)
    out = []
    for comp in comps:
        if len(comp) < k_min:
            continue
        ordinal = len(out)
        out.append(Community(
            id=f"{day.isoformat()}:{projection.category}:{ordinal}",
            day=day, category=projection.category, ordinal=ordinal,
            members=frozenset(n.user_id for n in comp),
        ))
    return out


def jaccard(a: frozenset | set, b: frozenset | set) -> float:
    """|A ∩ B| / |A ∪ B|, with 0.0 when both sets are empty."""
    if not a and not b:
        return 0.0
    return len(a & b) / len(a | b)


def jaccard_matrix(day_a: Sequence[Community],
                   day_b: Sequence[Community]) -> dict[tuple[str, str], float]:
    """Pairwise overlap between two days' community lists, keyed by id."""
    return {(ca.id, cb.id): jaccard(ca.members, cb.members)
            for ca in day_a for cb in day_b}


def track_communities(communities: Iterable[Community],
                      theta: float = DEFAULT_THETA) -> list[CommunityChain]:
    """Chain one category's communities across consecutive days.

    Day t communities are matched to day t+1 by committing the highest
    Jaccard pair (>= theta) first; ties prefer the larger intersection,
    then the smaller ordinals. Each community joins at most one pair, and
    a day with no communities ends every open chain. Every community ends
    up in exactly one chain.
    """
    if not 0.0 < theta <= 1.0:
        raise ValueError(f"theta must be in (0, 1], got {theta}")
    comms = list(communities)
    if not comms:
        return []
    categories = {c.category for c in comms}
    if len(categories) != 1:
        raise ValueError(f"track_communities expects one category, got {sorted(categories)}")
    category = categories.pop()

    by_day: dict[dt.date, list[Community]] = {}
    for c in comms:
        by_day.setdefault(c.day, []).append(c)
    for day_list in by_day.values():
        day_list.sort(key=lambda c: c.ordinal)

    first, last = min(by_day), max(by_day)
    finished: list[list[tuple[dt.date, Community]]] = []
    open_chains: dict[str, list[tuple[dt.date, Community]]] = {}
    prev: list[Community] = []

    day = first
    while day <= last:
        cur = by_day.get(day, [])
        candidates = []
        for ct in prev:
            for cu in cur:
                j = jaccard(ct.members, cu.members)
                if j >= theta:
                    inter = len(ct.members & cu.members)
                    candidates.append((-j, -inter, ct.ordinal, cu.ordinal, ct, cu))
        candidates.sort(key=lambda t: t[:4])
        matched_prev: dict[str, Community] = {}
        matched_cur: set[str] = set()
        for _, _, _, _, ct, cu in candidates:
            if ct.id in matched_prev or cu.id in matched_cur:
                continue
            matched_prev[ct.id] = cu
            matched_cur.add(cu.id)

        next_open: dict[str, list[tuple[dt.date, Community]]] = {}
        for tail_id, links in open_chains.items():
            follow = matched_prev.get(tail_id)
            if follow is not None:
                links.append((day, follow))
                next_open[follow.id] = links
            else:
                finished.append(links)
        for cu in cur:
            if cu.id not in matched_cur:
                next_open[cu.id] = [(day, cu)]
        open_chains = next_open
        prev = cur
        day += dt.timedelta(days=1)

    finished.extend(open_chains.values())
    chains = [CommunityChain(category=category, links=tuple(links))
              for links in finished]
    chains.sort(key=lambda ch: (ch.start_day, ch.links[0][1].ordinal))
    return chains


@dataclass(frozen=True)
class LifespanStats:
    histogram: dict[int, int]
    mean: float | None
    median: float | None
    share_leq_3: float | None
    defined: bool


def lifespan_stats(chains: Iterable[CommunityChain]) -> LifespanStats:
    """Lifespan distribution over chains; empty input flags everything undefined."""
    spans = sorted(ch.lifespan for ch in chains)
    if not spans:
        return LifespanStats(histogram={}, mean=None, median=None,
                             share_leq_3=None, defined=False)
    histogram: dict[int, int] = {}
    for s in spans:
        histogram[s] = histogram.get(s, 0) + 1
    n = len(spans)
    mid = n // 2
    median = float(spans[mid]) if n % 2 else (spans[mid - 1] + spans[mid]) / 2.0
    return LifespanStats(
        histogram=histogram,
        mean=sum(spans) / n,
        median=median,
        share_leq_3=sum(1 for s in spans if s <= 3) / n,
        defined=True,
    )


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def community_to_dict(c: Community) -> dict:
    return {"id": c.id, "day": c.day.isoformat(), "category": c.category,
            "ordinal": c.ordinal, "members": sorted(c.members)}


def communities_to_json(communities: Iterable[Community]) -> str:
    return json.dumps([community_to_dict(c) for c in communities],
                      ensure_ascii=False, indent=2) + "\n"


def chain_to_dict(ch: CommunityChain) -> dict:
    return {
        "category": ch.category,
        "start_day": ch.start_day.isoformat(),
        "lifespan": ch.lifespan,
        "peak_size": ch.peak_size,
        "growth_rate": ch.growth_rate,
        "links": [{"day": d.isoformat(), "community": c.id, "size": c.size}
                  for d, c in ch.links],
    }


def chains_to_json(chains: Iterable[CommunityChain]) -> str:
    return json.dumps([chain_to_dict(ch) for ch in chains],
                      ensure_ascii=False, indent=2) + "\n"


def chains_to_csv(chains: Iterable[CommunityChain]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["category", "start_day", "lifespan", "peak_size"])
    for ch in chains:
        writer.writerow([ch.category, ch.start_day.isoformat(),
                         ch.lifespan, ch.peak_size])
    return buf.getvalue()
