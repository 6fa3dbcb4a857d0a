"""Synthetic labeled post streams with planted communities and exact truth.

Generation is hub-and-spoke: every planted member replies to its
community's hub receiver each day, which guarantees the members form one
connected cluster in the co-engagement projection, and members mention
their ring neighbor so same-community sender-sender edges exist. Daily
connector interactions stitch all planted clusters into a single day-graph
component without ever linking two same-category senders through a shared
neighbor, so the per-category projections keep the planted clusters
separate.

Everything is driven by one seeded generator in a fixed call order; the
same config and seed always produce byte-identical output.
"""

from __future__ import annotations

import datetime as dt
import json
import math
import random
from dataclasses import dataclass, field
from typing import Iterable

from .classify import CategorySet, LabeledPost, default_lexicon
from .ingest import EventWindow

NOON_SECONDS = 12 * 3600


@dataclass(frozen=True)
class PlantedCommunity:
    """Schedule entry: one community of one category with a fixed lifespan."""

    category: str
    size: int
    birth_day: int
    lifespan: int
    overlap: float = 0.9
    hub_count: int = 1

    def __post_init__(self):
        if self.size < 3:
            raise ValueError(f"planted community size must be >= 3, got {self.size}")
        if self.lifespan < 1:
            raise ValueError("lifespan must be >= 1")
        if self.birth_day < 0:
            raise ValueError("birth_day must be >= 0")
        if not 0.8 <= self.overlap <= 1.0:
            raise ValueError(f"daily member overlap must be in [0.8, 1], got {self.overlap}")
        if self.hub_count < 1:
            raise ValueError("hub_count must be >= 1")


@dataclass(frozen=True)
class SynthConfig:
    seed: int
    area: str
    window: EventWindow
    categories: CategorySet
    schedule: tuple[PlantedCommunity, ...]
    noise_rate: int = 0
    cross_rate: int = 0
    terms: dict[str, tuple[str, ...]] | None = None

    def __post_init__(self):
        n_days = self.window.n_days
        for i, entry in enumerate(self.schedule):
            if entry.category not in self.categories:
                raise ValueError(f"scheduled category {entry.category!r} not in the category set")
            if entry.birth_day + entry.lifespan > n_days:
                raise ValueError(
                    f"community {entry.category}#g{i} does not fit the window: "
                    f"birth_day {entry.birth_day} + lifespan {entry.lifespan} > {n_days} days")
        if self.noise_rate < 0 or self.cross_rate < 0:
            raise ValueError("rates must be >= 0")


@dataclass(frozen=True)
class TruthChain:
    chain_id: str
    category: str
    days: tuple[dt.date, ...]
    members_by_day: dict[dt.date, frozenset[str]]

    @property
    def lifespan(self) -> int:
        return len(self.days)


@dataclass
class PlantedTruth:
    """Exact communities, chain identities, and lifespans the generator embedded."""

    chains: list[TruthChain] = field(default_factory=list)

    def communities_on(self, day: dt.date) -> dict[str, list[frozenset[str]]]:
        """category -> planted member sets alive on that day."""
        out: dict[str, list[frozenset[str]]] = {}
        for ch in self.chains:
            if day in ch.members_by_day:
                out.setdefault(ch.category, []).append(ch.members_by_day[day])
        return out

    def lifespans(self) -> dict[str, int]:
        return {ch.chain_id: ch.lifespan for ch in self.chains}

    def to_json(self) -> str:
        doc = {"chains": [{
            "chain_id": ch.chain_id,
            "category": ch.category,
            "days": [d.isoformat() for d in ch.days],
            "lifespan": ch.lifespan,
            "members_by_day": {d.isoformat(): sorted(ch.members_by_day[d])
                               for d in ch.days},
        } for ch in self.chains]}
        return json.dumps(doc, ensure_ascii=False, indent=2) + "\n"


def _default_terms(categories: CategorySet) -> dict[str, tuple[str, ...]]:
    lexicon = default_lexicon()
    terms: dict[str, tuple[str, ...]] = {}
    for label in categories.labels:
        if label not in lexicon or not lexicon[label]:
            raise ValueError(f"no lexicon terms available for category {label!r}; "
                             f"pass terms in the SynthConfig")
        terms[label] = tuple(sorted(lexicon[label]))
    return terms


class _PostFactory:
    def __init__(self, cfg: SynthConfig, terms: dict[str, tuple[str, ...]],
                 rng: random.Random):
        self._cfg = cfg
        self._terms = terms
        self._rng = rng
        self._counter = 0
        self._second_of_day = 0
        self._day: dt.date | None = None

    def start_day(self, day: dt.date) -> None:
        self._day = day
        self._second_of_day = 0

    def make(self, user: str, category: str, reply_to: str | None = None,
             mentions: Iterable[str] = ()) -> LabeledPost:
        term = self._rng.choice(self._terms[category])
        assert self._day is not None
        midnight = dt.datetime.combine(self._day, dt.time(0), tzinfo=dt.timezone.utc)
        # wrap within the afternoon so heavy days never spill past midnight
        created = int(midnight.timestamp()) + NOON_SECONDS + (self._second_of_day % 43200)
        self._second_of_day += 1
        self._counter += 1
        return LabeledPost(
            id=f"p{self._counter:07d}", user_id=user, created_at=created,
            text=f"so much {term} around here {self._counter}",
            area=self._cfg.area, reply_to_user=reply_to,
            retweet_of_user=None, mentions=tuple(mentions),
            label=category, score=1.0,
        )


class _ChainState:
    def __init__(self, index: int, entry: PlantedCommunity):
        self.entry = entry
        self.chain_id = f"{entry.category}#g{index}"
        self.prefix = f"{entry.category}.g{index}"
        self.members = [f"{self.prefix}.m{k}" for k in range(entry.size)]
        self.next_member = entry.size
        self.hubs = [f"{self.prefix}.hub{h}" for h in range(entry.hub_count)]

    def alive_on(self, day_number: int) -> bool:
        return self.entry.birth_day <= day_number < self.entry.birth_day + self.entry.lifespan

    def turn_over(self, rng: random.Random) -> None:
        n_keep = max(1, math.ceil(self.entry.overlap * self.entry.size))
        n_replace = self.entry.size - n_keep
        if n_replace <= 0:
            return
        leaving = rng.sample(self.members, n_replace)
        self.members = [m for m in self.members if m not in leaving]
        for _ in range(n_replace):
            self.members.append(f"{self.prefix}.m{self.next_member}")
            self.next_member += 1


def _round_robin(chains: list[_ChainState], categories: CategorySet) -> list[_ChainState]:
    by_cat: dict[str, list[_ChainState]] = {l: [] for l in categories.labels}
    for ch in chains:
        by_cat[ch.entry.category].append(ch)
    order: list[_ChainState] = []
    while any(by_cat.values()):
        for label in categories.labels:
            if by_cat[label]:
                order.append(by_cat[label].pop(0))
    return order


def generate(cfg: SynthConfig) -> tuple[list[LabeledPost], PlantedTruth]:
    """Produce labeled posts plus the exact planted truth.

    Per live day each member posts one reply to the community hub and
    mentions its ring neighbor; texts embed a lexicon term of the
    community's category so reclassifying the stream reproduces the
    labels. Noise posts form category-rotating chains anchored on planted
    members, which keeps them visible in the filtered graph without ever
    forming a community of their own. Noise and cross posts are the only
    sources of cross-category sender-sender edges.
    """
    rng = random.Random(cfg.seed)
    terms = cfg.terms if cfg.terms is not None else _default_terms(cfg.categories)
    for label in cfg.categories.labels:
        if label not in terms or not terms[label]:
            raise ValueError(f"no terms for category {label!r}")
    factory = _PostFactory(cfg, terms, rng)
    chains = [_ChainState(i, entry) for i, entry in enumerate(cfg.schedule)]
    truth = PlantedTruth(chains=[])
    members_by_day: dict[str, dict[dt.date, frozenset[str]]] = {c.chain_id: {} for c in chains}

    posts: list[LabeledPost] = []
    days = cfg.window.days()
    for day_number, day in enumerate(days):
        factory.start_day(day)
        alive: list[_ChainState] = []
        for chain in chains:
            if not chain.alive_on(day_number):
                continue
            if day_number > chain.entry.birth_day:
                chain.turn_over(rng)
            members_by_day[chain.chain_id][day] = frozenset(chain.members)
            alive.append(chain)

        ordered = _round_robin(alive, cfg.categories)
        # junction/bridge plan: consecutive clusters share one connector
        junction_mentions: dict[str, list[str]] = {}
        bridge_posts: list[tuple[str, str, str, str]] = []  # user, category, reply_to, mention
        for pair_idx in range(len(ordered) - 1):
            a, b = ordered[pair_idx], ordered[pair_idx + 1]
            if a.entry.category != b.entry.category:
                junction = f"junction.{pair_idx}"
                junction_mentions.setdefault(min(a.members), []).append(junction)
                junction_mentions.setdefault(min(b.members), []).append(junction)
            else:
                # Bridge categories rotate per slot so that no two bridge
                # senders of one category ever share a hub or middle node,
                # which keeps bridges invisible to every projection (needs
                # a third category; with two, heavy same-category runs can
                # make adjacent bridges co-engage).
                middle = f"bridge.{pair_idx}.m"
                eligible = [l for l in cfg.categories.labels
                            if l != a.entry.category]
                for slot, (tag, cluster) in enumerate((("a", a), ("b", b))):
                    other = eligible[(2 * pair_idx + slot) % len(eligible)]
                    bridge_posts.append((f"bridge.{pair_idx}.{tag}", other,
                                         cluster.hubs[0], middle))

        for chain in ordered:
            members = chain.members
            for j, user in enumerate(members):
                mentions = [members[(j + 1) % len(members)]]
                if chain.entry.hub_count > 1:
                    extra = chain.hubs[1 + j % (chain.entry.hub_count - 1)]
                    mentions.append(extra)
                mentions.extend(junction_mentions.get(user, ()))
                posts.append(factory.make(user, chain.entry.category,
                                          reply_to=chain.hubs[0], mentions=mentions))
        for user, category, reply_to, mention in bridge_posts:
            posts.append(factory.make(user, category, reply_to=reply_to,
                                      mentions=[mention]))

        alive_members = sorted((m, ch.entry.category)
                               for ch in ordered for m in ch.members)
        alive_categories = sorted({cat for _, cat in alive_members})
        for k in range(cfg.cross_rate):
            if len(alive_categories) < 2:
                break
            sender, sender_cat = alive_members[rng.randrange(len(alive_members))]
            others = [(m, c) for m, c in alive_members if c != sender_cat]
            target, _ = others[rng.randrange(len(others))]
            posts.append(factory.make(sender, sender_cat, mentions=[target]))

        # Noise users hang off the planted structure in chains whose
        # categories rotate, so two same-category noise senders are never
        # adjacent and never share a neighbor, and chain anchors are capped
        # at two per (member, category): noise personas stay isolated in
        # every projection and can never form a community. With only two
        # categories safe chains are impossible, so each noise post anchors
        # alone and overflow beyond the cap is emitted without interactions.
        labels = cfg.categories.labels
        anchor_use: dict[tuple[str, str], int] = {}

        def pick_anchor():
            if not alive_members:
                return None
            start = rng.randrange(len(alive_members))
            for step in range(len(alive_members)):
                member, member_cat = alive_members[(start + step) % len(alive_members)]
                others = [l for l in labels if l != member_cat]
                counts = sorted((anchor_use.get((member, l), 0), i, l)
                                for i, l in enumerate(others))
                used, _, cat = counts[0]
                if used < 2:
                    anchor_use[(member, cat)] = used + 1
                    return member, member_cat, cat
            return None

        prev_noise: str | None = None
        chain_order: tuple[str, ...] = labels
        chain_pos = 0
        for k in range(cfg.noise_rate):
            user = f"noise.d{day_number}.{k}"
            if prev_noise is None or k % 12 == 0:
                anchor = pick_anchor()
                if anchor is None:
                    posts.append(factory.make(user, labels[k % len(labels)],
                                              mentions=[]))
                    prev_noise = None
                    continue
                target, target_cat, cat = anchor
                chain_order = (cat,) + tuple(l for l in labels
                                             if l not in (cat, target_cat)) + (target_cat,)
                chain_pos = 0
                posts.append(factory.make(user, cat, mentions=[target]))
                prev_noise = user if len(labels) > 2 else None
            else:
                chain_pos += 1
                category = chain_order[chain_pos % len(chain_order)]
                posts.append(factory.make(user, category, mentions=[prev_noise]))
                prev_noise = user

    for chain in chains:
        day_map = members_by_day[chain.chain_id]
        truth.chains.append(TruthChain(
            chain_id=chain.chain_id, category=chain.entry.category,
            days=tuple(sorted(day_map)), members_by_day=day_map,
        ))
    return posts, truth
