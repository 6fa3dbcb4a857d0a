import datetime as dt

import pytest

from discoursefrag.classify import CategorySet, Category, LabeledPost
from discoursefrag.graph import DailyGraph, InteractionEdge, PersonaNode

DAY0 = dt.date(2021, 6, 7)
UTC = dt.timezone.utc


def ts(day: dt.date, second: int = 43200) -> int:
    return int(dt.datetime.combine(day, dt.time(0), tzinfo=UTC).timestamp()) + second


def mk_post(pid, user, label, day=DAY0, second=43200, area="Testopolis",
            reply=None, retweet=None, mentions=(), text="", score=0.9):
    return LabeledPost(
        id=pid, user_id=user, created_at=ts(day, second), text=text,
        area=area, reply_to_user=reply, retweet_of_user=retweet,
        mentions=tuple(mentions), label=label, score=score,
    )


def mk_graph(edge_spec, day=DAY0, extra_nodes=(), area="Testopolis", event="event"):
    """Build a DailyGraph from (sender_user, sender_cat, target_user, target_cat, kind) rows.

    target_cat None makes the target a receiver persona.
    """
    nodes = set()
    edges = []
    for i, (su, sc, tu, tc, kind) in enumerate(edge_spec):
        sender = PersonaNode(su, sc)
        target = PersonaNode(tu, tc)
        nodes.add(sender)
        nodes.add(target)
        edges.append(InteractionEdge(sender, target, kind, f"p{i}"))
    for user, cat in extra_nodes:
        nodes.add(PersonaNode(user, cat))
    return DailyGraph(day=day, area=area, event=event, provenance=f"{area}|{event}",
                      nodes=frozenset(nodes), edges=tuple(edges))


@pytest.fixture
def categories():
    return CategorySet([
        Category("alpha", "#111111"),
        Category("beta", "#222222"),
        Category("gamma", "#333333"),
    ])


def random_day_posts(rng, n_users=12, n_posts=30, labels=("alpha", "beta", "gamma"),
                     day=DAY0, area="Testopolis"):
    """Random labeled single-day posts with a mix of interaction kinds."""
    posts = []
    for i in range(n_posts):
        user = f"u{rng.randrange(n_users)}"
        others = [f"u{k}" for k in range(n_users) if f"u{k}" != user]
        reply = retweet = None
        mentions = []
        roll = rng.random()
        if roll < 0.4:
            reply = rng.choice(others)
        elif roll < 0.6:
            retweet = rng.choice(others)
        if rng.random() < 0.5:
            m = rng.choice(others)
            if m not in mentions:
                mentions.append(m)
        posts.append(mk_post(f"p{i}", user, rng.choice(labels), day=day,
                             second=i, area=area, reply=reply, retweet=retweet,
                             mentions=mentions))
    return posts
