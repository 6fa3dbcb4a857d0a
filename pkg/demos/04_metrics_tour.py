"""
Fragmentation metrics on hand-built graphs
==========================================

Small worked examples for the polarization, segmentation, cohesiveness,
and comparison metrics, with values small enough to verify by hand.
"""

import datetime as dt

import discoursefrag as df
from discoursefrag.graph import InteractionEdge, PersonaNode
from discoursefrag.metrics import CategoryDistribution, compare_distributions


def graph_from(rows):
    nodes, edges = set(), []
    for i, (su, sc, tu, tc) in enumerate(rows):
        a, b = PersonaNode(su, sc), PersonaNode(tu, tc)
        nodes |= {a, b}
        edges.append(InteractionEdge(a, b, "reply", f"p{i}"))
    return df.DailyGraph(day=dt.date(2021, 6, 10), area="demo", event="demo",
                         provenance="demo", nodes=frozenset(nodes),
                         edges=tuple(edges))


# two insulated blocks: every edge stays inside its category
blocks = graph_from([("a1", "left", "a2", "left"),
                     ("a2", "left", "a3", "left"),
                     ("b1", "right", "b2", "right"),
                     ("b2", "right", "b3", "right")])
print("two insulated blocks:")
print(f"  E-I index:  {df.ei_index(blocks):+.2f}   (fully insular)")
print(f"  modularity: {df.modularity_by_category(blocks):.2f}")
print(f"  diversity:  {df.diversity_fraction(blocks):.2f}")

# add a bridge and polarization relaxes
bridged = graph_from([("a1", "left", "a2", "left"),
                      ("a2", "left", "a3", "left"),
                      ("b1", "right", "b2", "right"),
                      ("b2", "right", "b3", "right"),
                      ("a1", "left", "b1", "right")])
print("\nwith one cross-camp interaction:")
print(f"  E-I index:  {df.ei_index(bridged):+.2f}")
print(f"  diversity:  {df.diversity_fraction(bridged):.2f}")

# cohesiveness of a clique community versus a path community
proj = df.co_engagement_projection(
    graph_from([(m, "left", "hub", None) for m in ("a", "b", "c", "d")]), "left")
g = graph_from([(m, "left", "hub", None) for m in ("a", "b", "c", "d")])
community = df.extract_communities(proj, dt.date(2021, 6, 10))[0]
coh = df.cohesiveness(community, proj, g)
print(f"\nhub-backed community of 4: density={coh.internal_density:.2f} "
      f"conductance={coh.conductance:.2f}")

# distribution shift between two periods
past = CategoryDistribution(shares={"xenophobia": 0.38, "sexism": 0.35,
                                    "racism": 0.27}, sample_count=1000)
now = CategoryDistribution(shares={"xenophobia": 0.58, "sexism": 0.15,
                                   "racism": 0.27}, sample_count=1000)
cmp = compare_distributions(past, now)
print("\nperiod-over-period comparison:")
print(f"  deltas: { {k: round(v, 2) for k, v in cmp.deltas.items()} }")
print(f"  lead category then vs now: {cmp.rank_left[0]} -> {cmp.rank_right[0]}")
print(f"  total variation distance: {cmp.total_variation:.2f}")
