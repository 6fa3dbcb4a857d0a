"""
Deterministic snapshots and the montage grid
============================================

Renders one SVG panel per window day plus the chronological montage for a
synthetic week. Same seed, same bytes, every run. Output lands in
demos/output/.
"""

import datetime as dt
from pathlib import Path

import discoursefrag as df
from discoursefrag.render import SnapshotStyle

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

window = df.EventWindow("demo week", dt.date(2021, 6, 10), 3, 3)
categories = df.default_category_set()
cfg = df.SynthConfig(
    seed=9, area="Synthville", window=window, categories=categories,
    schedule=(df.PlantedCommunity("homophobia", 6, 0, 7),
              df.PlantedCommunity("ableism", 5, 2, 4),
              df.PlantedCommunity("homophobia", 4, 3, 2)),
    noise_rate=6,
)
posts, _ = df.generate(cfg)
part = df.partition(posts, df.AreaSpec("Synthville"), window)

style = SnapshotStyle(colors=categories.colors())
snaps = []
for day in window.days():
    g = df.filter_graph(df.build_day_graph(part, day))
    lay = df.layout(g, seed=9)
    snap = df.snapshot(g, lay, style)
    snaps.append(snap)
    (OUT / f"{day.isoformat()}.svg").write_bytes(snap.svg)
    print(f"{day}  personas={len(g.nodes):3d}  interactions={len(g.edges):3d}")

grid = df.montage(snaps, style)
(OUT / "montage.svg").write_bytes(grid)
print(f"\nwrote {len(snaps)} panels and montage.svg ({len(grid)} bytes) to {OUT}")

again = df.montage([df.snapshot(df.filter_graph(df.build_day_graph(part, d)),
                                df.layout(df.filter_graph(df.build_day_graph(part, d)), seed=9),
                                style) for d in window.days()], style)
print("byte-identical re-render:", grid == again)
