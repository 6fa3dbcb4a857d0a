import datetime as dt
import math
import xml.etree.ElementTree as ET
from pathlib import Path

import pytest

from discoursefrag.render import (SnapshotStyle, emit_snapshot, layout,
                                  montage, snapshot)

from conftest import DAY0, mk_graph

GOLDEN = Path(__file__).parent / "golden" / "snapshot_3node.svg"
STYLE = SnapshotStyle(colors={"alpha": "#111111", "beta": "#222222"})


def three_node_graph():
    return mk_graph([("x", "alpha", "h", None, "reply"),
                     ("y", "alpha", "h", None, "reply")])


def two_cliques_graph():
    spec = []
    for tag in ("p", "q"):
        members = [f"{tag}{i}" for i in range(5)]
        for i, a in enumerate(members):
            for b in members[i + 1:]:
                spec.append((a, "alpha", b, "alpha", "reply"))
    return mk_graph(spec)


class TestLayout:
    def test_single_edge_in_bounds(self):
        g = mk_graph([("a", "alpha", "b", "alpha", "reply")])
        lay = layout(g, seed=3)
        assert len(lay.positions) == 2
        for x, y in lay.positions.values():
            assert 0.0 <= x <= 1.0 and 0.0 <= y <= 1.0
            assert math.isfinite(x) and math.isfinite(y)

    def test_deterministic_for_graph_and_seed(self):
        g = three_node_graph()
        assert layout(g, seed=9).positions == layout(g, seed=9).positions

    def test_seed_changes_layout(self):
        g = three_node_graph()
        assert layout(g, seed=1).positions != layout(g, seed=2).positions

    def test_empty_graph(self):
        lay = layout(mk_graph([]), seed=1)
        assert lay.positions == {}

    def test_disjoint_cliques_separate(self):
        g = two_cliques_graph()
        lay = layout(g, seed=5)
        groups = {"p": [], "q": []}
        for node, pos in lay.positions.items():
            groups[node.user_id[0]].append(pos)

        def mean_dist(pairs):
            total, count = 0.0, 0
            for i, a in enumerate(pairs):
                for b in pairs[i + 1:]:
                    total += math.dist(a, b)
                    count += 1
            return total / count

        intra = (mean_dist(groups["p"]) + mean_dist(groups["q"])) / 2
        inter = sum(math.dist(a, b) for a in groups["p"] for b in groups["q"])
        inter /= len(groups["p"]) * len(groups["q"])
        assert intra < inter


class TestSnapshot:
    def test_empty_graph_valid_svg_with_day_label(self):
        svg = emit_snapshot(mk_graph([]), layout(mk_graph([]), 1), STYLE)
        root = ET.fromstring(svg)
        texts = [el.text for el in root.iter("{http://www.w3.org/2000/svg}text")]
        assert DAY0.isoformat() in texts
        assert svg.count(b"<circle") == 0

    def test_three_node_golden(self):
        g = three_node_graph()
        style = SnapshotStyle(colors={"alpha": "#111111"})
        svg = emit_snapshot(g, layout(g, seed=1), style)
        assert svg == GOLDEN.read_bytes()
        assert svg.count(b"<circle") == 3
        assert svg.count(b"<line") == 2

    def test_byte_identical_reruns(self):
        g = three_node_graph()
        a = emit_snapshot(g, layout(g, 4), STYLE)
        b = emit_snapshot(g, layout(g, 4), STYLE)
        assert a == b

    def test_missing_category_color_is_error(self):
        g = mk_graph([("x", "gamma", "h", None, "reply")])
        with pytest.raises(ValueError):
            emit_snapshot(g, layout(g, 1), STYLE)

    def test_receivers_gray_and_senders_colored(self):
        g = three_node_graph()
        svg = emit_snapshot(g, layout(g, 1), STYLE).decode()
        assert svg.count('fill="#999999"') == 1
        assert svg.count('fill="#111111"') == 2


def _panels(svg: bytes):
    root = ET.fromstring(svg)
    return [el for el in root.iter("{http://www.w3.org/2000/svg}g")
            if el.get("class") == "panel"]


def _snapshots_for_days(n):
    snaps = []
    for i in range(n):
        day = DAY0 + dt.timedelta(days=i)
        g = mk_graph([("x", "alpha", "h", None, "reply")], day=day)
        snaps.append(snapshot(g, layout(g, 1), STYLE))
    return snaps


class TestMontage:
    def test_seven_panels_for_delta_three(self):
        svg = montage(_snapshots_for_days(7), STYLE)
        assert len(_panels(svg)) == 7

    def test_28_day_window(self):
        svg = montage(_snapshots_for_days(28), STYLE)
        assert len(_panels(svg)) == 28

    def test_single_panel(self):
        svg = montage(_snapshots_for_days(1), STYLE)
        assert len(_panels(svg)) == 1

    def test_unordered_input_sorted_chronologically(self):
        snaps = _snapshots_for_days(5)
        svg = montage(list(reversed(snaps)), STYLE)
        ids = [p.get("id") for p in _panels(svg)]
        assert ids == [f"panel-{(DAY0 + dt.timedelta(days=i)).isoformat()}"
                       for i in range(5)]

    def test_empty_montage_rejected(self):
        with pytest.raises(ValueError):
            montage([], STYLE)

    def test_well_formed_xml(self):
        svg = montage(_snapshots_for_days(9), STYLE)
        ET.fromstring(svg)

    def test_color_use_is_consistent_across_panels(self):
        svg = montage(_snapshots_for_days(6), STYLE).decode()
        assert svg.count('fill="#111111"') == 6
