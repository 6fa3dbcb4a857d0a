"""Command-line pipeline: synth | classify | analyze | render | eval.

One JSON config file drives every subcommand; flags override config
values. All outputs are deterministic for a fixed seed, and every
subcommand supports --dry-run, which prints the resolved plan as JSON and
writes nothing. Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import csv
import datetime as dt
import io
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .classify import (CategorySet, Category, EvalConfig, LexiconClassifier,
                       bundled_eval_corpus, default_category_set,
                       default_lexicon, evaluate, label_posts, load_lexicon,
                       read_labeled_jsonl, write_labeled_jsonl)
from .community import chains_to_csv, chains_to_json, communities_to_json
from .graph import graph_to_dot, graph_to_json
from .ingest import AreaSpec, EventWindow, parse_records, partition, serialize_posts
from .metrics import CategoryDistribution, combine_reports
from .pipeline import analyze_partition
from .render import SnapshotStyle, layout, montage, snapshot
from .synth import PlantedCommunity, SynthConfig, generate


class DataError(Exception):
    """Bad or missing input data; maps to exit code 2."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage problems exit 1, not argparse's 2
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


@dataclass
class RunConfig:
    seed: int = 0
    areas: list[AreaSpec] = field(default_factory=list)
    events: list[EventWindow] = field(default_factory=list)
    categories: CategorySet = field(default_factory=default_category_set)
    lexicon_path: str | None = None
    label_threshold: float = 0.5
    k_min: int = 3
    theta: float = 0.3
    baseline: dict[str, float] | None = None
    synth_schedule: list[PlantedCommunity] = field(default_factory=list)
    noise_rate: int = 0
    cross_rate: int = 0
    style: dict = field(default_factory=dict)

    def __post_init__(self):
        if not 0.5 <= self.label_threshold <= 1.0:
            raise DataError(f"label threshold must be in [0.5, 1], got {self.label_threshold}")
        if self.k_min < 1:
            raise DataError(f"k_min must be >= 1, got {self.k_min}")
        if not 0.0 < self.theta <= 1.0:
            raise DataError(f"theta must be in (0, 1], got {self.theta}")


def _read_bytes(path: str) -> bytes:
    p = Path(path)
    if not p.exists():
        raise DataError(f"input file not found: {p}")
    return p.read_bytes()


def load_config(path: str | None, args: argparse.Namespace) -> RunConfig:
    raw: dict = {}
    if path is not None:
        try:
            raw = json.loads(_read_bytes(path))
        except json.JSONDecodeError as exc:
            raise DataError(f"config file {path} is not valid JSON: {exc}") from exc
        if not isinstance(raw, dict):
            raise DataError(f"config file {path} must hold a JSON object")
    try:
        areas = [AreaSpec(name=a["name"], aliases=tuple(a.get("aliases", ())),
                          country=a.get("country"), language=a.get("language"))
                 for a in raw.get("areas", [])]
        events = [EventWindow(event_name=e["event_name"],
                              event_date=dt.date.fromisoformat(e["event_date"]),
                              delta_before=int(e["delta_before"]),
                              delta_after=int(e["delta_after"]))
                  for e in raw.get("events", [])]
        if raw.get("categories"):
            categories = CategorySet([Category(c["label"], c["color"])
                                      for c in raw["categories"]])
        else:
            categories = default_category_set()
        thresholds = raw.get("thresholds", {})
        classifier = raw.get("classifier", {})
        if classifier and classifier.get("kind", "lexicon") != "lexicon":
            raise DataError(f"unknown classifier kind {classifier.get('kind')!r}")
        baseline = raw.get("baseline_distribution")
        if isinstance(baseline, str):
            baseline = json.loads(_read_bytes(baseline))
        synth_raw = raw.get("synth", {})
        schedule = [PlantedCommunity(
            category=s["category"], size=int(s["size"]),
            birth_day=int(s["birth_day"]), lifespan=int(s["lifespan"]),
            overlap=float(s.get("overlap", 0.9)),
            hub_count=int(s.get("hub_count", 1)),
        ) for s in synth_raw.get("schedule", [])]
        cfg = RunConfig(
            seed=int(raw.get("seed", 0)),
            areas=areas, events=events, categories=categories,
            lexicon_path=classifier.get("path"),
            label_threshold=float(thresholds.get("label", 0.5)),
            k_min=int(thresholds.get("k_min", 3)),
            theta=float(thresholds.get("theta", 0.3)),
            baseline=baseline,
            synth_schedule=schedule,
            noise_rate=int(synth_raw.get("noise_rate", 0)),
            cross_rate=int(synth_raw.get("cross_rate", 0)),
            style=raw.get("style", {}),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise DataError(f"bad config value: {exc}") from exc
    # flags win over config
    if getattr(args, "seed", None) is not None:
        cfg.seed = args.seed
    if getattr(args, "threshold", None) is not None:
        cfg.label_threshold = args.threshold
    if getattr(args, "k_min", None) is not None:
        cfg.k_min = args.k_min
    if getattr(args, "theta", None) is not None:
        cfg.theta = args.theta
    RunConfig.__post_init__(cfg)
    return cfg


def _classifier_for(cfg: RunConfig, lexicon_flag: str | None) -> LexiconClassifier:
    path = lexicon_flag or cfg.lexicon_path
    lexicon = load_lexicon(_read_bytes(path)) if path else default_lexicon()
    try:
        return LexiconClassifier(cfg.categories, lexicon)
    except ValueError as exc:
        raise DataError(str(exc)) from exc


def _style_for(cfg: RunConfig) -> SnapshotStyle:
    s = cfg.style
    return SnapshotStyle(
        width=float(s.get("width", 1000.0)),
        height=float(s.get("height", 1000.0)),
        node_radius=float(s.get("node_radius", 7.0)),
        receiver_radius=float(s.get("receiver_radius", 5.0)),
        colors=cfg.categories.colors(),
        montage_columns=int(s.get("montage_columns", 7)),
    )


def _slug(*parts: str) -> str:
    clean = ("".join(c if c.isalnum() else "-" for c in p.lower()) for p in parts)
    return "__".join(clean)


class _Writer:
    """Collects planned writes; flushes only when not a dry run."""

    def __init__(self, dry_run: bool):
        self.dry_run = dry_run
        self.paths: list[str] = []

    def write(self, path: Path, data: bytes | str) -> None:
        self.paths.append(str(path))
        if self.dry_run:
            return
        path.parent.mkdir(parents=True, exist_ok=True)
        if isinstance(data, str):
            data = data.encode("utf-8")
        path.write_bytes(data)


def _finish(writer: _Writer, command: str, params: dict) -> int:
    if writer.dry_run:
        plan = {"command": command, "params": params, "writes": writer.paths}
        print(json.dumps(plan, ensure_ascii=False, indent=2))
    return 0


def _baseline_distribution(cfg: RunConfig) -> CategoryDistribution | None:
    if cfg.baseline is None:
        return None
    missing = [l for l in cfg.categories.labels if l not in cfg.baseline]
    if missing:
        raise DataError(f"baseline distribution is missing categories: {missing}")
    shares = {l: float(cfg.baseline[l]) for l in cfg.categories.labels}
    total = sum(shares.values())
    if abs(total - 1.0) > 1e-9:
        raise DataError(f"baseline distribution shares must sum to 1, got {total}")
    return CategoryDistribution(shares=shares, sample_count=1)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_synth(args: argparse.Namespace) -> int:
    cfg = load_config(args.config, args)
    if not cfg.areas or not cfg.events:
        raise DataError("synth needs at least one area and one event in the config")
    if not cfg.synth_schedule:
        raise DataError("synth needs a synth.schedule section in the config")
    synth_cfg = SynthConfig(
        seed=cfg.seed, area=cfg.areas[0].name, window=cfg.events[0],
        categories=cfg.categories, schedule=tuple(cfg.synth_schedule),
        noise_rate=cfg.noise_rate, cross_rate=cfg.cross_rate,
    )
    writer = _Writer(args.dry_run)
    out_dir = Path(args.out_dir)
    if not args.dry_run:
        posts, truth = generate(synth_cfg)
        writer.write(out_dir / "posts.jsonl", serialize_posts(posts))
        writer.write(out_dir / "truth.json", truth.to_json())
    else:
        writer.paths = [str(out_dir / "posts.jsonl"), str(out_dir / "truth.json")]
    return _finish(writer, "synth", {
        "seed": cfg.seed, "area": cfg.areas[0].name,
        "event": cfg.events[0].event_name,
        "days": cfg.events[0].n_days,
        "communities": len(cfg.synth_schedule),
        "noise_rate": cfg.noise_rate, "cross_rate": cfg.cross_rate,
    })


def cmd_classify(args: argparse.Namespace) -> int:
    cfg = load_config(args.config, args)
    classifier = _classifier_for(cfg, args.lexicon)
    writer = _Writer(args.dry_run)
    params = {"input": args.input, "format": args.format,
              "threshold": cfg.label_threshold,
              "lexicon": args.lexicon or cfg.lexicon_path or "(bundled)"}
    if args.dry_run:
        writer.paths = [args.out]
        return _finish(writer, "classify", params)
    posts, parse_report = parse_records(_read_bytes(args.input), args.format)
    labeled, report = label_posts(posts, classifier, cfg.label_threshold)
    writer.write(Path(args.out), write_labeled_jsonl(labeled))
    summary = {"labeled": report.labeled, "dropped": report.dropped,
               "parse": parse_report.as_dict()}
    print(json.dumps(summary, ensure_ascii=False))
    if args.report:
        writer.write(Path(args.report), json.dumps(summary, ensure_ascii=False, indent=2) + "\n")
    return 0


def _series_csv(rows: list[dict], value_key: str = "value") -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["day", "value", "defined"])
    for row in rows:
        value = row.get(value_key)
        w.writerow([row["day"], "" if value is None else value,
                    str(bool(row.get("defined", value is not None))).lower()])
    return buf.getvalue()


def _write_metric_csvs(writer: _Writer, metrics_dir: Path, block: dict,
                       categories: CategorySet) -> None:
    fields = block["fields"]
    writer.write(metrics_dir / "ei.csv", _series_csv(fields["ei_series"]))
    writer.write(metrics_dir / "diversity.csv", _series_csv(fields["diversity_series"]))
    writer.write(metrics_dir / "modularity.csv", _series_csv(fields["segmentation_series"]))
    for label in categories.labels:
        rows = [{"day": r["day"],
                 "value": r["shares"][label] if r["defined"] else None,
                 "defined": r["defined"]}
                for r in fields["dominance_series"]]
        writer.write(metrics_dir / f"dominance_{_slug(label)}.csv", _series_csv(rows))
        rows = [{"day": r["day"], "value": r["ratios"][label],
                 "defined": r["ratios"][label] is not None}
                for r in fields["scatter_series"]]
        writer.write(metrics_dir / f"scatter_{_slug(label)}.csv", _series_csv(rows))
        rows = [{"day": r["day"], "value": r["counts"][label], "defined": r["defined"]}
                for r in fields["community_count_series"]]
        writer.write(metrics_dir / f"community_count_{_slug(label)}.csv", _series_csv(rows))


def cmd_analyze(args: argparse.Namespace) -> int:
    cfg = load_config(args.config, args)
    if not cfg.areas or not cfg.events:
        raise DataError("analyze needs at least one area and one event in the config")
    writer = _Writer(args.dry_run)
    out_dir = Path(args.out_dir)
    params = {"input": args.input, "seed": cfg.seed, "k_min": cfg.k_min,
              "theta": cfg.theta,
              "pairs": [f"{a.name} / {e.event_name}"
                        for a in cfg.areas for e in cfg.events]}
    if args.dry_run:
        writer.paths = [str(out_dir / "report.json")]
        return _finish(writer, "analyze", params)

    labeled, _ = read_labeled_jsonl(_read_bytes(args.input), cfg.categories)
    baseline = _baseline_distribution(cfg)
    reports = []
    for area in cfg.areas:
        for event in cfg.events:
            part = partition(labeled, area, event)
            analysis = analyze_partition(part, cfg.categories,
                                         k_min=cfg.k_min, theta=cfg.theta,
                                         baseline=baseline)
            reports.append(analysis.report)
            pair_dir = out_dir / _slug(area.name, event.event_name)
            for day_result in analysis.days:
                writer.write(pair_dir / "graphs" / f"{day_result.day.isoformat()}.json",
                             graph_to_json(day_result.graph))
            all_comms = [c for r in analysis.days for c in r.communities]
            writer.write(pair_dir / "communities.json", communities_to_json(all_comms))
            all_chains = [ch for label in cfg.categories.labels
                          for ch in analysis.chains_by_category[label]]
            writer.write(pair_dir / "chains.csv", chains_to_csv(all_chains))
            writer.write(pair_dir / "chains.json", chains_to_json(all_chains))
            _write_metric_csvs(writer, pair_dir / "metrics",
                               analysis.report.blocks[0], cfg.categories)
    merged = combine_reports(reports)
    writer.write(out_dir / "report.json", merged.to_json())
    return _finish(writer, "analyze", params)


def cmd_render(args: argparse.Namespace) -> int:
    cfg = load_config(args.config, args)
    if not cfg.areas or not cfg.events:
        raise DataError("render needs at least one area and one event in the config")
    if args.day is None and not args.montage:
        raise DataError("render needs --day or --montage")
    style = _style_for(cfg)
    writer = _Writer(args.dry_run)
    out_dir = Path(args.out_dir)
    params = {"input": args.input, "seed": cfg.seed,
              "montage": bool(args.montage), "day": args.day}
    if args.dry_run:
        writer.paths = [str(out_dir)]
        return _finish(writer, "render", params)

    labeled, _ = read_labeled_jsonl(_read_bytes(args.input), cfg.categories)
    from .graph import build_day_graph, filter_graph  # local to keep imports light
    for area in cfg.areas:
        for event in cfg.events:
            part = partition(labeled, area, event)
            render_dir = out_dir / _slug(area.name, event.event_name) / "render"
            if args.day is not None:
                try:
                    day = dt.date.fromisoformat(args.day)
                except ValueError as exc:
                    raise DataError(f"bad --day value {args.day!r}: {exc}") from exc
                if not event.contains(day):
                    raise DataError(f"day {args.day} is outside the window of "
                                    f"{event.event_name}")
                days = [day]
            else:
                days = event.days()
            snaps = []
            for day in days:
                g = filter_graph(build_day_graph(part, day))
                lay = layout(g, cfg.seed)
                snap = snapshot(g, lay, style)
                snaps.append(snap)
                writer.write(render_dir / f"{day.isoformat()}.svg", snap.svg)
                writer.write(render_dir / f"{day.isoformat()}.dot",
                             graph_to_dot(g, style.colors, style.receiver_color))
            if args.montage:
                writer.write(render_dir / "montage.svg", montage(snaps, style))
    return _finish(writer, "render", params)


def cmd_eval(args: argparse.Namespace) -> int:
    cfg = load_config(args.config, args)
    classifier = _classifier_for(cfg, args.lexicon)
    writer = _Writer(args.dry_run)
    params = {"corpus": args.corpus or "(bundled)",
              "train_fraction": args.train_fraction, "seed": cfg.seed,
              "stratified": not args.no_stratified}
    if args.dry_run:
        writer.paths = [args.out] if args.out else []
        return _finish(writer, "eval", params)
    if args.corpus:
        corpus = []
        for line in _read_bytes(args.corpus).decode("utf-8").splitlines():
            if line.strip():
                obj = json.loads(line)
                corpus.append((obj["text"], obj["label"]))
    else:
        corpus = bundled_eval_corpus()
    try:
        report = evaluate(classifier, corpus,
                          EvalConfig(train_fraction=args.train_fraction,
                                     seed=cfg.seed,
                                     stratified=not args.no_stratified))
    except ValueError as exc:
        raise DataError(str(exc)) from exc
    text = json.dumps(report.as_dict(), ensure_ascii=False, indent=2)
    print(text)
    if args.out:
        writer.write(Path(args.out), text + "\n")
    return 0


# ---------------------------------------------------------------------------
# argument wiring
# ---------------------------------------------------------------------------

def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON run configuration")
    p.add_argument("--seed", type=int, help="override the config seed")
    p.add_argument("--dry-run", action="store_true",
                   help="print the resolved plan without writing anything")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dfa", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", parents=[], help="generate a synthetic labeled stream")
    _add_common(p)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("classify", help="label a raw post stream")
    _add_common(p)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--format", choices=("jsonl", "csv"), default="jsonl")
    p.add_argument("--lexicon")
    p.add_argument("--threshold", type=float)
    p.add_argument("--out", required=True)
    p.add_argument("--report", help="also write the drop report to this path")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("analyze", help="graphs, communities, chains, and the report")
    _add_common(p)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--k-min", dest="k_min", type=int)
    p.add_argument("--theta", type=float)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("render", help="per-day SVG/DOT snapshots and montage")
    _add_common(p)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--day", help="render a single day (ISO date)")
    p.add_argument("--montage", action="store_true",
                   help="render every window day plus the montage grid")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("eval", help="hold-out evaluation of a classifier")
    _add_common(p)
    p.add_argument("--corpus", help="JSONL with text/label fields (default: bundled)")
    p.add_argument("--lexicon")
    p.add_argument("--train-fraction", type=float, default=0.8)
    p.add_argument("--no-stratified", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_eval)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DataError as exc:
        print(f"dfa {args.command}: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"dfa {args.command}: input file not found: {exc.filename}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
