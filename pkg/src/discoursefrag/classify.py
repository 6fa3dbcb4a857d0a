"""Category scoring and the labeling policy.

The classifier is pluggable: anything with a ``categories`` attribute and a
``classify(text, threshold=0.5) -> (label, score) | None`` method works. The shipped
baseline is a weighted lexicon whose raw per-category weight sum ``r`` is
squashed to ``r / (r + 1)``, so one unit of matched weight is exactly the
0.5 labeling threshold.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass
from importlib import resources
from typing import IO, Iterable, Mapping, Union

from .ingest import ParseReport, Post, RecordError, record_to_post
from .textprep import preprocess, stem

DEFAULT_THRESHOLD = 0.5
NONE_LABEL = "__none__"  # confusion-matrix column for unlabeled predictions


@dataclass(frozen=True)
class Category:
    label: str
    color: str

    def __post_init__(self):
        if not self.label:
            raise ValueError("category label must be nonempty")
        if not (self.color.startswith("#") and len(self.color) == 7):
            raise ValueError(f"category color must be #rrggbb, got {self.color!r}")


class CategorySet:
    """Ordered set of discourse categories, each with a display color.

    Order matters: score ties are broken in favor of the first listed
    category, and every serialized series follows this order.
    """

    def __init__(self, categories: Iterable[Category]):
        cats = tuple(categories)
        if len(cats) < 2:
            raise ValueError("a category set needs at least 2 categories")
        labels = [c.label for c in cats]
        colors = [c.color for c in cats]
        if len(set(labels)) != len(labels):
            raise ValueError("category labels must be unique")
        if len(set(colors)) != len(colors):
            raise ValueError("category colors must be unique")
        self._cats = cats
        self._index = {c.label: i for i, c in enumerate(cats)}

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(c.label for c in self._cats)

    def color_of(self, label: str) -> str:
        return self._cats[self._index[label]].color

    def colors(self) -> dict[str, str]:
        return {c.label: c.color for c in self._cats}

    def index(self, label: str) -> int:
        return self._index[label]

    def __contains__(self, label: str) -> bool:
        return label in self._index

    def __iter__(self):
        return iter(self._cats)

    def __len__(self) -> int:
        return len(self._cats)

    def __eq__(self, other) -> bool:
        return isinstance(other, CategorySet) and self._cats == other._cats


def default_category_set() -> CategorySet:
    """The six bundled discrimination-speech categories."""
    return CategorySet([
        Category("sexism", "#984ea3"),
        Category("racism", "#e41a1c"),
        Category("xenophobia", "#377eb8"),
        Category("ableism", "#ff7f00"),
        Category("homophobia", "#4daf4a"),
        Category("religious_intolerance", "#a65628"),
    ])


@dataclass(frozen=True, kw_only=True)
class LabeledPost(Post):
    """A post that cleared the labeling threshold for some category."""

    label: str
    score: float

    def __post_init__(self):
        super().__post_init__()
        if not self.label:
            raise ValueError("label must be nonempty")
        if not 0.5 <= self.score <= 1.0:
            raise ValueError(f"label score must be in [0.5, 1], got {self.score}")


def labeled_from_post(post: Post, label: str, score: float) -> LabeledPost:
    return LabeledPost(
        id=post.id, user_id=post.user_id, created_at=post.created_at,
        text=post.text, area=post.area, reply_to_user=post.reply_to_user,
        retweet_of_user=post.retweet_of_user, mentions=post.mentions,
        label=label, score=score,
    )


class LexiconClassifier:
    """Weighted-lexicon baseline scorer.

    The lexicon maps each category to ``{term: weight}`` where terms are
    already stemmed with the package stemmer and weights are finite and
    positive. A category's raw score is the weight sum over matching
    tokens (counting multiplicity), squashed to [0, 1) via r / (r + 1).
    """

    def __init__(self, categories: CategorySet, lexicon: Mapping[str, Mapping[str, float]]):
        missing = [l for l in categories.labels if l not in lexicon]
        if missing:
            raise ValueError(f"lexicon has no entry for categories: {missing}")
        unknown = [l for l in lexicon if l not in categories]
        if unknown:
            raise ValueError(f"lexicon categories not in the category set: {sorted(unknown)}")
        for label in categories.labels:
            for term, weight in lexicon[label].items():
                if not (isinstance(weight, (int, float)) and math.isfinite(weight) and weight > 0):
                    raise ValueError(f"weight for {label}/{term} must be finite and positive")
                if stem(term) != term:
                    raise ValueError(f"lexicon term {term!r} is not a stem "
                                     f"(expected {stem(term)!r})")
        self.categories = categories
        self._lexicon = {label: dict(lexicon[label]) for label in categories.labels}

    def score_tokens(self, tokens: Iterable[str]) -> dict[str, float]:
        """ScoreVector over the category set, in category order."""
        scores: dict[str, float] = {}
        for label in self.categories.labels:
            table = self._lexicon[label]
            raw = sum(table[t] for t in tokens if t in table)
            scores[label] = raw / (raw + 1.0)
        return scores

    def classify(self, text: str,
                 threshold: float = DEFAULT_THRESHOLD) -> tuple[str, float] | None:
        return assign_label(self.score_tokens(preprocess(text)), threshold)


def score(classifier, tokens: Iterable[str]) -> dict[str, float]:
    """Score a token list against the classifier's category set."""
    tokens = list(tokens)
    vec = classifier.score_tokens(tokens)
    if tuple(vec) != classifier.categories.labels:
        raise ValueError("classifier returned scores that do not match its category set")
    return vec


def assign_label(scores: Mapping[str, float],
                 threshold: float = DEFAULT_THRESHOLD) -> tuple[str, float] | None:
    """Pick the winning category, or None when nothing clears the threshold.

    The argmax wins; exact ties go to the category listed first in the
    score vector's iteration order (which the scorers emit in category
    order).
    """
    best_label: str | None = None
    best_score = -1.0
    for label, value in scores.items():
        if not 0.0 <= value <= 1.0:
            raise ValueError(f"score for {label} out of [0, 1]: {value}")
        if value > best_score:
            best_label, best_score = label, value
    if best_label is None or best_score < threshold:
        return None
    return best_label, best_score


@dataclass(frozen=True)
class LabelReport:
    labeled: int
    dropped: int


def label_posts(posts: Iterable[Post], classifier,
                threshold: float = DEFAULT_THRESHOLD) -> tuple[list[LabeledPost], LabelReport]:
    """Label every post; posts with no qualifying category are dropped.

    Relative order is preserved and the drop count is reported.
    """
    labeled: list[LabeledPost] = []
    dropped = 0
    for post in posts:
        result = classifier.classify(post.text, threshold)
        if result is None:
            dropped += 1
            continue
        label, value = result
        labeled.append(labeled_from_post(post, label, value))
    return labeled, LabelReport(labeled=len(labeled), dropped=dropped)


@dataclass(frozen=True)
class EvalConfig:
    train_fraction: float = 0.8
    seed: int = 0
    stratified: bool = True

    def __post_init__(self):
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError("train_fraction must be in (0, 1)")


@dataclass(frozen=True)
class EvalReport:
    accuracy: float
    macro_f1: float
    per_category: dict[str, dict[str, float]]
    confusion: dict[str, dict[str, int]]
    train_size: int
    test_size: int
    seed: int

    def as_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "macro_f1": self.macro_f1,
            "per_category": self.per_category,
            "confusion": self.confusion,
            "train_size": self.train_size,
            "test_size": self.test_size,
            "seed": self.seed,
        }


def _split_indices(labels: list[str], categories: CategorySet,
                   cfg: EvalConfig) -> tuple[list[int], list[int]]:
    rng = random.Random(cfg.seed)
    if cfg.stratified:
        train: list[int] = []
        test: list[int] = []
        for label in categories.labels:
            idx = [i for i, l in enumerate(labels) if l == label]
            if not idx:
                raise ValueError(f"stratification impossible: no examples for category {label!r}")
            rng.shuffle(idx)
            n_train = min(len(idx) - 1, int(len(idx) * cfg.train_fraction))
            train.extend(idx[:n_train])
            test.extend(idx[n_train:])
        return sorted(train), sorted(test)
    idx = list(range(len(labels)))
    rng.shuffle(idx)
    n_train = min(len(idx) - 1, int(len(idx) * cfg.train_fraction))
    return sorted(idx[:n_train]), sorted(idx[n_train:])


def evaluate(classifier, corpus: list[tuple[str, str]],
             cfg: EvalConfig = EvalConfig()) -> EvalReport:
    """Hold-out evaluation of a classifier on a (text, gold label) corpus.

    The corpus is split with a seeded shuffle (per category when
    stratified) and all metrics are computed on the held-out fraction
    only, so a fixed seed gives a fixed report. Predictions that clear no
    threshold count as wrong and land in the __none__ confusion column.
    """
    if not corpus:
        raise ValueError("corpus is empty")
    categories: CategorySet = classifier.categories
    golds = [label for _, label in corpus]
    stray = sorted({g for g in golds if g not in categories})
    if stray:
        raise ValueError(f"corpus labels not in the category set: {stray}")
    _, test_idx = _split_indices(golds, categories, cfg)
    train_size = len(corpus) - len(test_idx)

    confusion: dict[str, dict[str, int]] = {
        g: {p: 0 for p in (*categories.labels, NONE_LABEL)} for g in categories.labels
    }
    correct = 0
    for i in test_idx:
        text, gold = corpus[i]
        result = classifier.classify(text)
        predicted = result[0] if result is not None else NONE_LABEL
        confusion[gold][predicted] += 1
        if predicted == gold:
            correct += 1

    per_category: dict[str, dict[str, float]] = {}
    f1s: list[float] = []
    for label in categories.labels:
        tp = confusion[label][label]
        fn = sum(confusion[label].values()) - tp
        fp = sum(confusion[g][label] for g in categories.labels if g != label)
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        per_category[label] = {"precision": precision, "recall": recall,
                               "f1": f1, "support": float(tp + fn)}
        f1s.append(f1)
    accuracy = correct / len(test_idx)
    return EvalReport(
        accuracy=accuracy,
        macro_f1=sum(f1s) / len(f1s),
        per_category=per_category,
        confusion=confusion,
        train_size=train_size,
        test_size=len(test_idx),
        seed=cfg.seed,
    )


# ---------------------------------------------------------------------------
# bundled resources and file formats
# ---------------------------------------------------------------------------

def load_lexicon(source: Union[str, bytes, IO[bytes]]) -> dict[str, dict[str, float]]:
    """Read a lexicon JSON object: {category: {term: weight}}."""
    if isinstance(source, (bytes, str)):
        raw = source
    else:
        raw = source.read()
    obj = json.loads(raw)
    if not isinstance(obj, dict):
        raise ValueError("lexicon file must contain a JSON object")
    return {cat: {t: float(w) for t, w in terms.items()} for cat, terms in obj.items()}


def default_lexicon() -> dict[str, dict[str, float]]:
    raw = resources.files("discoursefrag.data").joinpath("lexicon.json").read_text("utf-8")
    return load_lexicon(raw)


def default_classifier() -> LexiconClassifier:
    return LexiconClassifier(default_category_set(), default_lexicon())


def bundled_eval_corpus() -> list[tuple[str, str]]:
    """The 200-example labeled mini corpus shipped for evaluation tests."""
    raw = resources.files("discoursefrag.data").joinpath("mini_corpus.jsonl").read_text("utf-8")
    corpus = []
    for line in raw.splitlines():
        if line.strip():
            obj = json.loads(line)
            corpus.append((obj["text"], obj["label"]))
    return corpus


def write_labeled_jsonl(posts: Iterable[LabeledPost]) -> bytes:
    """Labeled posts as JSONL: the post schema plus label and score."""
    lines = []
    for p in posts:
        record = {
            "id": p.id, "user_id": p.user_id, "created_at": p.created_at,
            "text": p.text, "area": p.area,
            "reply_to_user": p.reply_to_user,
            "retweet_of_user": p.retweet_of_user,
            "mentions": list(p.mentions),
            "label": p.label, "score": p.score,
        }
        lines.append(json.dumps(record, ensure_ascii=False))
    return ("\n".join(lines) + ("\n" if lines else "")).encode("utf-8")


def read_labeled_jsonl(data: Union[bytes, str, IO[bytes]],
                       categories: CategorySet | None = None,
                       ) -> tuple[list[LabeledPost], ParseReport]:
    """Parse labeled posts, skipping records that fail validation."""
    if isinstance(data, bytes):
        text = data.decode("utf-8")
    elif isinstance(data, str):
        text = data
    else:
        raw = data.read()
        text = raw.decode("utf-8") if isinstance(raw, bytes) else raw
    report = ParseReport()
    posts: list[LabeledPost] = []
    seen: set[str] = set()
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError:
            report.skip("malformed")
            continue
        if not isinstance(obj, dict):
            report.skip("malformed")
            continue
        try:
            post = record_to_post(obj)
        except RecordError as exc:
            report.skip(exc.reason)
            continue
        label = obj.get("label")
        value = obj.get("score")
        if not label or not isinstance(label, str):
            report.skip("missing_label")
            continue
        if categories is not None and label not in categories:
            report.skip("unknown_label")
            continue
        if not isinstance(value, (int, float)) or isinstance(value, bool) \
                or not 0.5 <= float(value) <= 1.0:
            report.skip("invalid_score")
            continue
        if post.id in seen:
            report.skip("duplicate")
            continue
        seen.add(post.id)
        posts.append(labeled_from_post(post, label, float(value)))
        report.parsed += 1
    return posts, report
