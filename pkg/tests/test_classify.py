import json
import random
from pathlib import Path

import pytest

from discoursefrag.classify import (EvalConfig,
                                    LexiconClassifier, assign_label,
                                    bundled_eval_corpus, default_category_set,
                                    default_classifier, evaluate, label_posts,
                                    score)
from discoursefrag.ingest import Post
from discoursefrag.textprep import preprocess

GOLDEN = Path(__file__).parent / "golden" / "eval_mini_corpus.json"


def lexicon_classifier(categories):
    lexicon = {
        "alpha": {"ape": 1.0, "ant": 3.0},
        "beta": {"bee": 1.0, "bat": 1.0},
        "gamma": {"gnu": 2.0},
    }
    return LexiconClassifier(categories, lexicon)


class TestScore:
    def test_single_weight_one_term_is_exactly_half(self, categories):
        clf = lexicon_classifier(categories)
        vec = score(clf, ["ape"])
        assert vec["alpha"] == 0.5
        assert vec["beta"] == 0.0 and vec["gamma"] == 0.0

    def test_no_matches_all_zero(self, categories):
        clf = lexicon_classifier(categories)
        assert all(v == 0.0 for v in score(clf, ["zzz"]).values())

    def test_squash_of_raw_weights(self, categories):
        clf = lexicon_classifier(categories)
        vec = score(clf, ["ant", "bee"])  # raw alpha 3, beta 1
        assert vec["alpha"] == 0.75
        assert vec["beta"] == 0.5

    def test_multiplicity_counts(self, categories):
        clf = lexicon_classifier(categories)
        assert score(clf, ["ape", "ape"])["alpha"] == pytest.approx(2 / 3)

    def test_monotone_in_matching_tokens(self, categories):
        clf = lexicon_classifier(categories)
        rng = random.Random(13)
        vocab = ["ape", "ant", "bee", "bat", "gnu", "zzz", "yyy"]
        for _ in range(300):
            tokens = [rng.choice(vocab) for _ in range(rng.randrange(6))]
            base = score(clf, tokens)["alpha"]
            assert score(clf, tokens + ["ape"])["alpha"] >= base

    def test_lexicon_category_mismatch_rejected(self, categories):
        with pytest.raises(ValueError):
            LexiconClassifier(categories, {"alpha": {"ape": 1.0}})

    def test_unstemmed_lexicon_term_rejected(self, categories):
        with pytest.raises(ValueError):
            LexiconClassifier(categories, {
                "alpha": {"running": 1.0}, "beta": {}, "gamma": {},
            })


class TestAssignLabel:
    def test_argmax_wins(self):
        result = assign_label({"racism": 0.6, "sexism": 0.7, "others": 0.0})
        assert result == ("sexism", 0.7)

    def test_below_threshold_is_none(self):
        assert assign_label({"a": 0.49, "b": 0.49}) is None

    def test_tie_breaks_to_first_listed(self):
        assert assign_label({"sexism": 0.6, "racism": 0.6}) == ("sexism", 0.6)
        assert assign_label({"racism": 0.6, "sexism": 0.6}) == ("racism", 0.6)

    def test_custom_threshold(self):
        assert assign_label({"a": 0.55, "b": 0.1}, threshold=0.6) is None

    def test_out_of_range_score_rejected(self):
        with pytest.raises(ValueError):
            assign_label({"a": 1.2})

    def test_policy_over_random_vectors(self):
        rng = random.Random(2024)
        labels = ["c1", "c2", "c3", "c4"]
        for _ in range(2000):
            vec = {l: rng.random() for l in labels}
            result = assign_label(vec)
            best = max(vec.values())
            if best < 0.5:
                assert result is None
            else:
                label, value = result
                assert value == best
                assert label == next(l for l in labels if vec[l] == best)

    def test_scaling_weights_never_flips_argmax(self, categories):
        # r/(r+1) is strictly monotone, so scaling all weights by the same
        # factor preserves both the argmax and threshold clearance.
        rng = random.Random(5)
        vocab = ["ape", "ant", "bee", "bat", "gnu"]
        base = {"alpha": {"ape": 1.0, "ant": 3.0},
                "beta": {"bee": 1.0, "bat": 1.0},
                "gamma": {"gnu": 2.0}}
        for lam in (1.5, 2.0, 10.0):
            scaled = {c: {t: w * lam for t, w in terms.items()}
                      for c, terms in base.items()}
            clf_a = LexiconClassifier(categories, base)
            clf_b = LexiconClassifier(categories, scaled)
            for _ in range(200):
                tokens = [rng.choice(vocab) for _ in range(rng.randrange(1, 6))]
                r_a = assign_label(clf_a.score_tokens(tokens))
                r_b = assign_label(clf_b.score_tokens(tokens))
                if r_a is None:
                    continue  # scaling can only add labels, never remove
                assert r_b is not None and r_b[0] == r_a[0]


def _posts(texts):
    return [Post(id=f"p{i}", user_id=f"u{i}", created_at=1_000 + i,
                 text=t, area="A") for i, t in enumerate(texts)]


class TestLabelPosts:
    def test_drop_count(self, categories):
        clf = lexicon_classifier(categories)
        texts = ["ape here", "nothing", "bee bee", "still nothing", "gnu",
                 "nope", "no", "na", "nah", "meh"]
        labeled, report = label_posts(_posts(texts), clf)
        assert report.labeled == 3 and report.dropped == 7
        assert [p.label for p in labeled] == ["alpha", "beta", "gamma"]
        assert [p.id for p in labeled] == ["p0", "p2", "p4"]

    def test_empty(self, categories):
        labeled, report = label_posts([], lexicon_classifier(categories))
        assert labeled == [] and report.dropped == 0

    def test_deterministic(self, categories):
        clf = lexicon_classifier(categories)
        posts = _posts(["ape", "bee", "zzz"] * 10)
        a, _ = label_posts(posts, clf)
        b, _ = label_posts(posts, clf)
        assert a == b

    def test_threshold_soundness(self, categories):
        clf = lexicon_classifier(categories)
        rng = random.Random(77)
        vocab = ["ape", "ant", "bee", "bat", "gnu", "zzz", "qqq"]
        posts = _posts(" ".join(rng.choice(vocab) for _ in range(rng.randrange(5)))
                       for _ in range(500))
        labeled, report = label_posts(posts, clf)
        labeled_ids = {p.id for p in labeled}
        assert report.dropped == len(posts) - len(labeled)
        for post in posts:
            vec = clf.score_tokens(preprocess(post.text))
            if post.id in labeled_ids:
                assert max(vec.values()) >= 0.5
            else:
                assert max(vec.values()) < 0.5
        for p in labeled:
            assert p.score >= 0.5


class EchoClassifier:
    """Test double that answers from a fixed text -> label map."""

    def __init__(self, categories, mapping):
        self.categories = categories
        self._mapping = mapping

    def classify(self, text, threshold=0.5):
        label = self._mapping.get(text)
        return None if label is None else (label, 1.0)


class TestEvaluate:
    def _corpus(self, categories):
        rng = random.Random(3)
        return [(f"text {i}", rng.choice(categories.labels)) for i in range(60)]

    def test_echo_classifier_is_perfect(self, categories):
        corpus = self._corpus(categories)
        clf = EchoClassifier(categories, dict(corpus))
        report = evaluate(clf, corpus, EvalConfig(seed=1))
        assert report.accuracy == 1.0
        assert report.macro_f1 == 1.0

    def test_never_labeling_scores_zero(self, categories):
        corpus = self._corpus(categories)
        clf = EchoClassifier(categories, {})
        report = evaluate(clf, corpus, EvalConfig(seed=1))
        assert report.accuracy == 0.0
        none_col = sum(report.confusion[g]["__none__"] for g in categories.labels)
        assert none_col == report.test_size

    def test_stratification_error_names_category(self, categories):
        corpus = [("t", "alpha"), ("u", "beta")]  # gamma missing
        clf = EchoClassifier(categories, dict(corpus))
        with pytest.raises(ValueError, match="gamma"):
            evaluate(clf, corpus, EvalConfig(seed=1))

    def test_seeded_split_is_deterministic(self, categories):
        corpus = self._corpus(categories)
        clf = EchoClassifier(categories, {t: "alpha" for t, _ in corpus})
        a = evaluate(clf, corpus, EvalConfig(seed=9))
        b = evaluate(clf, corpus, EvalConfig(seed=9))
        assert a.as_dict() == b.as_dict()

    def test_metrics_on_held_out_fraction_only(self, categories):
        corpus = self._corpus(categories)
        clf = EchoClassifier(categories, dict(corpus))
        report = evaluate(clf, corpus, EvalConfig(train_fraction=0.8, seed=2))
        assert report.train_size + report.test_size == len(corpus)
        assert report.test_size == sum(
            sum(row.values()) for row in report.confusion.values())

    def test_golden_report_on_bundled_corpus(self):
        report = evaluate(default_classifier(), bundled_eval_corpus(),
                          EvalConfig(train_fraction=0.8, seed=7, stratified=True))
        golden = json.loads(GOLDEN.read_text("utf-8"))
        assert report.as_dict() == golden


def test_default_category_set_lists_six():
    cats = default_category_set()
    assert cats.labels == ("sexism", "racism", "xenophobia", "ableism",
                           "homophobia", "religious_intolerance")
    assert len(set(cats.colors().values())) == 6
