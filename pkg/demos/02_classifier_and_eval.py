"""
Text preprocessing, scoring, and hold-out evaluation
====================================================

Walks a post through the preprocessing chain, scores it against the
bundled lexicon, and evaluates the baseline classifier on the bundled
200-example corpus with a seeded 80/20 split.
"""

import json

import discoursefrag as df
from discoursefrag.classify import EvalConfig, bundled_eval_corpus, evaluate

text = "Check out the xenophobia in these replies https://t.example @mayor !!"
tokens = df.preprocess(text)
print("raw:   ", text)
print("tokens:", tokens)

clf = df.default_classifier()
vector = df.score(clf, tokens)
print("\nscores per category:")
for label, value in vector.items():
    print(f"  {label:24s} {value:.3f}")
print("assigned:", df.assign_label(vector))

# a post with no lexicon hits clears no threshold and would be dropped
print("\nno-signal post:", clf.classify("lovely weather in the park today"))

report = evaluate(clf, bundled_eval_corpus(), EvalConfig(seed=7))
print(f"\nheld-out accuracy: {report.accuracy:.3f}  "
      f"macro F1: {report.macro_f1:.3f}  (test n={report.test_size})")
print(json.dumps(report.per_category, indent=2)[:400], "...")
