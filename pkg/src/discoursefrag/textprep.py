"""Text preprocessing: cleaning, tokenization, stop-word removal, stemming.

The whole chain is deterministic and self-contained. The stop-word list is
a fixed snapshot shipped with the package (``data/stopwords.txt``) and the
stemmer is a small table of suffix rules, so results never drift with
external resources.
"""

from __future__ import annotations

import re
from functools import lru_cache
from importlib import resources

_URL_RE = re.compile(r"(?:https?://|www\.)\S+")
_HANDLE_RE = re.compile(r"@\w+")

_VOWELS = frozenset("aeiou")
# double consonants reduced to a single letter after -ed/-ing removal
_DOUBLES = frozenset({"bb", "dd", "ff", "gg", "mm", "nn", "pp", "rr", "tt"})


@lru_cache(maxsize=1)
def stopwords() -> frozenset[str]:
    """The bundled stop-word list (lowercase, one word per line)."""
    text = resources.files("discoursefrag.data").joinpath("stopwords.txt").read_text("utf-8")
    return frozenset(w for w in text.split() if w)


def _has_vowel(s: str) -> bool:
    return any(c in _VOWELS for c in s)


def _strip_pass(w: str) -> str:
    # plural endings
    if w.endswith("sses"):
        return w[:-2]
    if w.endswith("ies"):
        return w[:-2]
    if not w.endswith("ss") and w.endswith("s") and len(w) > 3:
        w = w[:-1]
    # past / progressive endings ("eed" is left alone so agreed/feed stay put)
    if not w.endswith("eed"):
        if w.endswith("ed") and len(w) >= 5 and _has_vowel(w[:-2]):
            w = w[:-2]
            if w[-2:] in _DOUBLES:
                w = w[:-1]
        elif w.endswith("ing") and len(w) >= 6 and _has_vowel(w[:-3]):
            w = w[:-3]
            if w[-2:] in _DOUBLES:
                w = w[:-1]
    # trailing y acts as i for matching purposes (family/families -> famili)
    if w.endswith("y") and len(w) >= 3 and _has_vowel(w[:-1]):
        w = w[:-1] + "i"
    return w


def stem(word: str) -> str:
    """Suffix-stripping stemmer, iterated to a fixed point.

    Running the rule table until nothing changes makes ``stem`` idempotent
    by construction, which keeps the whole preprocessing chain idempotent.
    """
    w = word
    for _ in range(len(word) + 2):
        nxt = _strip_pass(w)
        if nxt == w:
            return w
        w = nxt
    return w


def preprocess(text: str) -> list[str]:
    """Normalize raw post text into a list of stemmed tokens.

    Lowercases, removes URLs (http/https/www) and @-handles, strips
    punctuation and digits, splits on whitespace, drops stop words and
    stems what is left. Tokens whose stem lands on a stop word are dropped
    as well, so reprocessing its own output is a no-op. Token order is
    preserved.
    """
    lowered = text.lower()
    lowered = _URL_RE.sub(" ", lowered)
    lowered = _HANDLE_RE.sub(" ", lowered)
    cleaned = "".join(c if c.isalpha() or c.isspace() else " " for c in lowered)
    stop = stopwords()
    out: list[str] = []
    for token in cleaned.split():
        if token in stop:
            continue
        stemmed = stem(token)
        if stemmed and stemmed not in stop:
            out.append(stemmed)
    return out
