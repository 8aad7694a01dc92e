"""Small text helpers: tokenizing, crude stemming, sentence splitting.

These exist so the deterministic mock pipeline has a stable, dependency-free
notion of word overlap. They are intentionally naive; live mode delegates the
equivalent judgments to an LLM.
"""

from __future__ import annotations

import re

_WORD_RE = re.compile(r"[a-z0-9]+(?:\.[a-z0-9]+)*", re.IGNORECASE)

STOPWORDS = frozenset(
    """a an and are as at be been by for from has have in into is it its of on
    or than that the their there these this those to was were will with about
    more most over under between while said says say than then they we you i
    not no do does did can could should would may might but if when where who
    what which how why people""".split()
)

_SUFFIXES = ("ings", "ing", "ed", "es", "s")

_ABBREVIATIONS = frozenset(
    ["u.s", "u.k", "u.n", "dr", "mr", "mrs", "ms", "vs", "etc", "e.g", "i.e", "approx", "no", "st"]
)


def tokenize(text: str) -> list[str]:
    """Lowercase word tokens, keeping dotted abbreviations together."""
    return [m.group(0).lower() for m in _WORD_RE.finditer(text)]


def stem(word: str) -> str:
    """Strip common inflectional suffixes; 'homeschooling' and 'homeschooled' agree."""
    w = word.lower()
    for suffix in _SUFFIXES:
        if w.endswith(suffix) and len(w) - len(suffix) >= 4:
            w = w[: -len(suffix)]
            if len(w) >= 4 and w[-1] == w[-2]:  # preferred -> preferr -> prefer
                w = w[:-1]
            break
    if w.endswith("y"):  # families/family meet at "famili"
        w = w[:-1] + "i"
    return w


def content_stems(text: str) -> set[str]:
    """Stemmed, stopword-free token set used for overlap judgments."""
    return {stem(t) for t in tokenize(text) if t not in STOPWORDS and not t.isdigit()}


def overlap(a: str, b: str) -> float:
    """Jaccard similarity of the two texts' content stems."""
    sa, sb = content_stems(a), content_stems(b)
    if not sa or not sb:
        return 0.0
    return len(sa & sb) / len(sa | sb)


_SENTENCE_END = re.compile(r"(?<=[.!?])\s+(?=[A-Z“\"(0-9])")


def split_sentences(text: str) -> list[str]:
    """Split on sentence punctuation, protecting decimals and abbreviations.

    A period after "U.S" or "3.7" never ends a sentence; otherwise a period,
    question mark, or exclamation mark followed by whitespace and an
    uppercase/numeral opener does.
    """
    candidates = _SENTENCE_END.split(text.strip())
    merged: list[str] = []
    for part in candidates:
        part = part.strip()
        if not part:
            continue
        if merged:
            prev = merged[-1]
            last = prev.rstrip(".").rsplit(None, 1)[-1].lower() if prev.rstrip(".") else ""
            if last in _ABBREVIATIONS or prev.endswith(("e.g.", "i.e.")):
                merged[-1] = prev + " " + part
                continue
        merged.append(part)
    return merged
