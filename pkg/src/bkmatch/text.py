"""Label normalisation and tokenisation shared by the linker and matcher."""

from __future__ import annotations

import re

DEFAULT_STOPWORDS = frozenset({"a", "an", "the", "of", "has", "is"})

_SEPARATORS = re.compile(r"[_\-]+")
# boundary between a lower/digit and an upper char, or before the last
# upper of an acronym run followed by a lower char ("HTTPServer")
_CAMEL_BOUNDARY = re.compile(r"(?<=[a-z0-9])(?=[A-Z])|(?<=[A-Z])(?=[A-Z][a-z])")
_WHITESPACE = re.compile(r"\s+")


def normalize_label(label: str) -> str:
    """Lowercase, split word separators and camel-case, collapse whitespace."""
    text = _SEPARATORS.sub(" ", label)
    text = _CAMEL_BOUNDARY.sub(" ", text)
    text = _WHITESPACE.sub(" ", text.lower())
    return text.strip()


def tokenize_label(label: str, stopwords: frozenset[str] = DEFAULT_STOPWORDS) -> list[str]:
    """Tokens of the normalised label, stopwords removed.

    Removal never empties the result: a label made of stopwords only is
    returned unfiltered.
    """
    tokens = normalize_label(label).split(" ")
    tokens = [t for t in tokens if t]
    if not tokens:
        return tokens
    kept = [t for t in tokens if t not in stopwords]
    return kept if kept else tokens


def iri_local_name(iri: str) -> str:
    """Fragment after the last '#' or '/'; the whole IRI when there is none."""
    cut = max(iri.rfind("#"), iri.rfind("/"))
    name = iri[cut + 1 :]
    return name if name else iri
