"""Streaming line-based N-Triples parser.

Pull-based: triples are yielded as the input is consumed, so arbitrarily
large dumps can be filtered without loading them into memory. Strict mode
raises on the first malformed line; lenient mode records an issue and
keeps going, which is the right default for scraped web-scale dumps.
"""

from __future__ import annotations

import io
import os
from dataclasses import dataclass
from typing import IO, Iterable, Iterator, Union
import re

from bkmatch.errors import DataError


@dataclass(frozen=True)
class Literal:
    value: str
    lang: str | None = None
    datatype: str | None = None


@dataclass(frozen=True)
class Triple:
    subject: str
    predicate: str
    object: Union[str, Literal]


@dataclass(frozen=True)
class ParseIssue:
    line: int
    message: str
    text: str


class NTriplesError(DataError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


def is_blank(term: str) -> bool:
    """Blank nodes are carried as '_:<label>' strings with stable labels."""
    return term.startswith("_:")


_IRI_BODY = r'(?:[^\x00-\x20<>"{}|^`\\]|\\u[0-9A-Fa-f]{4}|\\U[0-9A-Fa-f]{8})*'
_BNODE_LABEL = r"[A-Za-z0-9_][A-Za-z0-9_.\-]*"
_LIT_BODY = r'(?:[^"\\\n\r]|\\.)*'
_LANG = r"[A-Za-z]+(?:-[A-Za-z0-9]+)*"

_TRIPLE_RE = re.compile(
    rf"^[ \t]*"
    rf"(?:<(?P<s_iri>{_IRI_BODY})>|_:(?P<s_bn>{_BNODE_LABEL}))[ \t]+"
    rf"<(?P<p_iri>{_IRI_BODY})>[ \t]+"
    rf'(?:<(?P<o_iri>{_IRI_BODY})>|_:(?P<o_bn>{_BNODE_LABEL})|"(?P<o_lit>{_LIT_BODY})"'
    rf"(?:\^\^<(?P<o_dt>{_IRI_BODY})>|@(?P<o_lang>{_LANG}))?)"
    rf"[ \t]*\.[ \t]*(?:#.*)?$"
)

_BLANK_RE = re.compile(r"^[ \t]*(?:#.*)?$")

_STRING_ESCAPES = {
    "t": "\t",
    "b": "\b",
    "n": "\n",
    "r": "\r",
    "f": "\f",
    '"': '"',
    "'": "'",
    "\\": "\\",
}

_ESCAPE_RE = re.compile(r"\\(u[0-9A-Fa-f]{4}|U[0-9A-Fa-f]{8}|.)")


def _unescape(text: str, *, string_escapes: bool) -> str:
    if "\\" not in text:
        return text

    def repl(match: re.Match) -> str:
        body = match.group(1)
        if body[0] == "u" and len(body) == 5:
            return chr(int(body[1:], 16))
        if body[0] == "U" and len(body) == 9:
            return chr(int(body[1:], 16))
        if string_escapes and body in _STRING_ESCAPES:
            return _STRING_ESCAPES[body]
        raise ValueError(f"invalid escape sequence '\\{body}'")

    return _ESCAPE_RE.sub(repl, text)


Source = Union[str, os.PathLike, IO, Iterable[Union[str, bytes]]]


def _line_stream(source: Source) -> Iterator[str]:
    if isinstance(source, (str, os.PathLike)):
        with open(source, "r", encoding="utf-8") as handle:
            yield from handle
        return
    if isinstance(source, io.IOBase) or hasattr(source, "read"):
        source = iter(source)
    for raw in source:
        if isinstance(raw, bytes):
            yield raw.decode("utf-8")
        else:
            yield raw


def parse_ntriples(
    source: Source,
    *,
    strict: bool = True,
    issues: list[ParseIssue] | None = None,
) -> Iterator[Triple]:
    """Yield triples from a path, file object, or iterable of lines.

    Malformed lines raise NTriplesError in strict mode; otherwise each
    one is appended to `issues` (when given) and skipped.
    """
    for lineno, line in enumerate(_line_stream(source), start=1):
        line = line.rstrip("\n").rstrip("\r")
        if _BLANK_RE.match(line):
            continue
        match = _TRIPLE_RE.match(line)
        if match is None:
            _report(lineno, "not a valid triple", line, strict, issues)
            continue
        try:
            triple = _build_triple(match)
        except ValueError as exc:
            _report(lineno, str(exc), line, strict, issues)
            continue
        yield triple


def _report(
    lineno: int, message: str, text: str, strict: bool, issues: list[ParseIssue] | None
) -> None:
    if strict:
        raise NTriplesError(lineno, message)
    if issues is not None:
        issues.append(ParseIssue(lineno, message, text))


def _build_triple(match: re.Match) -> Triple:
    groups = match.groupdict()
    if groups["s_iri"] is not None:
        subject = _unescape(groups["s_iri"], string_escapes=False)
    else:
        subject = "_:" + groups["s_bn"]
    predicate = _unescape(groups["p_iri"], string_escapes=False)
    obj: Union[str, Literal]
    if groups["o_iri"] is not None:
        obj = _unescape(groups["o_iri"], string_escapes=False)
    elif groups["o_bn"] is not None:
        obj = "_:" + groups["o_bn"]
    else:
        value = _unescape(groups["o_lit"], string_escapes=True)
        datatype = groups["o_dt"]
        if datatype is not None:
            datatype = _unescape(datatype, string_escapes=False)
        obj = Literal(value, lang=groups["o_lang"], datatype=datatype)
    return Triple(subject, predicate, obj)
