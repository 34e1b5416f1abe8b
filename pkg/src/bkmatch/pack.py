"""Background-knowledge packs and the label-to-concept linker.

A pack is a surface-form index plus synonymy and hypernymy adjacencies
over opaque concept IDs. Linking runs three exclusive steps from most to
least specific: the whole normalised label, then greedy longest
left-anchored token spans, then isolated tokens.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping

from bkmatch.errors import DataError
from bkmatch.text import DEFAULT_STOPWORDS, normalize_label, tokenize_label

log = logging.getLogger(__name__)

META_FILE = "pack.meta"
LABELS_FILE = "labels.tsv"
SYNONYMY_FILE = "synonymy.tsv"
HYPERNYMY_FILE = "hypernymy.tsv"


class LinkTier(Enum):
    FULL_LABEL = "full-label"
    LONGEST_TOKEN = "longest-token"
    TOKEN = "token"


@dataclass(frozen=True)
class LinkResult:
    """Concept sets for the linked sub-spans of one label, in label order."""

    concepts: tuple[frozenset[str], ...]
    tier: LinkTier
    unlinked_tokens: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not self.concepts:
            raise ValueError("a link result needs at least one concept set")
        if any(not span for span in self.concepts):
            raise ValueError("concept sets must be non-empty")
        if self.tier is LinkTier.FULL_LABEL and (len(self.concepts) != 1 or self.unlinked_tokens):
            raise ValueError("full-label links carry exactly one concept set and no leftovers")
        if self.tier is not LinkTier.TOKEN and self.unlinked_tokens:
            raise ValueError("only token-level links may have unlinked tokens")


@dataclass
class LinkStats:
    """Instrumentation for the linker; probes count index lookups per step."""

    full_label_probes: int = 0
    longest_token_probes: int = 0
    token_probes: int = 0
    full_label_links: int = 0
    longest_token_links: int = 0
    token_links: int = 0
    unlinked_labels: int = 0


class BackgroundPack:
    """Immutable in-memory view of one background source."""

    def __init__(
        self,
        name: str,
        surface_index: Mapping[str, frozenset[str]],
        synonyms: Mapping[str, frozenset[str]],
        hypernyms: Mapping[str, frozenset[str]],
        mutual_hypernymy_synonymy: bool = False,
    ):
        if not name:
            raise ValueError("pack name must be non-empty")
        self.name = name
        self.surface_index = dict(surface_index)
        self._synonyms = dict(synonyms)
        self._hypernyms = dict(hypernyms)
        self.mutual_hypernymy_synonymy = mutual_hypernymy_synonymy
        self.orphan_concepts = self._find_orphans()
        if self.orphan_concepts:
            log.warning(
                "pack %s: %d concept IDs appear in edges but have no surface form",
                name,
                len(self.orphan_concepts),
            )

    @classmethod
    def from_edges(
        cls,
        name: str,
        surface_index: Mapping[str, Iterable[str]],
        synonym_edges: Iterable[tuple[str, str]] = (),
        hypernym_edges: Iterable[tuple[str, str]] = (),
        mutual_hypernymy_synonymy: bool = False,
    ) -> "BackgroundPack":
        """Build a pack from edge lists; symmetrises synonymy."""
        index = {normalize_label(s): frozenset(c) for s, c in surface_index.items()}
        if "" in index:
            raise ValueError("empty surface form after normalisation")
        synonyms: dict[str, set[str]] = {}
        for a, b in synonym_edges:
            synonyms.setdefault(a, set()).add(b)
            synonyms.setdefault(b, set()).add(a)
        hypernyms: dict[str, set[str]] = {}
        for hypo, hyper in hypernym_edges:
            hypernyms.setdefault(hypo, set()).add(hyper)
        return cls(
            name,
            index,
            {c: frozenset(s) for c, s in synonyms.items()},
            {c: frozenset(s) for c, s in hypernyms.items()},
            mutual_hypernymy_synonymy,
        )

    def _find_orphans(self) -> frozenset[str]:
        known: set[str] = set()
        for concepts in self.surface_index.values():
            known.update(concepts)
        seen: set[str] = set()
        for adjacency in (self._synonyms, self._hypernyms):
            for concept, others in adjacency.items():
                seen.add(concept)
                seen.update(others)
        return frozenset(seen - known)

    def concepts(self, surface: str) -> frozenset[str]:
        return self.surface_index.get(surface, frozenset())

    def synonyms(self, concept: str) -> frozenset[str]:
        return self._synonyms.get(concept, frozenset())

    def hypernyms(self, concept: str) -> frozenset[str]:
        return self._hypernyms.get(concept, frozenset())

    def __repr__(self) -> str:
        return f"BackgroundPack({self.name!r}, {len(self.surface_index)} surface forms)"


def _iter_pairs(path: Path):
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 2 or not parts[0] or not parts[1]:
                raise DataError(f"{path}, line {lineno}: expected two tab-separated fields")
            yield parts[0], parts[1]


def _parse_meta(path: Path) -> dict[str, str]:
    meta: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise DataError(f"{path}, line {lineno}: expected key=value")
            key, value = line.split("=", 1)
            meta[key.strip()] = value.strip()
    return meta


def load_pack(directory: str | Path) -> BackgroundPack:
    """Load a pack directory (labels.tsv, synonymy.tsv, hypernymy.tsv, pack.meta)."""
    directory = Path(directory)
    for name in (META_FILE, LABELS_FILE, SYNONYMY_FILE, HYPERNYMY_FILE):
        if not (directory / name).is_file():
            raise DataError(f"pack {directory} is missing {name}")
    meta = _parse_meta(directory / META_FILE)
    if "name" not in meta:
        raise DataError(f"{directory / META_FILE}: missing required key 'name'")
    flag = meta.get("mutual_hypernymy_synonymy")
    if flag not in ("true", "false"):
        raise DataError(
            f"{directory / META_FILE}: key 'mutual_hypernymy_synonymy' must be true or false"
        )

    surface_index: dict[str, set[str]] = {}
    for surface, concept in _iter_pairs(directory / LABELS_FILE):
        # stored surface forms are already normalised; re-normalising is
        # idempotent and shields against hand-edited files
        surface_index.setdefault(normalize_label(surface), set()).add(concept)
    surface_index.pop("", None)
    return BackgroundPack.from_edges(
        meta["name"],
        {s: c for s, c in surface_index.items()},
        _iter_pairs(directory / SYNONYMY_FILE),
        _iter_pairs(directory / HYPERNYMY_FILE),
        flag == "true",
    )


def save_pack(pack: BackgroundPack, directory: str | Path) -> None:
    """Write a pack directory; lines are sorted for reproducible output."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    label_lines = sorted(
        f"{surface}\t{concept}"
        for surface, concepts in pack.surface_index.items()
        for concept in concepts
    )
    # one line per symmetric edge
    synonym_lines = sorted(
        {f"{min(a, b)}\t{max(a, b)}" for a in pack._synonyms for b in pack.synonyms(a)}
    )
    hypernym_lines = sorted(
        f"{hypo}\t{hyper}" for hypo in pack._hypernyms for hyper in pack.hypernyms(hypo)
    )
    (directory / LABELS_FILE).write_text("".join(line + "\n" for line in label_lines), encoding="utf-8")
    (directory / SYNONYMY_FILE).write_text("".join(line + "\n" for line in synonym_lines), encoding="utf-8")
    (directory / HYPERNYMY_FILE).write_text("".join(line + "\n" for line in hypernym_lines), encoding="utf-8")
    meta = f"name={pack.name}\nmutual_hypernymy_synonymy={'true' if pack.mutual_hypernymy_synonymy else 'false'}\n"
    (directory / META_FILE).write_text(meta, encoding="utf-8")


def link_label(
    label: str,
    pack: BackgroundPack,
    stopwords: frozenset[str] = DEFAULT_STOPWORDS,
    stats: LinkStats | None = None,
) -> LinkResult | None:
    """Link one label against a pack; None when nothing links.

    The steps are exclusive: a full-label hit never consults the token
    steps, which the probe counters in `stats` make observable.
    """
    index = pack.surface_index

    if stats is not None:
        stats.full_label_probes += 1
    whole = normalize_label(label)
    if whole in index:
        if stats is not None:
            stats.full_label_links += 1
        return LinkResult((index[whole],), LinkTier.FULL_LABEL)

    tokens = tokenize_label(label, stopwords)
    if not tokens:
        if stats is not None:
            stats.unlinked_labels += 1
        return None

    # greedy left-anchored spans, longest first; succeeds only if the
    # whole token sequence is consumed
    spans: list[frozenset[str]] = []
    remaining = tokens
    while remaining:
        hit_length = 0
        for length in range(len(remaining), 0, -1):
            if stats is not None:
                stats.longest_token_probes += 1
            candidate = " ".join(remaining[:length])
            if candidate in index:
                spans.append(index[candidate])
                hit_length = length
                break
        if hit_length == 0:
            break
        remaining = remaining[hit_length:]
    if spans and not remaining:
        if stats is not None:
            stats.longest_token_links += 1
        return LinkResult(tuple(spans), LinkTier.LONGEST_TOKEN)

    # isolated tokens; partial coverage allowed
    linked: list[frozenset[str]] = []
    unlinked: list[str] = []
    for token in tokens:
        if stats is not None:
            stats.token_probes += 1
        if token in index:
            linked.append(index[token])
        else:
            unlinked.append(token)
    if linked:
        if stats is not None:
            stats.token_links += 1
        return LinkResult(tuple(linked), LinkTier.TOKEN, tuple(unlinked))
    if stats is not None:
        stats.unlinked_labels += 1
    return None


def is_synonymous(c1: str, c2: str, pack: BackgroundPack) -> bool:
    """Identity, a synonymy edge, or mutual hypernymy where the pack allows it."""
    if c1 == c2:
        return True
    if c2 in pack.synonyms(c1):
        return True
    if pack.mutual_hypernymy_synonymy:
        return c2 in pack.hypernyms(c1) and c1 in pack.hypernyms(c2)
    return False


def is_hypernym(c1: str, c2: str, pack: BackgroundPack) -> bool:
    """True iff the pack records c2 as a direct hypernym of c1."""
    return c2 in pack.hypernyms(c1)


def _spans_match(
    span1: frozenset[str], span2: frozenset[str], pack: BackgroundPack, include_hypernyms: bool
) -> bool:
    for c1 in span1:
        for c2 in span2:
            if is_synonymous(c1, c2, pack):
                return True
            if include_hypernyms and (is_hypernym(c1, c2, pack) or is_hypernym(c2, c1, pack)):
                return True
    return False


def links_related(
    links1: LinkResult,
    links2: LinkResult,
    pack: BackgroundPack,
    include_hypernyms: bool = False,
) -> bool:
    """Bidirectional coverage: every sub-span needs a partner on the other side."""
    pairs = [
        [ _spans_match(a, b, pack, include_hypernyms) for b in links2.concepts ]
        for a in links1.concepts
    ]
    if not all(any(row) for row in pairs):
        return False
    return all(any(pairs[i][j] for i in range(len(links1.concepts))) for j in range(len(links2.concepts)))


def labels_related(
    l1: str,
    l2: str,
    pack: BackgroundPack,
    include_hypernyms: bool = False,
    stopwords: frozenset[str] = DEFAULT_STOPWORDS,
) -> bool:
    """Decide whether two labels are related through the pack.

    Labels with equal normalised forms are related regardless of pack
    content, mirroring the string pre-pass of the matcher.
    """
    if normalize_label(l1) == normalize_label(l2):
        return True
    links1 = link_label(l1, pack, stopwords)
    links2 = link_label(l2, pack, stopwords)
    if links1 is None or links2 is None:
        return False
    return links_related(links1, links2, pack, include_hypernyms)
