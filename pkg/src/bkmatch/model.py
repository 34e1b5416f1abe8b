"""Core domain types: entities, ontologies, correspondences, alignments.

An Alignment behaves like a set of correspondences keyed by
(source, target, relation); confidence and provenance ride along as
annotations and never participate in identity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator, Mapping

from bkmatch.text import DEFAULT_STOPWORDS


class Relation(Enum):
    EQUIVALENCE = "="


class Provenance(Enum):
    STRING = "string"
    FULL_LABEL = "full-label"
    LONGEST_TOKEN = "longest-token"
    TOKEN = "token"
    EMBEDDING = "embedding"
    EXTERNAL = "external"


class Strategy(Enum):
    SYNONYMY = "synonymy"
    SYNONYMY_HYPERNYMY = "synonymy-hypernymy"
    EMBEDDING = "embedding"
    COMBINATION = "combination"


@dataclass(frozen=True)
class Entity:
    """A matchable element of an ontology: an IRI plus its surface labels."""

    iri: str
    labels: tuple[str, ...]

    def __post_init__(self) -> None:
        if not isinstance(self.labels, tuple):
            object.__setattr__(self, "labels", tuple(self.labels))
        if not self.iri:
            raise ValueError("entity IRI must be non-empty")
        if not self.labels:
            raise ValueError(f"entity {self.iri} needs at least one label")
        for label in self.labels:
            if not label.strip():
                raise ValueError(f"entity {self.iri} has a blank label")


class Ontology:
    """An identified collection of entities with unique IRIs."""

    def __init__(self, ontology_id: str, entities: Iterable[Entity] = ()):
        if not ontology_id:
            raise ValueError("ontology id must be non-empty")
        self.id = ontology_id
        self._by_iri: dict[str, Entity] = {}
        for entity in entities:
            if entity.iri in self._by_iri:
                raise ValueError(f"duplicate entity IRI: {entity.iri}")
            self._by_iri[entity.iri] = entity

    def entity(self, iri: str) -> Entity:
        return self._by_iri[iri]

    def __contains__(self, iri: str) -> bool:
        return iri in self._by_iri

    def __iter__(self) -> Iterator[Entity]:
        return iter(self._by_iri.values())

    def __len__(self) -> int:
        return len(self._by_iri)

    def __repr__(self) -> str:
        return f"Ontology({self.id!r}, {len(self)} entities)"


Key = tuple[str, str, Relation]


@dataclass(frozen=True, eq=False)
class Correspondence:
    """A single alignment cell.

    Equality and hashing use only (source, target, relation) so that set
    operations over alignments compare cells, not annotations.
    """

    source: str
    target: str
    relation: Relation = Relation.EQUIVALENCE
    confidence: float = 1.0
    provenance: Provenance = Provenance.EXTERNAL

    def __post_init__(self) -> None:
        if not self.source or not self.target:
            raise ValueError("correspondence endpoints must be non-empty IRIs")
        if not (isinstance(self.confidence, (int, float)) and math.isfinite(self.confidence)):
            raise ValueError("confidence must be a finite number")
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"confidence {self.confidence} outside [0, 1]")

    @property
    def key(self) -> Key:
        return (self.source, self.target, self.relation)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Correspondence):
            return NotImplemented
        return self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)


class Alignment:
    """A set of correspondences with unique keys.

    Adding a duplicate key keeps the higher-confidence cell, which makes
    construction order-independent.
    """

    def __init__(self, correspondences: Iterable[Correspondence] = ()):
        self._cells: dict[Key, Correspondence] = {}
        for cell in correspondences:
            self.add(cell)

    def add(self, cell: Correspondence) -> None:
        existing = self._cells.get(cell.key)
        if existing is None or cell.confidence > existing.confidence:
            self._cells[cell.key] = cell

    def get(self, source: str, target: str, relation: Relation = Relation.EQUIVALENCE) -> Correspondence | None:
        return self._cells.get((source, target, relation))

    def keys(self) -> set[Key]:
        return set(self._cells)

    def __contains__(self, item: object) -> bool:
        if isinstance(item, Correspondence):
            return item.key in self._cells
        return item in self._cells

    def __iter__(self) -> Iterator[Correspondence]:
        return iter(self._cells.values())

    def __len__(self) -> int:
        return len(self._cells)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Alignment):
            return NotImplemented
        return self._cells.keys() == other._cells.keys()

    def __repr__(self) -> str:
        return f"Alignment({len(self)} cells)"

    def sorted_cells(self) -> list[Correspondence]:
        return [self._cells[key] for key in sorted(self._cells, key=lambda k: (k[0], k[1], k[2].value))]

    def union(self, other: "Alignment") -> "Alignment":
        merged = Alignment(self)
        for cell in other:
            merged.add(cell)
        return merged

    def intersection(self, other: "Alignment") -> "Alignment":
        return Alignment(cell for cell in self if cell.key in other)

    def difference(self, other: "Alignment") -> "Alignment":
        return Alignment(cell for cell in self if cell.key not in other)

    __or__ = union
    __and__ = intersection
    __sub__ = difference


def validate_alignment(alignment: Alignment, one_to_one: bool = False) -> list[str]:
    """Check alignment invariants; returns human-readable violations.

    Key uniqueness and confidence bounds are enforced constructively, so
    the interesting check is the optional one-to-one multiplicity rule:
    each violating IRI is reported once.
    """
    violations: list[str] = []
    for cell in alignment:
        if not 0.0 <= cell.confidence <= 1.0:
            violations.append(f"confidence outside [0, 1] on ({cell.source}, {cell.target})")
    if one_to_one:
        source_counts: dict[str, int] = {}
        target_counts: dict[str, int] = {}
        for cell in alignment:
            source_counts[cell.source] = source_counts.get(cell.source, 0) + 1
            target_counts[cell.target] = target_counts.get(cell.target, 0) + 1
        for iri in sorted(s for s, n in source_counts.items() if n > 1):
            violations.append(f"source {iri} matched {source_counts[iri]} times")
        for iri in sorted(t for t, n in target_counts.items() if n > 1):
            violations.append(f"target {iri} matched {target_counts[iri]} times")
    return violations


DEFAULT_TIER_CONFIDENCES: Mapping[Provenance, float] = {
    Provenance.STRING: 1.0,
    Provenance.FULL_LABEL: 0.9,
    Provenance.LONGEST_TOKEN: 0.8,
    Provenance.TOKEN: 0.7,
}

_TIER_ORDER = (Provenance.STRING, Provenance.FULL_LABEL, Provenance.LONGEST_TOKEN, Provenance.TOKEN)


@dataclass(frozen=True, eq=False)
class MatcherConfig:
    """Knobs for a matching run.

    combination_strategies lists the evidence kinds unioned across packs
    when strategy is COMBINATION; the default unions synonymy evidence.
    """

    strategy: Strategy = Strategy.SYNONYMY
    embedding_threshold: float = 0.7
    tier_confidences: Mapping[Provenance, float] = field(
        default_factory=lambda: dict(DEFAULT_TIER_CONFIDENCES)
    )
    stopwords: frozenset[str] = DEFAULT_STOPWORDS
    alpha: float = 0.05
    combination_strategies: tuple[Strategy, ...] = (Strategy.SYNONYMY,)

    def __post_init__(self) -> None:
        if not -1.0 <= self.embedding_threshold <= 1.0:
            raise ValueError("embedding_threshold must lie in [-1, 1]")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")
        missing = [tier for tier in _TIER_ORDER if tier not in self.tier_confidences]
        if missing:
            raise ValueError(f"tier_confidences missing {missing}")
        values = [self.tier_confidences[tier] for tier in _TIER_ORDER]
        if any(not 0.0 <= v <= 1.0 for v in values):
            raise ValueError("tier confidences must lie in [0, 1]")
        if not all(a > b for a, b in zip(values, values[1:])):
            raise ValueError("tier confidences must decrease strictly from string to token")
        if not self.combination_strategies:
            raise ValueError("combination_strategies must not be empty")
        if Strategy.COMBINATION in self.combination_strategies:
            raise ValueError("combination_strategies cannot nest COMBINATION")
