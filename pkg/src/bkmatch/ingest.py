"""Harvesting ontologies and background packs from triple streams.

A PredicateProfile names which predicates carry labels, synonymy, and
hypernymy in a given dump. The built-in profiles cover the usual public
knowledge graphs; custom profiles are just frozen instances.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from typing import Iterable

from bkmatch.errors import ConfigurationError
from bkmatch.model import Entity, Ontology
from bkmatch.ntriples import Literal, Triple, is_blank
from bkmatch.pack import BackgroundPack
from bkmatch.text import iri_local_name, normalize_label

log = logging.getLogger(__name__)

RDFS_LABEL = "http://www.w3.org/2000/01/rdf-schema#label"
SKOS_ALT_LABEL = "http://www.w3.org/2004/02/skos/core#altLabel"
SKOS_BROADER = "http://www.w3.org/2004/02/skos/core#broader"
FOAF_NAME = "http://xmlns.com/foaf/0.1/name"
RDF_TYPE = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type"

_ABSOLUTE_IRI = re.compile(r"^[A-Za-z][A-Za-z0-9+.\-]*:")


@dataclass(frozen=True)
class PredicateProfile:
    """Predicate lists used to interpret a triple dump."""

    name: str
    label_predicates: frozenset[str]
    synonym_predicates: frozenset[str] = frozenset()
    hypernym_predicates: frozenset[str] = frozenset()
    mutual_hypernymy_synonymy: bool = False

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("profile name must be non-empty")
        if not self.label_predicates:
            raise ValueError("a profile needs at least one label predicate")
        for group in (self.label_predicates, self.synonym_predicates, self.hypernym_predicates):
            if not isinstance(group, frozenset):
                raise TypeError("predicate lists must be frozensets")
            for iri in group:
                if not _ABSOLUTE_IRI.match(iri):
                    raise ValueError(f"predicate {iri!r} is not an absolute IRI")


BUILTIN_PROFILES: dict[str, PredicateProfile] = {
    "wordnet-style": PredicateProfile(
        name="wordnet-style",
        label_predicates=frozenset({RDFS_LABEL}),
        hypernym_predicates=frozenset({"http://wordnet-rdf.princeton.edu/ontology#hypernym"}),
    ),
    "wikidata-style": PredicateProfile(
        name="wikidata-style",
        label_predicates=frozenset({RDFS_LABEL, SKOS_ALT_LABEL}),
        hypernym_predicates=frozenset(
            {
                "http://www.wikidata.org/prop/direct/P31",
                "http://www.wikidata.org/prop/direct/P279",
            }
        ),
    ),
    "dbpedia-style": PredicateProfile(
        name="dbpedia-style",
        label_predicates=frozenset(
            {
                RDFS_LABEL,
                FOAF_NAME,
                "http://dbpedia.org/ontology/alias",
                "http://dbpedia.org/property/name",
                "http://dbpedia.org/property/otherNames",
            }
        ),
        hypernym_predicates=frozenset({RDF_TYPE, "http://dbpedia.org/ontology/type"}),
    ),
    "webisalod-style": PredicateProfile(
        name="webisalod-style",
        label_predicates=frozenset({RDFS_LABEL}),
        hypernym_predicates=frozenset({SKOS_BROADER}),
        mutual_hypernymy_synonymy=True,
    ),
}


def get_profile(name: str) -> PredicateProfile:
    try:
        return BUILTIN_PROFILES[name]
    except KeyError:
        known = ", ".join(sorted(BUILTIN_PROFILES))
        raise ConfigurationError(f"unknown profile {name!r} (built-ins: {known})") from None


def keep_label(literal: Literal) -> bool:
    """English filter: keep untagged literals and tags starting with 'en'."""
    return literal.lang is None or literal.lang.lower().startswith("en")


@dataclass
class IngestStats:
    subjects_seen: int = 0
    blank_subjects_skipped: int = 0
    labels_kept: int = 0
    labels_filtered: int = 0
    fallback_labels: int = 0


def extract_ontology(
    triples: Iterable[Triple],
    profile: PredicateProfile,
    ontology_id: str = "ontology",
    stats: IngestStats | None = None,
) -> Ontology:
    """Collect every IRI subject as an entity with its English labels.

    Subjects without a usable label fall back to the IRI local name, so
    every entity stays matchable. Blank-node subjects are skipped.
    """
    stats = stats if stats is not None else IngestStats()
    labels: dict[str, list[str]] = {}
    for triple in triples:
        if is_blank(triple.subject):
            stats.blank_subjects_skipped += 1
            continue
        if triple.subject not in labels:
            labels[triple.subject] = []
            stats.subjects_seen += 1
        if triple.predicate in profile.label_predicates and isinstance(triple.object, Literal):
            if keep_label(triple.object):
                if triple.object.value not in labels[triple.subject]:
                    labels[triple.subject].append(triple.object.value)
                    stats.labels_kept += 1
            else:
                stats.labels_filtered += 1
    entities = []
    for iri, found in labels.items():
        if not found:
            found = [iri_local_name(iri)]
            stats.fallback_labels += 1
        entities.append(Entity(iri, tuple(found)))
    return Ontology(ontology_id, entities)


def build_pack(
    triples: Iterable[Triple],
    profile: PredicateProfile,
    *,
    name: str | None = None,
    mutual_hypernymy_synonymy: bool | None = None,
    stats: IngestStats | None = None,
) -> BackgroundPack:
    """Distil a triple stream into a background pack.

    Surface forms come from label predicates (normalised); synonymy from
    synonym predicates plus shared surface forms; hypernymy from hypernym
    predicates. Only IRI-to-IRI edges are kept.
    """
    stats = stats if stats is not None else IngestStats()
    surface_index: dict[str, set[str]] = {}
    synonym_edges: set[tuple[str, str]] = set()
    hypernym_edges: set[tuple[str, str]] = set()
    for triple in triples:
        if is_blank(triple.subject):
            stats.blank_subjects_skipped += 1
            continue
        if triple.predicate in profile.label_predicates and isinstance(triple.object, Literal):
            if not keep_label(triple.object):
                stats.labels_filtered += 1
                continue
            surface = normalize_label(triple.object.value)
            if surface:
                surface_index.setdefault(surface, set()).add(triple.subject)
                stats.labels_kept += 1
        elif triple.predicate in profile.synonym_predicates:
            if isinstance(triple.object, str) and not is_blank(triple.object):
                synonym_edges.add((triple.subject, triple.object))
        elif triple.predicate in profile.hypernym_predicates:
            if isinstance(triple.object, str) and not is_blank(triple.object):
                hypernym_edges.add((triple.subject, triple.object))
    # distinct concepts sharing a surface form are synonyms of each other
    for concepts in surface_index.values():
        if len(concepts) > 1:
            ordered = sorted(concepts)
            for i, a in enumerate(ordered):
                for b in ordered[i + 1 :]:
                    synonym_edges.add((a, b))
    mutual = (
        profile.mutual_hypernymy_synonymy
        if mutual_hypernymy_synonymy is None
        else mutual_hypernymy_synonymy
    )
    return BackgroundPack.from_edges(
        name or profile.name,
        surface_index,
        synonym_edges,
        hypernym_edges,
        mutual,
    )
