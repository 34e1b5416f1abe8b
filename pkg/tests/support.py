"""Shared builders for tests: tiny packs, random ontologies, brute-force oracles."""

from __future__ import annotations

import random

from bkmatch.model import Entity, Ontology
from bkmatch.pack import BackgroundPack, LinkResult, LinkTier

WORDS = ["alpha", "beta", "gamma", "delta", "epsilon", "zeta", "eta", "theta", "iota", "kappa"]


def make_pack(surfaces, synonyms=(), hypernyms=(), mutual=False, name="test"):
    return BackgroundPack.from_edges(name, surfaces, synonyms, hypernyms, mutual)


def span_links(*concept_sets, tier=None):
    """LinkResult over literal concept sets; tier defaults to the natural one."""
    spans = tuple(frozenset(s) for s in concept_sets)
    if tier is None:
        tier = LinkTier.FULL_LABEL if len(spans) == 1 else LinkTier.LONGEST_TOKEN
    return LinkResult(spans, tier)


def random_pack(rng: random.Random, name="rnd") -> BackgroundPack:
    concepts = [f"c:{i}" for i in range(rng.randint(6, 14))]
    surfaces = {}
    for word in rng.sample(WORDS, rng.randint(4, len(WORDS))):
        surfaces[word] = set(rng.sample(concepts, rng.randint(1, 2)))
    for _ in range(rng.randint(0, 3)):
        surfaces[" ".join(rng.sample(WORDS, 2))] = set(rng.sample(concepts, 1))
    synonyms = {tuple(rng.sample(concepts, 2)) for _ in range(rng.randint(0, 8))}
    hypernyms = {tuple(rng.sample(concepts, 2)) for _ in range(rng.randint(0, 8))}
    return BackgroundPack.from_edges(
        name, surfaces, synonyms, hypernyms, mutual_hypernymy_synonymy=rng.random() < 0.3
    )


def random_ontology(rng: random.Random, ontology_id: str, prefix: str) -> Ontology:
    entities = []
    for i in range(rng.randint(3, 7)):
        labels = []
        for _ in range(rng.randint(1, 2)):
            length = rng.randint(1, 3)
            labels.append(" ".join(rng.choice(WORDS) for _ in range(length)))
        entities.append(Entity(f"http://{prefix}.example/e{i}", tuple(dict.fromkeys(labels))))
    return Ontology(ontology_id, entities)


def oracle_max_assignment_total(weights) -> float:
    """Best injection total by forward dynamic programming over column masks.

    Totals accumulate in ascending row order, matching how tests sum an
    extracted assignment, so equal selections give bit-identical floats.
    Zero-weight cells are never selectable.
    """
    n, m = weights.shape
    layer = {0: 0.0}
    for row in range(n):
        nxt: dict[int, float] = {}
        for mask, total in layer.items():
            if nxt.get(mask, -1.0) < total:
                nxt[mask] = total
            for j in range(m):
                if not mask >> j & 1 and weights[row, j] > 0.0:
                    candidate = total + weights[row, j]
                    key = mask | 1 << j
                    if nxt.get(key, -1.0) < candidate:
                        nxt[key] = candidate
        layer = nxt
    return max(layer.values()) if layer else 0.0
