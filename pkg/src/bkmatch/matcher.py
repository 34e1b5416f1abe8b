"""The matching pipeline: string pre-pass, linking, evidence scan, extraction.

Pairs whose labels normalise to the same string are accepted outright and
removed from the pools. Every remaining cross pair is scored against the
configured evidence (pack predicates and/or embedding similarity); scores
land in a candidate grid from which a maximum-weight one-to-one alignment
is extracted.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from bkmatch.assignment import max_weight_assignment
from bkmatch.embeddings import EmbeddingStore, coverage_similarity
from bkmatch.errors import ConfigurationError
from bkmatch.model import (
    Alignment,
    Correspondence,
    MatcherConfig,
    Ontology,
    Provenance,
    Relation,
    Strategy,
)
from bkmatch.pack import BackgroundPack, LinkResult, LinkStats, LinkTier, link_label, links_related
from bkmatch.text import normalize_label

# floor for embedding-derived weights so candidacy survives in a [0, 1] grid
# even when a permissive threshold lets non-positive similarities through
MIN_CANDIDATE_WEIGHT = 1e-9

TIER_PROVENANCE = {
    LinkTier.FULL_LABEL: Provenance.FULL_LABEL,
    LinkTier.LONGEST_TOKEN: Provenance.LONGEST_TOKEN,
    LinkTier.TOKEN: Provenance.TOKEN,
}

# grid tier codes; 0 means "no provenance recorded"
PROVENANCE_CODES: dict[Provenance, int] = {
    Provenance.STRING: 1,
    Provenance.FULL_LABEL: 2,
    Provenance.LONGEST_TOKEN: 3,
    Provenance.TOKEN: 4,
    Provenance.EMBEDDING: 5,
}
CODE_PROVENANCE = {code: prov for prov, code in PROVENANCE_CODES.items()}


@dataclass
class MatchStats:
    pairs_scanned: int = 0
    string_pairs: int = 0
    string_matches: int = 0
    candidate_pairs: int = 0
    extracted: int = 0
    link_stats: dict[str, LinkStats] = field(default_factory=dict)


@dataclass(frozen=True)
class CandidateGrid:
    """Dense weight matrix over ordered source and target IRIs."""

    sources: tuple[str, ...]
    targets: tuple[str, ...]
    weights: np.ndarray
    tiers: np.ndarray | None = None

    def __post_init__(self) -> None:
        expected = (len(self.sources), len(self.targets))
        if self.weights.shape != expected:
            raise ValueError(f"weights shape {self.weights.shape} != {expected}")
        if self.weights.size and (
            not np.all(np.isfinite(self.weights))
            or np.any(self.weights < 0.0)
            or np.any(self.weights > 1.0)
        ):
            raise ValueError("grid weights must be finite and lie in [0, 1]")
        if self.tiers is not None and self.tiers.shape != expected:
            raise ValueError("tier matrix shape mismatch")


def string_match(source: Ontology, target: Ontology) -> Alignment:
    """All cross pairs sharing at least one identical normalised label."""
    by_label: dict[str, list[str]] = {}
    for entity in target:
        for label in entity.labels:
            by_label.setdefault(normalize_label(label), []).append(entity.iri)
    alignment = Alignment()
    for entity in source:
        seen: set[str] = set()
        for label in entity.labels:
            for target_iri in by_label.get(normalize_label(label), ()):
                if target_iri not in seen:
                    seen.add(target_iri)
                    alignment.add(
                        Correspondence(
                            entity.iri,
                            target_iri,
                            Relation.EQUIVALENCE,
                            1.0,
                            Provenance.STRING,
                        )
                    )
    return alignment


def _evidence_members(config: MatcherConfig) -> tuple[Strategy, ...]:
    if config.strategy is Strategy.COMBINATION:
        return config.combination_strategies
    return (config.strategy,)


def _check_resources(
    packs: Sequence[BackgroundPack],
    stores: Sequence[EmbeddingStore | None],
    members: tuple[Strategy, ...],
) -> None:
    if not packs:
        raise ConfigurationError("at least one background pack is required")
    if len(stores) != len(packs):
        raise ConfigurationError("stores must parallel packs (use None for packs without vectors)")
    if Strategy.EMBEDDING in members:
        for pack, store in zip(packs, stores):
            if store is None:
                raise ConfigurationError(
                    f"embedding evidence requested but pack {pack.name} has no vector store"
                )


def _entity_links(
    ontology: Ontology,
    packs: Sequence[BackgroundPack],
    config: MatcherConfig,
    stats: MatchStats,
) -> dict[str, list[list[LinkResult | None]]]:
    """Per entity, per pack, one link result per label (None when unlinked)."""
    links: dict[str, list[list[LinkResult | None]]] = {}
    for entity in ontology:
        per_pack: list[list[LinkResult | None]] = []
        for pack in packs:
            pack_stats = stats.link_stats.setdefault(pack.name, LinkStats())
            per_pack.append(
                [link_label(label, pack, config.stopwords, pack_stats) for label in entity.labels]
            )
        links[entity.iri] = per_pack
    return links


def _pair_evidence(
    links1: list[list[LinkResult | None]],
    links2: list[list[LinkResult | None]],
    packs: Sequence[BackgroundPack],
    stores: Sequence[EmbeddingStore | None],
    members: tuple[Strategy, ...],
    config: MatcherConfig,
) -> tuple[float, Provenance] | None:
    best: tuple[float, Provenance] | None = None
    for pack_idx, pack in enumerate(packs):
        for left in links1[pack_idx]:
            if left is None:
                continue
            for right in links2[pack_idx]:
                if right is None:
                    continue
                for member in members:
                    if member is Strategy.EMBEDDING:
                        store = stores[pack_idx]
                        if store is None:
                            continue
                        value = coverage_similarity(left, right, store)
                        if not value > config.embedding_threshold:
                            continue
                        found = (
                            min(1.0, max(value, MIN_CANDIDATE_WEIGHT)),
                            Provenance.EMBEDDING,
                        )
                    else:
                        include_hyp = member is Strategy.SYNONYMY_HYPERNYMY
                        if not links_related(left, right, pack, include_hyp):
                            continue
                        w_left = config.tier_confidences[TIER_PROVENANCE[left.tier]]
                        w_right = config.tier_confidences[TIER_PROVENANCE[right.tier]]
                        if w_left <= w_right:
                            found = (w_left, TIER_PROVENANCE[left.tier])
                        else:
                            found = (w_right, TIER_PROVENANCE[right.tier])
                    if best is None or found[0] > best[0]:
                        best = found
    return best


def collect_candidates(
    source: Ontology,
    target: Ontology,
    packs: Sequence[BackgroundPack],
    stores: Sequence[EmbeddingStore | None] | None = None,
    config: MatcherConfig = MatcherConfig(),
    *,
    exclude_sources: frozenset[str] = frozenset(),
    exclude_targets: frozenset[str] = frozenset(),
    threads: int = 1,
    stats: MatchStats | None = None,
) -> dict[tuple[str, str], tuple[float, Provenance]]:
    """Score every considered cross pair; returns pair -> (weight, provenance)."""
    stats = stats if stats is not None else MatchStats()
    stores = list(stores) if stores is not None else [None] * len(packs)
    members = _evidence_members(config)
    _check_resources(packs, stores, members)

    source_iris = sorted(e.iri for e in source if e.iri not in exclude_sources)
    target_iris = sorted(e.iri for e in target if e.iri not in exclude_targets)
    source_links = _entity_links(source, packs, config, stats)
    target_links = _entity_links(target, packs, config, stats)

    def scan_row(source_iri: str) -> list[tuple[tuple[str, str], tuple[float, Provenance]]]:
        row = []
        links1 = source_links[source_iri]
        for target_iri in target_iris:
            evidence = _pair_evidence(
                links1, target_links[target_iri], packs, stores, members, config
            )
            if evidence is not None:
                row.append(((source_iri, target_iri), evidence))
        return row

    candidates: dict[tuple[str, str], tuple[float, Provenance]] = {}
    stats.pairs_scanned += len(source_iris) * len(target_iris)
    if threads > 1 and len(source_iris) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(scan_row, source_iris))
    else:
        rows = [scan_row(iri) for iri in source_iris]
    for row in rows:
        for pair, evidence in row:
            candidates[pair] = evidence
    stats.candidate_pairs += len(candidates)
    return candidates


def build_grid(
    candidates: Mapping[tuple[str, str], tuple[float, Provenance]],
    sources: Sequence[str],
    targets: Sequence[str],
) -> CandidateGrid:
    sources = tuple(sorted(sources))
    targets = tuple(sorted(targets))
    weights = np.zeros((len(sources), len(targets)), dtype=np.float64)
    tiers = np.zeros((len(sources), len(targets)), dtype=np.uint8)
    source_pos = {iri: i for i, iri in enumerate(sources)}
    target_pos = {iri: j for j, iri in enumerate(targets)}
    for (source_iri, target_iri), (weight, provenance) in candidates.items():
        i = source_pos[source_iri]
        j = target_pos[target_iri]
        weights[i, j] = weight
        tiers[i, j] = PROVENANCE_CODES[provenance]
    return CandidateGrid(sources, targets, weights, tiers)


def _lexicographic_sweep(
    pairs: list[tuple[int, int]],
    weights: np.ndarray,
    max_rounds: int = 8,
    size_limit: int = 1500,
) -> list[tuple[int, int]]:
    """Canonicalise equal-weight optima toward lexicographically small pairs.

    Bounded local moves only: shift a row to a smaller free column of
    identical weight, or swap the columns of two rows when the exchanged
    total is exactly preserved. Gated by size to keep extraction O(n^3).
    """
    pairs = sorted(pairs)
    if len(pairs) <= 1 or len(pairs) > size_limit:
        return pairs
    for _ in range(max_rounds):
        changed = False
        used = {j for _, j in pairs}
        for idx, (i, j) in enumerate(pairs):
            w = weights[i, j]
            for j2 in range(j):
                if j2 in used or weights[i, j2] != w:
                    continue
                pairs[idx] = (i, j2)
                used.discard(j)
                used.add(j2)
                changed = True
                break
        for a in range(len(pairs)):
            ia, ja = pairs[a]
            for b in range(a + 1, len(pairs)):
                ib, jb = pairs[b]
                if (
                    jb < ja
                    and weights[ia, jb] > 0.0
                    and weights[ib, ja] > 0.0
                    and weights[ia, jb] + weights[ib, ja] == weights[ia, ja] + weights[ib, jb]
                ):
                    pairs[a] = (ia, jb)
                    pairs[b] = (ib, ja)
                    ja = jb
                    changed = True
        if not changed:
            break
    return sorted(pairs)


def hungarian_extract(grid: CandidateGrid) -> Alignment:
    """Maximum-weight one-to-one alignment from a candidate grid."""
    pairs = max_weight_assignment(grid.weights)
    pairs = _lexicographic_sweep(pairs, grid.weights)
    cells = []
    for i, j in pairs:
        if grid.tiers is not None and int(grid.tiers[i, j]) in CODE_PROVENANCE:
            provenance = CODE_PROVENANCE[int(grid.tiers[i, j])]
        else:
            provenance = Provenance.EXTERNAL
        cells.append(
            Correspondence(
                grid.sources[i],
                grid.targets[j],
                Relation.EQUIVALENCE,
                float(grid.weights[i, j]),
                provenance,
            )
        )
    return Alignment(cells)


def _resolve_string_matches(raw: Alignment, stats: MatchStats) -> Alignment:
    """Reduce the string pre-pass to a one-to-one alignment.

    String pairs are fixed before the evidence scan, so duplicate-label
    collisions are resolved here by maximum cardinality with the usual
    lexicographic preference.
    """
    stats.string_pairs = len(raw)
    if not raw:
        return raw
    sources = sorted({c.source for c in raw})
    targets = sorted({c.target for c in raw})
    if len(raw) == len(sources) == len(targets):
        resolved = raw
    else:
        candidates = {(c.source, c.target): (1.0, Provenance.STRING) for c in raw}
        resolved = hungarian_extract(build_grid(candidates, sources, targets))
    stats.string_matches = len(resolved)
    return resolved


def run_match(
    source: Ontology,
    target: Ontology,
    packs: Sequence[BackgroundPack],
    stores: Sequence[EmbeddingStore | None] | None = None,
    config: MatcherConfig = MatcherConfig(),
    threads: int = 1,
    stats: MatchStats | None = None,
) -> Alignment:
    """Full pipeline; the result is always one-to-one."""
    stats = stats if stats is not None else MatchStats()
    stores = list(stores) if stores is not None else [None] * len(packs)
    _check_resources(packs, stores, _evidence_members(config))

    fixed = _resolve_string_matches(string_match(source, target), stats)
    consumed_sources = frozenset(c.source for c in fixed)
    consumed_targets = frozenset(c.target for c in fixed)

    candidates = collect_candidates(
        source,
        target,
        packs,
        stores,
        config,
        exclude_sources=consumed_sources,
        exclude_targets=consumed_targets,
        threads=threads,
        stats=stats,
    )
    remaining_sources = [e.iri for e in source if e.iri not in consumed_sources]
    remaining_targets = [e.iri for e in target if e.iri not in consumed_targets]
    extracted = hungarian_extract(build_grid(candidates, remaining_sources, remaining_targets))
    stats.extracted = len(extracted)
    return fixed.union(extracted)
