"""Concept vectors: loading, cosine matching, and walk-corpus generation.

Vector files use the plain word2vec text layout (`count dim` header, one
`token v1 .. v_dim` row per concept). Walk generation produces the
training corpus for such vectors: random node/edge token sequences with
a per-node seeded stream, so output is stable under any scheduling.
"""

from __future__ import annotations

import hashlib
import logging
import random
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable, Iterator, Union

import numpy as np

from bkmatch.errors import DataError
from bkmatch.ntriples import Triple
from bkmatch.pack import LinkResult

log = logging.getLogger(__name__)

_zero_vector_warnings = 0


def zero_vector_warning_count() -> int:
    return _zero_vector_warnings


def reset_zero_vector_warnings() -> None:
    global _zero_vector_warnings
    _zero_vector_warnings = 0


class EmbeddingStore:
    """Concept ID to vector map with a fixed dimension."""

    def __init__(self, dimension: int, vectors: dict[str, np.ndarray] | None = None):
        if dimension <= 0:
            raise ValueError("dimension must be positive")
        self.dimension = dimension
        self._vectors: dict[str, np.ndarray] = {}
        for token, vector in (vectors or {}).items():
            self.put(token, vector)

    def put(self, token: str, vector: Iterable[float]) -> None:
        array = np.asarray(vector, dtype=np.float64)
        if array.shape != (self.dimension,):
            raise ValueError(f"vector for {token!r} has shape {array.shape}")
        if not np.all(np.isfinite(array)):
            raise ValueError(f"vector for {token!r} has non-finite components")
        self._vectors[token] = array

    def get(self, token: str) -> np.ndarray | None:
        return self._vectors.get(token)

    def __contains__(self, token: str) -> bool:
        return token in self._vectors

    def __len__(self) -> int:
        return len(self._vectors)


def load_vectors(source: Union[str, Path, IO[str]]) -> EmbeddingStore:
    """Read a word2vec-style text file into an EmbeddingStore.

    Duplicate tokens, width mismatches, non-numeric or non-finite
    components, and header/row-count mismatches are fatal, reported with
    their line number.
    """
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8") as handle:
            return _load_vector_lines(handle, str(source))
    return _load_vector_lines(source, getattr(source, "name", "<stream>"))


def _load_vector_lines(lines: Iterable[str], origin: str) -> EmbeddingStore:
    iterator = iter(enumerate(lines, start=1))
    try:
        _, header = next(iterator)
    except StopIteration:
        raise DataError(f"{origin}: empty vector file") from None
    parts = header.split()
    if len(parts) != 2:
        raise DataError(f"{origin}, line 1: header must be 'count dim'")
    try:
        count, dim = int(parts[0]), int(parts[1])
    except ValueError:
        raise DataError(f"{origin}, line 1: header must be 'count dim'") from None
    if count < 0 or dim <= 0:
        raise DataError(f"{origin}, line 1: invalid header values")
    store = EmbeddingStore(dim)
    rows = 0
    for lineno, line in iterator:
        line = line.rstrip("\n")
        if not line:
            continue
        fields = line.split(" ")
        fields = [f for f in fields if f]
        if len(fields) != dim + 1:
            raise DataError(
                f"{origin}, line {lineno}: expected {dim + 1} fields, found {len(fields)}"
            )
        token = fields[0]
        if token in store:
            raise DataError(f"{origin}, line {lineno}: duplicate token {token!r}")
        try:
            values = [float(f) for f in fields[1:]]
        except ValueError:
            raise DataError(f"{origin}, line {lineno}: non-numeric component") from None
        try:
            store.put(token, values)
        except ValueError as exc:
            raise DataError(f"{origin}, line {lineno}: {exc}") from None
        rows += 1
    if rows != count:
        raise DataError(f"{origin}: header announced {count} rows, found {rows}")
    return store


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    """Cosine similarity; zero vectors yield 0.0 and bump a warning counter."""
    global _zero_vector_warnings
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        _zero_vector_warnings += 1
        log.warning("cosine of a zero vector requested; returning 0.0")
        return 0.0
    value = float(np.dot(u, v) / (nu * nv))
    return max(-1.0, min(1.0, value))


def coverage_similarity(
    links1: LinkResult, links2: LinkResult, store: EmbeddingStore
) -> float:
    """Bottleneck similarity between two link results.

    Each sub-span's best partner similarity is computed on both sides;
    the minimum over all sub-spans is returned, so a threshold check on
    the result enforces that every sub-span is covered. Spans with no
    stored vector give -inf.
    """
    best1 = [-np.inf] * len(links1.concepts)
    best2 = [-np.inf] * len(links2.concepts)
    for i, span1 in enumerate(links1.concepts):
        vectors1 = [store.get(c) for c in span1]
        vectors1 = [v for v in vectors1 if v is not None]
        for j, span2 in enumerate(links2.concepts):
            pair_best = -np.inf
            for u in vectors1:
                for concept in span2:
                    v = store.get(concept)
                    if v is None:
                        continue
                    pair_best = max(pair_best, cosine(u, v))
            best1[i] = max(best1[i], pair_best)
            best2[j] = max(best2[j], pair_best)
    return float(min(min(best1), min(best2)))


def embedding_match(
    links1: LinkResult, links2: LinkResult, store: EmbeddingStore, threshold: float
) -> bool:
    """True iff every sub-span pairs above the threshold (strictly)."""
    return coverage_similarity(links1, links2, store) > threshold


@dataclass(frozen=True)
class WalkConfig:
    walks_per_node: int = 500
    depth: int = 4
    seed: int = 0

    def __post_init__(self) -> None:
        if self.walks_per_node <= 0:
            raise ValueError("walks_per_node must be positive")
        if self.depth <= 0:
            raise ValueError("depth must be positive")


@dataclass
class WalkStats:
    nodes_walked: int = 0
    nodes_without_edges: int = 0
    walks_emitted: int = 0


def _node_seed(seed: int, node: str) -> int:
    digest = hashlib.blake2b(node.encode("utf-8"), digest_size=8).digest()
    return seed ^ int.from_bytes(digest, "big")


def generate_walks(
    triples: Iterable[Triple],
    nodes_of_interest: Iterable[str],
    config: WalkConfig = WalkConfig(),
    stats: WalkStats | None = None,
) -> Iterator[str]:
    """Yield random-walk token lines for each node of interest.

    A walk alternates node and edge tokens, starts at the node, and takes
    up to `depth` hops, stopping early at sinks. Literal objects are not
    walkable and are skipped when building the graph. Each node draws
    from its own stream seeded by `seed XOR hash(node)`, so the corpus
    does not depend on node scheduling. Nodes without outgoing edges
    produce no walks and are counted.
    """
    stats = stats if stats is not None else WalkStats()
    adjacency: dict[str, list[tuple[str, str]]] = {}
    for triple in triples:
        if not isinstance(triple.object, str):
            continue
        adjacency.setdefault(triple.subject, []).append((triple.predicate, triple.object))
    for node in adjacency:
        adjacency[node] = sorted(set(adjacency[node]))

    for node in sorted(set(nodes_of_interest)):
        outgoing = adjacency.get(node)
        if not outgoing:
            stats.nodes_without_edges += 1
            continue
        stats.nodes_walked += 1
        rng = random.Random(_node_seed(config.seed, node))
        for _ in range(config.walks_per_node):
            tokens = [node]
            current = node
            hops = adjacency.get(current)
            for _ in range(config.depth):
                if not hops:
                    break
                predicate, nxt = hops[rng.randrange(len(hops))]
                tokens.append(predicate)
                tokens.append(nxt)
                current = nxt
                hops = adjacency.get(current)
            stats.walks_emitted += 1
            yield " ".join(tokens)


def write_walks(walks: Iterable[str], path: Union[str, Path]) -> int:
    """Write one walk per line; returns the number of lines."""
    count = 0
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for walk in walks:
            handle.write(walk + "\n")
            count += 1
    return count
