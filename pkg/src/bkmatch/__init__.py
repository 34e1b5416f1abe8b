"""bkmatch: schema/ontology matching with pluggable background knowledge.

Labels are linked to concepts of a background pack, pack relations (and
optionally concept embeddings) decide candidate pairs, and a maximum
weight one-to-one extraction produces the final alignment. Evaluation
helpers cover precision/recall/F1, paired significance testing, and
factor-impact summaries.
"""

from bkmatch.embeddings import EmbeddingStore, WalkConfig, cosine, embedding_match, generate_walks, load_vectors
from bkmatch.evaluation import (
    AggregateMode,
    ConfusionCounts,
    ContingencyCounts,
    ImpactReport,
    SignificanceResult,
    aggregate,
    confusion,
    impact,
    mcnemar_counts,
    mcnemar_test,
    prf,
    significance_matrix,
)
from bkmatch.ingest import BUILTIN_PROFILES, PredicateProfile, build_pack, extract_ontology
from bkmatch.matcher import (
    CandidateGrid,
    MatchStats,
    collect_candidates,
    hungarian_extract,
    run_match,
    string_match,
)
from bkmatch.model import (
    Alignment,
    Correspondence,
    Entity,
    MatcherConfig,
    Ontology,
    Provenance,
    Relation,
    Strategy,
    validate_alignment,
)
from bkmatch.ntriples import Literal, Triple, parse_ntriples
from bkmatch.pack import (
    BackgroundPack,
    LinkResult,
    LinkTier,
    is_hypernym,
    is_synonymous,
    labels_related,
    link_label,
    load_pack,
    save_pack,
)
from bkmatch.text import normalize_label, tokenize_label

__version__ = "0.1.0"

__all__ = [
    "AggregateMode",
    "Alignment",
    "BackgroundPack",
    "BUILTIN_PROFILES",
    "CandidateGrid",
    "ConfusionCounts",
    "ContingencyCounts",
    "Correspondence",
    "EmbeddingStore",
    "Entity",
    "ImpactReport",
    "LinkResult",
    "LinkTier",
    "Literal",
    "MatchStats",
    "MatcherConfig",
    "Ontology",
    "PredicateProfile",
    "Provenance",
    "Relation",
    "SignificanceResult",
    "Strategy",
    "Triple",
    "WalkConfig",
    "aggregate",
    "build_pack",
    "collect_candidates",
    "confusion",
    "cosine",
    "embedding_match",
    "extract_ontology",
    "generate_walks",
    "hungarian_extract",
    "impact",
    "is_hypernym",
    "is_synonymous",
    "labels_related",
    "link_label",
    "load_pack",
    "load_vectors",
    "mcnemar_counts",
    "mcnemar_test",
    "normalize_label",
    "parse_ntriples",
    "prf",
    "run_match",
    "save_pack",
    "significance_matrix",
    "string_match",
    "tokenize_label",
    "validate_alignment",
]
