from __future__ import annotations

import numpy as np
import pytest

from bkmatch.embeddings import EmbeddingStore
from bkmatch.errors import ConfigurationError
from bkmatch.matcher import (
    CandidateGrid,
    MatchStats,
    build_grid,
    collect_candidates,
    hungarian_extract,
    run_match,
    string_match,
)
from bkmatch.model import (
    Entity,
    MatcherConfig,
    Ontology,
    Provenance,
    Strategy,
    validate_alignment,
)
from support import make_pack


def onto(oid, prefix, *labels_per_entity):
    entities = [
        Entity(f"http://{prefix}/e{i}", labels if isinstance(labels, tuple) else (labels,))
        for i, labels in enumerate(labels_per_entity)
    ]
    return Ontology(oid, entities)


@pytest.fixture()
def pack():
    return make_pack(
        surfaces={
            "person": {"c:person"},
            "individual": {"c:individual"},
            "car": {"c:car"},
            "automobile": {"c:auto"},
            "conference": {"c:conf"},
            "banquet": {"c:banquet"},
            "dinner": {"c:dinner"},
            "meal": {"c:meal"},
        },
        synonyms=[("c:person", "c:individual"), ("c:car", "c:auto"), ("c:banquet", "c:dinner")],
        hypernyms=[("c:dinner", "c:meal")],
    )


class TestStringMatch:
    def test_shared_normalized_labels(self):
        src = onto("s", "s", "ConferenceBanquet", "Other")
        tgt = onto("t", "t", "conference_banquet", "Else")
        result = string_match(src, tgt)
        assert len(result) == 1
        (cell,) = list(result)
        assert cell.source == "http://s/e0"
        assert cell.target == "http://t/e0"
        assert cell.confidence == 1.0
        assert cell.provenance is Provenance.STRING

    def test_any_label_pairing_counts(self):
        src = onto("s", "s", ("Primary", "Alias"))
        tgt = onto("t", "t", ("alias", "unrelated"))
        assert len(string_match(src, tgt)) == 1

    def test_duplicate_labels_give_multiple_pairs(self):
        src = onto("s", "s", "Venue")
        tgt = onto("t", "t", "Venue", "venue")
        assert len(string_match(src, tgt)) == 2


class TestCollectCandidates:
    def test_synonymy_candidates(self, pack):
        src = onto("s", "s", "Person", "Car", "Nonsense")
        tgt = onto("t", "t", "Individual", "Automobile")
        candidates = collect_candidates(src, tgt, [pack])
        keys = set(candidates)
        assert ("http://s/e0", "http://t/e0") in keys
        assert ("http://s/e1", "http://t/e1") in keys
        assert all("e2" not in s for s, _ in keys)
        weight, provenance = candidates[("http://s/e0", "http://t/e0")]
        assert weight == 0.9  # both sides full-label links
        assert provenance is Provenance.FULL_LABEL

    def test_hypernymy_widens(self, pack):
        src = onto("s", "s", "Dinner")
        tgt = onto("t", "t", "Meal")
        syn = collect_candidates(src, tgt, [pack], config=MatcherConfig(strategy=Strategy.SYNONYMY))
        hyp = collect_candidates(
            src, tgt, [pack], config=MatcherConfig(strategy=Strategy.SYNONYMY_HYPERNYMY)
        )
        assert not syn
        assert set(hyp) == {("http://s/e0", "http://t/e0")}

    def test_synonymy_subset_of_synonymy_hypernymy(self, pack):
        src = onto("s", "s", "Person", "Dinner", "Conference Banquet")
        tgt = onto("t", "t", "Individual", "Meal", "Conference Dinner")
        syn = collect_candidates(src, tgt, [pack], config=MatcherConfig(strategy=Strategy.SYNONYMY))
        hyp = collect_candidates(
            src, tgt, [pack], config=MatcherConfig(strategy=Strategy.SYNONYMY_HYPERNYMY)
        )
        assert set(syn) <= set(hyp)

    def test_tier_weight_is_min_of_sides(self, pack):
        # left: full label; right: two-token span
        src = onto("s", "s", "Banquet")
        tgt = onto("t", "t", "Conference Dinner")
        # bidirectional coverage fails ("conference" uncovered), so no pair
        assert not collect_candidates(src, tgt, [pack])
        # with both sides decomposing, weight reflects the weaker tier
        src2 = onto("s", "s", "Conference Banquet")
        candidates = collect_candidates(src2, tgt, [pack])
        ((_, (weight, provenance)),) = list(candidates.items())
        assert weight == 0.8
        assert provenance is Provenance.LONGEST_TOKEN

    def test_multiple_packs_best_wins(self, pack):
        # second pack links both labels at full-label tier via one shared concept
        direct = make_pack(
            surfaces={"banquet": {"c:x"}, "feast": {"c:x"}},
            name="direct",
        )
        src = onto("s", "s", "Banquet")
        tgt = onto("t", "t", "Feast")
        none = collect_candidates(src, tgt, [pack])
        assert not none
        both = collect_candidates(src, tgt, [pack, direct])
        ((_, (weight, _)),) = list(both.items())
        assert weight == 0.9

    def test_combination_unions_members(self, pack):
        # c:dinner has no vector, so (Dinner, Meal) is reachable only through
        # the hypernym edge; (Conference, Meal) only through vector proximity
        store = EmbeddingStore(
            2, {"c:conf": np.array([1.0, 0.0]), "c:meal": np.array([0.9, np.sqrt(1 - 0.81)])}
        )
        src = onto("s", "s", "Dinner", "Conference")
        tgt = onto("t", "t", "Meal")
        config = MatcherConfig(
            strategy=Strategy.COMBINATION,
            combination_strategies=(Strategy.SYNONYMY_HYPERNYMY, Strategy.EMBEDDING),
            embedding_threshold=0.5,
        )
        candidates = collect_candidates(src, tgt, [pack], [store], config)
        keys = set(candidates)
        assert ("http://s/e0", "http://t/e0") in keys  # hypernymy evidence only
        assert ("http://s/e1", "http://t/e0") in keys  # embedding evidence only
        hyp_only = set(
            collect_candidates(
                src, tgt, [pack], [store], MatcherConfig(strategy=Strategy.SYNONYMY_HYPERNYMY)
            )
        )
        emb_only = set(
            collect_candidates(
                src,
                tgt,
                [pack],
                [store],
                MatcherConfig(strategy=Strategy.EMBEDDING, embedding_threshold=0.5),
            )
        )
        assert ("http://s/e1", "http://t/e0") not in hyp_only
        assert ("http://s/e0", "http://t/e0") not in emb_only
        assert keys == hyp_only | emb_only

    def test_embedding_requires_stores(self, pack):
        src = onto("s", "s", "Person")
        tgt = onto("t", "t", "Individual")
        with pytest.raises(ConfigurationError):
            collect_candidates(
                src, tgt, [pack], config=MatcherConfig(strategy=Strategy.EMBEDDING)
            )
        with pytest.raises(ConfigurationError):
            collect_candidates(src, tgt, [], config=MatcherConfig())

    def test_threads_do_not_change_result(self, pack):
        src = onto("s", "s", "Person", "Car", "Dinner", "Conference Banquet")
        tgt = onto("t", "t", "Individual", "Automobile", "Banquet", "Conference Dinner")
        sequential = collect_candidates(src, tgt, [pack], threads=1)
        threaded = collect_candidates(src, tgt, [pack], threads=4)
        assert sequential == threaded

    def test_exclusions_respected(self, pack):
        src = onto("s", "s", "Person")
        tgt = onto("t", "t", "Individual")
        none = collect_candidates(
            src, tgt, [pack], exclude_sources=frozenset({"http://s/e0"})
        )
        assert not none


class TestGridAndExtraction:
    def test_grid_validation(self):
        with pytest.raises(ValueError):
            CandidateGrid(("a",), ("b",), np.array([[1.5]]))
        with pytest.raises(ValueError):
            CandidateGrid(("a",), ("b", "c"), np.zeros((1, 1)))

    def test_extract_prefers_total_weight(self):
        candidates = {
            ("s1", "t1"): (0.9, Provenance.FULL_LABEL),
            ("s1", "t2"): (0.8, Provenance.LONGEST_TOKEN),
            ("s2", "t1"): (0.85, Provenance.FULL_LABEL),
        }
        grid = build_grid(candidates, ["s1", "s2"], ["t1", "t2"])
        result = hungarian_extract(grid)
        assert {(c.source, c.target) for c in result} == {("s1", "t2"), ("s2", "t1")}
        assert validate_alignment(result, one_to_one=True) == []

    def test_extract_keeps_provenance_and_weight(self):
        candidates = {("s1", "t1"): (0.7, Provenance.TOKEN)}
        result = hungarian_extract(build_grid(candidates, ["s1"], ["t1"]))
        (cell,) = list(result)
        assert cell.confidence == 0.7
        assert cell.provenance is Provenance.TOKEN


class TestRunMatch:
    def test_string_plus_evidence(self, pack):
        src = onto("s", "s", "Venue", "Person", "Banquet")
        tgt = onto("t", "t", "venue", "Individual", "Dinner")
        stats = MatchStats()
        result = run_match(src, tgt, [pack], stats=stats)
        assert len(result) == 3
        assert validate_alignment(result, one_to_one=True) == []
        by_source = {c.source: c for c in result}
        assert by_source["http://s/e0"].provenance is Provenance.STRING
        assert by_source["http://s/e0"].confidence == 1.0
        assert by_source["http://s/e1"].provenance is Provenance.FULL_LABEL
        assert stats.string_matches == 1
        assert stats.extracted == 2

    def test_string_matches_never_lose_to_heavier_grids(self):
        """A fixed string pair must survive even when the grid says otherwise.

        s0 has an exact label match with t0. s0~t1 and s1~t0 each score
        0.9 through the pack while s1~t1 has no evidence at all; pooling
        the string pair into one grid would pick the 1.8 total and drop
        the exact match. The pre-pass must keep it.
        """
        pack = make_pack(
            surfaces={"widget": {"c:w"}, "gadget": {"c:g"}, "gizmo": {"c:z"}},
            synonyms=[("c:w", "c:g"), ("c:w", "c:z")],
        )
        src = onto("s", "s", "Widget", "Gadget")
        tgt = onto("t", "t", "Widget", "Gizmo")
        result = run_match(src, tgt, [pack])
        assert len(result) == 1
        (exact,) = list(result)
        assert (exact.source, exact.target) == ("http://s/e0", "http://t/e0")
        assert exact.provenance is Provenance.STRING
        assert exact.confidence == 1.0

    def test_duplicate_label_collision_resolved_one_to_one(self):
        pack = make_pack(surfaces={"x": {"c:x"}})
        src = onto("s", "s", "Venue", "Venue2")
        # both targets carry the label "venue"
        tgt = Ontology(
            "t",
            [
                Entity("http://t/e0", ("venue",)),
                Entity("http://t/e1", ("venue", "venue2")),
            ],
        )
        result = run_match(src, tgt, [pack])
        assert validate_alignment(result, one_to_one=True) == []
        by_source = {c.source: c.target for c in result}
        # lexicographic preference: s/e0 -> t/e0, s/e1 -> t/e1
        assert by_source["http://s/e0"] == "http://t/e0"
        assert by_source["http://s/e1"] == "http://t/e1"

    def test_result_is_one_to_one(self, pack):
        src = onto("s", "s", "Person", ("Individual", "Person"))
        tgt = onto("t", "t", "Individual")
        result = run_match(src, tgt, [pack])
        assert validate_alignment(result, one_to_one=True) == []
        assert len(result) == 1

    def test_embedding_strategy_end_to_end(self, pack):
        store = EmbeddingStore(
            2,
            {
                "c:person": np.array([1.0, 0.0]),
                "c:individual": np.array([0.95, np.sqrt(1 - 0.95**2)]),
                "c:car": np.array([0.0, 1.0]),
            },
        )
        src = onto("s", "s", "Person")
        tgt = onto("t", "t", "Individual", "Car")
        result = run_match(
            src, tgt, [pack], [store], MatcherConfig(strategy=Strategy.EMBEDDING)
        )
        (cell,) = list(result)
        assert cell.target == "http://t/e0"
        assert cell.provenance is Provenance.EMBEDDING
        assert abs(cell.confidence - 0.95) < 1e-9

    def test_stats_populated(self, pack):
        src = onto("s", "s", "Person", "Car")
        tgt = onto("t", "t", "Individual")
        stats = MatchStats()
        run_match(src, tgt, [pack], stats=stats)
        assert stats.pairs_scanned == 2
        assert stats.candidate_pairs == 1
        assert "test" in stats.link_stats
        assert stats.link_stats["test"].full_label_probes > 0
