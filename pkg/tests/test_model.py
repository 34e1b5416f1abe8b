from __future__ import annotations

import pytest

from bkmatch.model import (
    DEFAULT_TIER_CONFIDENCES,
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


def cell(src, tgt, conf=1.0, prov=Provenance.EXTERNAL):
    return Correspondence(src, tgt, Relation.EQUIVALENCE, conf, prov)


class TestEntity:
    def test_basic(self):
        e = Entity("http://x/A", ("Label One", "Second"))
        assert e.iri == "http://x/A"
        assert e.labels == ("Label One", "Second")

    def test_rejects_empty_iri(self):
        with pytest.raises(ValueError):
            Entity("", ("x",))

    def test_rejects_empty_label(self):
        with pytest.raises(ValueError):
            Entity("http://x/A", ("",))


class TestOntology:
    def test_lookup_and_iter(self):
        a, b = Entity("http://x/A", ("a",)), Entity("http://x/B", ("b",))
        onto = Ontology("o", [a, b])
        assert onto.entity("http://x/A") is a
        assert "http://x/A" in onto
        assert len(onto) == 2
        assert [e.iri for e in onto] == ["http://x/A", "http://x/B"]

    def test_duplicate_iri_rejected(self):
        a = Entity("http://x/A", ("a",))
        with pytest.raises(ValueError):
            Ontology("o", [a, Entity("http://x/A", ("other",))])


class TestCorrespondence:
    def test_confidence_bounds(self):
        with pytest.raises(ValueError):
            cell("s", "t", 1.5)
        with pytest.raises(ValueError):
            cell("s", "t", -0.1)
        with pytest.raises(ValueError):
            cell("s", "t", float("nan"))

    def test_equality_ignores_confidence(self):
        assert cell("s", "t", 0.5) == cell("s", "t", 0.9)
        assert hash(cell("s", "t", 0.5)) == hash(cell("s", "t", 0.9))
        assert cell("s", "t") != cell("s", "u")


class TestAlignment:
    def test_add_keeps_max_confidence(self):
        a = Alignment()
        a.add(cell("s", "t", 0.4))
        a.add(cell("s", "t", 0.8))
        a.add(cell("s", "t", 0.6))
        (kept,) = list(a)
        assert kept.confidence == 0.8

    def test_set_ops(self):
        a = Alignment([cell("1", "a"), cell("2", "b")])
        b = Alignment([cell("2", "b"), cell("3", "c")])
        assert sorted(c.source for c in a | b) == ["1", "2", "3"]
        assert [c.source for c in a & b] == ["2"]
        assert [c.source for c in a - b] == ["1"]

    def test_equality_is_keywise(self):
        assert Alignment([cell("s", "t", 0.2)]) == Alignment([cell("s", "t", 0.9)])
        assert Alignment([cell("s", "t")]) != Alignment([cell("s", "u")])

    def test_sorted_cells(self):
        a = Alignment([cell("2", "b"), cell("1", "a")])
        assert [c.source for c in a.sorted_cells()] == ["1", "2"]

    def test_validate_one_to_one(self):
        ok = Alignment([cell("1", "a"), cell("2", "b")])
        assert validate_alignment(ok, one_to_one=True) == []
        bad = Alignment([cell("1", "a"), cell("1", "b"), cell("2", "b")])
        violations = validate_alignment(bad, one_to_one=True)
        assert len(violations) == 2  # source "1" reused, target "b" reused
        text = " ".join(violations)
        assert "1" in text and "b" in text
        # multiplicity is not checked unless requested
        assert validate_alignment(bad) == []


class TestMatcherConfig:
    def test_defaults(self):
        cfg = MatcherConfig()
        assert cfg.strategy is Strategy.SYNONYMY
        assert cfg.embedding_threshold == 0.7
        assert cfg.alpha == 0.05
        assert cfg.combination_strategies == (Strategy.SYNONYMY,)

    def test_threshold_bounds(self):
        MatcherConfig(embedding_threshold=-1.0)
        MatcherConfig(embedding_threshold=1.0)
        with pytest.raises(ValueError):
            MatcherConfig(embedding_threshold=1.0001)

    def test_tier_confidences_must_decrease(self):
        with pytest.raises(ValueError):
            MatcherConfig(tier_confidences={**DEFAULT_TIER_CONFIDENCES, Provenance.TOKEN: 0.95})
        with pytest.raises(ValueError):
            MatcherConfig(tier_confidences={Provenance.STRING: 1.0})  # missing tiers

    def test_default_tier_confidences(self):
        assert DEFAULT_TIER_CONFIDENCES[Provenance.STRING] == 1.0
        assert DEFAULT_TIER_CONFIDENCES[Provenance.FULL_LABEL] == 0.9
        assert DEFAULT_TIER_CONFIDENCES[Provenance.LONGEST_TOKEN] == 0.8
        assert DEFAULT_TIER_CONFIDENCES[Provenance.TOKEN] == 0.7

    def test_combination_cannot_nest(self):
        with pytest.raises(ValueError):
            MatcherConfig(combination_strategies=(Strategy.COMBINATION,))
        with pytest.raises(ValueError):
            MatcherConfig(combination_strategies=())

    def test_alpha_open_interval(self):
        with pytest.raises(ValueError):
            MatcherConfig(alpha=0.0)
        with pytest.raises(ValueError):
            MatcherConfig(alpha=1.0)


def test_strategy_values():
    assert Strategy.SYNONYMY.value == "synonymy"
    assert Strategy.SYNONYMY_HYPERNYMY.value == "synonymy-hypernymy"
    assert Strategy.EMBEDDING.value == "embedding"
    assert Strategy.COMBINATION.value == "combination"
