from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bkmatch.alignio import (
    AlignmentFormat,
    ReadIssue,
    infer_format,
    read_alignment,
    write_alignment,
)
from bkmatch.errors import DataError
from bkmatch.model import Alignment, Correspondence, Relation


def cell(src, tgt, conf=1.0):
    return Correspondence(src, tgt, Relation.EQUIVALENCE, conf)


SAMPLE = Alignment(
    [
        cell("http://s/A", "http://t/A", 1.0),
        cell("http://s/B", "http://t/B", 0.75),
        cell("http://s/C", "http://t/C", 0.123456789),
    ]
)


def test_infer_format():
    assert infer_format("x.tsv") is AlignmentFormat.TSV
    assert infer_format("x.txt") is AlignmentFormat.TSV
    assert infer_format("x.xml") is AlignmentFormat.ALIGN_XML
    assert infer_format("x.rdf") is AlignmentFormat.ALIGN_XML
    assert infer_format("X.RDF") is AlignmentFormat.ALIGN_XML


@pytest.mark.parametrize("fmt,suffix", [(AlignmentFormat.TSV, "tsv"), (AlignmentFormat.ALIGN_XML, "xml")])
class TestRoundTrip:
    def test_cells_and_confidences_survive(self, tmp_path, fmt, suffix):
        path = tmp_path / f"a.{suffix}"
        write_alignment(SAMPLE, path)
        loaded = read_alignment(path)
        assert loaded == SAMPLE
        for original in SAMPLE:
            back = loaded.get(original.source, original.target)
            assert back is not None
            assert back.confidence == original.confidence  # repr() round-trips floats

    def test_writes_are_byte_stable(self, tmp_path, fmt, suffix):
        p1, p2 = tmp_path / f"1.{suffix}", tmp_path / f"2.{suffix}"
        write_alignment(SAMPLE, p1)
        write_alignment(SAMPLE, p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_insertion_order_does_not_matter(self, tmp_path, fmt, suffix):
        reordered = Alignment(list(SAMPLE)[::-1])
        p1, p2 = tmp_path / f"1.{suffix}", tmp_path / f"2.{suffix}"
        write_alignment(SAMPLE, p1)
        write_alignment(reordered, p2)
        assert p1.read_bytes() == p2.read_bytes()


@settings(max_examples=50, deadline=None)
@given(
    st.lists(
        st.tuples(
            st.integers(0, 30),
            st.integers(0, 30),
            st.floats(0.0, 1.0, allow_nan=False),
        ),
        max_size=20,
    )
)
def test_tsv_round_trip_property(tmp_path_factory, rows):
    alignment = Alignment(
        cell(f"http://s/{a}", f"http://t/{b}", round(conf, 6)) for a, b, conf in rows
    )
    path = tmp_path_factory.mktemp("rt") / "a.tsv"
    write_alignment(alignment, path)
    loaded = read_alignment(path)
    assert loaded == alignment
    for original in alignment:
        assert loaded.get(original.source, original.target).confidence == original.confidence


class TestTsvErrors:
    def test_wrong_field_count(self, tmp_path):
        path = tmp_path / "a.tsv"
        path.write_text("only\tthree\tfields\n", encoding="utf-8")
        with pytest.raises(DataError):
            read_alignment(path)

    def test_unknown_relation(self, tmp_path):
        path = tmp_path / "a.tsv"
        path.write_text("s\tt\t<\t1.0\n", encoding="utf-8")
        with pytest.raises(DataError):
            read_alignment(path)

    def test_bad_confidence(self, tmp_path):
        path = tmp_path / "a.tsv"
        path.write_text("s\tt\t=\tnot-a-number\n", encoding="utf-8")
        with pytest.raises(DataError):
            read_alignment(path)

    def test_out_of_range_confidence(self, tmp_path):
        path = tmp_path / "a.tsv"
        path.write_text("s\tt\t=\t1.5\n", encoding="utf-8")
        with pytest.raises(DataError):
            read_alignment(path)

    def test_lenient_skips_and_records(self, tmp_path):
        path = tmp_path / "a.tsv"
        path.write_text(
            "http://s/A\thttp://t/A\t=\t1.0\n"
            "bad line\n"
            "s\tt\t?\t1.0\n"
            "http://s/B\thttp://t/B\t=\t0.5\n",
            encoding="utf-8",
        )
        issues: list[ReadIssue] = []
        loaded = read_alignment(path, lenient=True, issues=issues)
        assert len(loaded) == 2
        assert len(issues) == 2
        assert "line 2" in issues[0].location


class TestAlignXml:
    def test_reads_default_relation_and_measure(self, tmp_path):
        path = tmp_path / "a.xml"
        path.write_text(
            """<?xml version='1.0'?>
<rdf:RDF xmlns:rdf='http://www.w3.org/1999/02/22-rdf-syntax-ns#'
         xmlns='http://knowledgeweb.semanticweb.org/heterogeneity/alignment'>
  <Alignment>
    <map><Cell>
      <entity1 rdf:resource='http://s/A'/>
      <entity2 rdf:resource='http://t/A'/>
    </Cell></map>
  </Alignment>
</rdf:RDF>
""",
            encoding="utf-8",
        )
        loaded = read_alignment(path)
        (only,) = list(loaded)
        assert only.source == "http://s/A"
        assert only.relation is Relation.EQUIVALENCE
        assert only.confidence == 1.0

    def test_bare_resource_attribute_accepted(self, tmp_path):
        path = tmp_path / "a.xml"
        path.write_text(
            """<?xml version='1.0'?>
<root>
  <Cell>
    <entity1 resource='http://s/A'/>
    <entity2 resource='http://t/A'/>
    <measure>0.5</measure>
  </Cell>
</root>
""",
            encoding="utf-8",
        )
        (only,) = list(read_alignment(path, AlignmentFormat.ALIGN_XML))
        assert only.confidence == 0.5

    def test_missing_entity_strict(self, tmp_path):
        path = tmp_path / "a.xml"
        path.write_text("<root><Cell><entity1 resource='http://s/A'/></Cell></root>", encoding="utf-8")
        with pytest.raises(DataError):
            read_alignment(path, AlignmentFormat.ALIGN_XML)

    def test_not_xml(self, tmp_path):
        path = tmp_path / "a.xml"
        path.write_text("definitely not xml", encoding="utf-8")
        with pytest.raises(DataError):
            read_alignment(path)
