"""Reading and writing alignments: plain TSV and the XML interchange format.

TSV rows are `source TAB target TAB relation TAB confidence` with LF line
endings and no header. The XML format is the alignment interchange layout
with one map/Cell element per correspondence. Cells are written sorted, so
serialisation is byte-stable.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Union

from bkmatch.errors import DataError
from bkmatch.model import Alignment, Correspondence, Provenance, Relation

ALIGNMENT_NS = "http://knowledgeweb.semanticweb.org/heterogeneity/alignment"
RDF_NS = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
XSD_FLOAT = "http://www.w3.org/2001/XMLSchema#float"


class AlignmentFormat(Enum):
    TSV = "tsv"
    ALIGN_XML = "align-xml"


@dataclass(frozen=True)
class ReadIssue:
    location: str
    message: str


_RELATION_BY_SYMBOL = {r.value: r for r in Relation}


def infer_format(path: Union[str, Path]) -> AlignmentFormat:
    suffix = Path(path).suffix.lower()
    if suffix in (".xml", ".rdf"):
        return AlignmentFormat.ALIGN_XML
    return AlignmentFormat.TSV


def read_alignment(
    path: Union[str, Path],
    format: AlignmentFormat | None = None,
    *,
    lenient: bool = False,
    issues: list[ReadIssue] | None = None,
) -> Alignment:
    """Read an alignment file; format defaults to a suffix-based guess.

    In lenient mode malformed rows and unknown relations are skipped and
    recorded; in strict mode they raise DataError.
    """
    format = format if format is not None else infer_format(path)
    if format is AlignmentFormat.TSV:
        return _read_tsv(Path(path), lenient, issues)
    return _read_align_xml(Path(path), lenient, issues)


def write_alignment(
    alignment: Alignment, path: Union[str, Path], format: AlignmentFormat | None = None
) -> None:
    format = format if format is not None else infer_format(path)
    if format is AlignmentFormat.TSV:
        _write_tsv(alignment, Path(path))
    else:
        _write_align_xml(alignment, Path(path))


def _problem(
    location: str, message: str, lenient: bool, issues: list[ReadIssue] | None
) -> None:
    if not lenient:
        raise DataError(f"{location}: {message}")
    if issues is not None:
        issues.append(ReadIssue(location, message))


def _read_tsv(path: Path, lenient: bool, issues: list[ReadIssue] | None) -> Alignment:
    alignment = Alignment()
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.rstrip("\n").rstrip("\r")
            if not line:
                continue
            location = f"{path}, line {lineno}"
            parts = line.split("\t")
            if len(parts) != 4:
                _problem(location, f"expected 4 tab-separated fields, found {len(parts)}", lenient, issues)
                continue
            source, target, symbol, raw_confidence = parts
            relation = _RELATION_BY_SYMBOL.get(symbol)
            if relation is None:
                _problem(location, f"unknown relation {symbol!r}", lenient, issues)
                continue
            try:
                confidence = float(raw_confidence)
                cell = Correspondence(source, target, relation, confidence, Provenance.EXTERNAL)
            except ValueError as exc:
                _problem(location, str(exc), lenient, issues)
                continue
            alignment.add(cell)
    return alignment


def _write_tsv(alignment: Alignment, path: Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for cell in alignment.sorted_cells():
            handle.write(
                f"{cell.source}\t{cell.target}\t{cell.relation.value}\t{cell.confidence!r}\n"
            )


def _local_name(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _child_by_name(element: ET.Element, name: str) -> ET.Element | None:
    for child in element:
        if _local_name(child.tag) == name:
            return child
    return None


def _resource(element: ET.Element | None) -> str | None:
    if element is None:
        return None
    return element.get(f"{{{RDF_NS}}}resource") or element.get("resource")


def _read_align_xml(path: Path, lenient: bool, issues: list[ReadIssue] | None) -> Alignment:
    try:
        tree = ET.parse(path)
    except ET.ParseError as exc:
        raise DataError(f"{path}: {exc}") from None
    alignment = Alignment()
    cell_number = 0
    for element in tree.getroot().iter():
        if _local_name(element.tag) != "Cell":
            continue
        cell_number += 1
        location = f"{path}, cell {cell_number}"
        entity1 = _resource(_child_by_name(element, "entity1"))
        entity2 = _resource(_child_by_name(element, "entity2"))
        if not entity1 or not entity2:
            _problem(location, "missing entity1/entity2 resource", lenient, issues)
            continue
        relation_el = _child_by_name(element, "relation")
        symbol = relation_el.text.strip() if relation_el is not None and relation_el.text else "="
        relation = _RELATION_BY_SYMBOL.get(symbol)
        if relation is None:
            _problem(location, f"unknown relation {symbol!r}", lenient, issues)
            continue
        measure_el = _child_by_name(element, "measure")
        try:
            confidence = float(measure_el.text) if measure_el is not None and measure_el.text else 1.0
            cell = Correspondence(entity1, entity2, relation, confidence, Provenance.EXTERNAL)
        except ValueError as exc:
            _problem(location, str(exc), lenient, issues)
            continue
        alignment.add(cell)
    return alignment


def _write_align_xml(alignment: Alignment, path: Path) -> None:
    ET.register_namespace("", ALIGNMENT_NS)
    ET.register_namespace("rdf", RDF_NS)
    root = ET.Element(f"{{{RDF_NS}}}RDF")
    container = ET.SubElement(root, f"{{{ALIGNMENT_NS}}}Alignment")
    ET.SubElement(container, f"{{{ALIGNMENT_NS}}}xml").text = "yes"
    ET.SubElement(container, f"{{{ALIGNMENT_NS}}}level").text = "0"
    ET.SubElement(container, f"{{{ALIGNMENT_NS}}}type").text = "11"
    for cell in alignment.sorted_cells():
        map_el = ET.SubElement(container, f"{{{ALIGNMENT_NS}}}map")
        cell_el = ET.SubElement(map_el, f"{{{ALIGNMENT_NS}}}Cell")
        ET.SubElement(cell_el, f"{{{ALIGNMENT_NS}}}entity1", {f"{{{RDF_NS}}}resource": cell.source})
        ET.SubElement(cell_el, f"{{{ALIGNMENT_NS}}}entity2", {f"{{{RDF_NS}}}resource": cell.target})
        ET.SubElement(cell_el, f"{{{ALIGNMENT_NS}}}relation").text = cell.relation.value
        measure = ET.SubElement(
            cell_el, f"{{{ALIGNMENT_NS}}}measure", {f"{{{RDF_NS}}}datatype": XSD_FLOAT}
        )
        measure.text = repr(cell.confidence)
    ET.indent(root)
    tree = ET.ElementTree(root)
    tree.write(path, encoding="utf-8", xml_declaration=True)
