from __future__ import annotations

import sys
from pathlib import Path

import pytest

TESTS_DIR = Path(__file__).resolve().parent
if str(TESTS_DIR) not in sys.path:
    sys.path.insert(0, str(TESTS_DIR))

from bkmatch.alignio import read_alignment
from bkmatch.ingest import PredicateProfile, extract_ontology
from bkmatch.ntriples import parse_ntriples
from bkmatch.pack import load_pack

TOY_DIR = TESTS_DIR / "data" / "toy"

_LABEL_ONLY = PredicateProfile(
    name="label-only",
    label_predicates=frozenset({"http://www.w3.org/2000/01/rdf-schema#label"}),
    synonym_predicates=frozenset(),
    hypernym_predicates=frozenset(),
)


@pytest.fixture(scope="session")
def toy_dir() -> Path:
    return TOY_DIR


@pytest.fixture(scope="session")
def toy_pack():
    return load_pack(TOY_DIR / "pack")


def _load_ontology(path: Path, ontology_id: str):
    triples = list(parse_ntriples(path))
    return extract_ontology(triples, _LABEL_ONLY, ontology_id)


@pytest.fixture(scope="session")
def toy_source():
    return _load_ontology(TOY_DIR / "source.nt", "toy-source")


@pytest.fixture(scope="session")
def toy_target():
    return _load_ontology(TOY_DIR / "target.nt", "toy-target")


@pytest.fixture(scope="session")
def toy_gold():
    return read_alignment(TOY_DIR / "gold.tsv")
