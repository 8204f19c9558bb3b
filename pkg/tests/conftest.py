import numpy as np
import pytest

from kgborrow import KnowledgeGraph, TextualTriple, TextualTriples, Triple, Vocabulary


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def write_lines(path, lines):
    path.write_text("".join(line + "\n" for line in lines), encoding="utf-8")
    return str(path)


@pytest.fixture
def tiny_kg():
    """Five entities, two KG relations, a handful of triples."""
    entities = Vocabulary(["a", "b", "c", "d", "e"])
    relations = Vocabulary(["r0", "r1"])
    train = [Triple(0, 0, 1), Triple(1, 0, 2), Triple(2, 1, 3), Triple(3, 1, 4)]
    test = [Triple(0, 1, 2), Triple(1, 1, 3)]
    return KnowledgeGraph(entities, relations, 2, train=train, test=test)


def corpus_from(pairs_with_ldps, ldp_names):
    """Build a TextualTriples container from ((h, ldp_name, t), ...) tuples."""
    ldps = Vocabulary(ldp_names)
    triples = [TextualTriple(h, ldps.id_of(name), t) for h, name, t in pairs_with_ldps]
    return TextualTriples(ldps, triples)
