"""Seeded synthetic graphs and corpora.

Everything here exists so the toolkit can be exercised end to end without
shipping datasets: small analytic graphs for unit checks, planted
cluster structures for borrower recovery tests, and a typed-relation
generator that mimics a subsampled real-world KG plus textual corpus at
configurable scale.
"""

import os
from dataclasses import dataclass

import numpy as np

from .dumps import write_keyed_vectors_text
from .kg import (
    KnowledgeGraph,
    TextualTriple,
    TextualTriples,
    Triple,
    Vocabulary,
)
from .scores import EmbeddingTable


def chain_kg(n_entities: int = 10, n_relations: int = 2) -> KnowledgeGraph:
    """A directed chain e0 -> e1 -> ... with relations cycling along it."""
    entities = Vocabulary(f"e{i}" for i in range(n_entities))
    relations = Vocabulary(f"r{i}" for i in range(n_relations))
    train = [Triple(i, i % n_relations, i + 1) for i in range(n_entities - 1)]
    return KnowledgeGraph(entities, relations, n_relations, train)


def cycle_kg_and_table(norm: int = 1) -> tuple[KnowledgeGraph, EmbeddingTable]:
    """A 4-entity cycle with an exact translational embedding.

    Entities sit on the unit square and each edge has its own relation
    vector equal to the exact displacement, so every cycle edge scores 0
    (the maximum) and every wrong candidate scores strictly lower. The
    edges form the test set.
    """
    entities = Vocabulary(["a", "b", "c", "d"])
    relations = Vocabulary(["right", "up", "left", "down"])
    edges = [Triple(0, 0, 1), Triple(1, 1, 2), Triple(2, 2, 3), Triple(3, 3, 0)]
    kg = KnowledgeGraph(entities, relations, 4, train=[], test=edges)
    coords = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
    displacements = np.array([coords[t] - coords[h] for h, _, t in edges])
    table = EmbeddingTable("transe", 2, coords, displacements, transe_norm=norm)
    return kg, table


def random_kg(
    rng: np.random.Generator,
    n_entities: int = 50,
    n_relations: int = 5,
    n_train: int = 100,
    n_valid: int = 0,
    n_test: int = 0,
) -> KnowledgeGraph:
    """Uniformly random triples split into disjoint train/valid/test."""
    entities = Vocabulary(f"e{i}" for i in range(n_entities))
    relations = Vocabulary(f"r{i}" for i in range(n_relations))
    needed = n_train + n_valid + n_test
    triples: list[Triple] = []
    seen: set[Triple] = set()
    while len(triples) < needed:
        h = int(rng.integers(n_entities))
        r = int(rng.integers(n_relations))
        t = int(rng.integers(n_entities))
        triple = Triple(h, r, t)
        if triple in seen:
            continue
        seen.add(triple)
        triples.append(triple)
    return KnowledgeGraph(
        entities, relations, n_relations,
        train=triples[:n_train],
        valid=triples[n_train:n_train + n_valid],
        test=triples[n_train + n_valid:],
    )


def random_corpus(
    rng: np.random.Generator,
    n_entities: int,
    n_ldps: int = 20,
    n_triples: int = 200,
) -> TextualTriples:
    """Random textual triples over existing entity ids, for pool tests."""
    ldps = Vocabulary(f"h:<d{i}>:w{i}:t" for i in range(n_ldps))
    triples = [
        TextualTriple(int(rng.integers(n_entities)), int(rng.integers(n_ldps)),
                      int(rng.integers(n_entities)))
        for _ in range(n_triples)
    ]
    return TextualTriples(ldps, triples)


def _clustered_ldp_vocabulary(n_relations: int, ldps_per_relation: int) -> tuple[Vocabulary, np.ndarray]:
    """LDP strings sharing most tokens within a relation's cluster.

    The fallback encoder averages per-position token vectors, so strings
    that agree on 5 of 6 positions land close together while strings from
    different clusters share only the endpoint markers.
    """
    surfaces = []
    cluster = []
    for r in range(n_relations):
        for j in range(ldps_per_relation):
            surfaces.append(f"h:<-rel{r}>:verb{r}:via{r}:mod{j}:t")
            cluster.append(r)
    return Vocabulary(surfaces), np.asarray(cluster)


@dataclass
class PlantedBorrowData:
    """Entity-pair corpus whose true LDP cluster is the pair's relation."""

    corpus: TextualTriples
    entity_vectors: np.ndarray
    pair_relations: dict[tuple[int, int], int]
    ldp_cluster: np.ndarray
    n_relations: int


def _relation_type_signatures(n_relations: int, n_clusters: int, rng) -> np.ndarray:
    """Distinct (source cluster, target cluster) per relation.

    Sharing clusters across relations matters: it is what mixes the
    one-endpoint negative pools across LDP clusters, the structure the
    borrower exploits.
    """
    available = [(a, b) for a in range(n_clusters) for b in range(n_clusters) if a != b]
    if n_relations > len(available):
        raise ValueError("not enough cluster pairs for that many relations")
    picked = rng.permutation(len(available))[:n_relations]
    return np.array([available[i] for i in picked])


def planted_borrow_data(
    n_relations: int = 10,
    n_entities: int = 500,
    n_pairs: int = 2000,
    n_clusters: int = 5,
    ldps_per_relation: int = 8,
    entity_dim: int = 20,
    noise: float = 0.15,
    seed: int = 0,
) -> PlantedBorrowData:
    """Pairs with cluster-structured endpoints and relation-typed LDPs.

    Entities belong to shared clusters; each relation links one source
    cluster to one target cluster and each pair draws one or two LDPs
    from its relation's LDP cluster. Entity vectors are the cluster
    centre plus noise, so a borrower that recovers the structure should
    retrieve the relation's LDP cluster for held-out pairs.
    """
    rng = np.random.default_rng(seed)
    ldps, ldp_cluster = _clustered_ldp_vocabulary(n_relations, ldps_per_relation)
    signatures = _relation_type_signatures(n_relations, n_clusters, rng)
    cluster_of = np.array([e % n_clusters for e in range(n_entities)])
    members = [np.nonzero(cluster_of == c)[0] for c in range(n_clusters)]
    if min(len(m) for m in members) < 2:
        raise ValueError("need at least two entities per cluster")
    centers = rng.normal(size=(n_clusters, entity_dim))
    centers /= np.linalg.norm(centers, axis=1, keepdims=True)
    entity_vectors = centers[cluster_of] + noise * rng.normal(size=(n_entities, entity_dim))

    pair_relations: dict[tuple[int, int], int] = {}
    triples: list[TextualTriple] = []
    while len(pair_relations) < n_pairs:
        r = int(rng.integers(n_relations))
        src, dst = signatures[r]
        h = int(rng.choice(members[src]))
        t = int(rng.choice(members[dst]))
        if h == t or (h, t) in pair_relations:
            continue
        pair_relations[(h, t)] = r
        for ldp_offset in rng.choice(ldps_per_relation, size=int(rng.integers(1, 3)), replace=False):
            triples.append(TextualTriple(h, r * ldps_per_relation + int(ldp_offset), t))
    return PlantedBorrowData(
        corpus=TextualTriples(ldps, triples),
        entity_vectors=entity_vectors,
        pair_relations=pair_relations,
        ldp_cluster=ldp_cluster,
        n_relations=n_relations,
    )


@dataclass
class SyntheticDatasetPaths:
    train: str
    valid: str
    test: str
    textual: str
    entity_vectors: str


def write_text_kg_dataset(
    out_dir,
    n_entities: int = 5000,
    n_relations: int = 30,
    n_clusters: int = 20,
    n_train: int = 30000,
    n_valid: int = 1500,
    n_test: int = 2500,
    ldps_per_relation: int = 6,
    train_mention_fraction: float = 0.35,
    test_mention_fraction: float = 0.12,
    entity_dim: int = 100,
    noise: float = 0.25,
    seed: int = 0,
) -> SyntheticDatasetPaths:
    """Write a typed synthetic KG + textual corpus + entity vectors to disk.

    Relations connect a fixed source entity cluster to a fixed target
    cluster, LDP strings are clustered per relation, and a configurable
    fraction of train/test pairs receives textual mentions drawn from the
    pair's relation. The entity-vector file is keyed by entity surface so
    it is independent of vocabulary load order.
    """
    rng = np.random.default_rng(seed)
    os.makedirs(out_dir, exist_ok=True)
    entity_names = [f"e{i:05d}" for i in range(n_entities)]
    relation_names = [f"rel{r:02d}" for r in range(n_relations)]
    ldps, _ = _clustered_ldp_vocabulary(n_relations, ldps_per_relation)

    cluster_of = np.array([i % n_clusters for i in range(n_entities)])
    members = [np.nonzero(cluster_of == c)[0] for c in range(n_clusters)]
    src = rng.integers(0, n_clusters, size=n_relations)
    dst = (src + 1 + rng.integers(0, n_clusters - 1, size=n_relations)) % n_clusters

    needed = n_train + n_valid + n_test
    triples: list[tuple[int, int, int]] = []
    seen: set[tuple[int, int, int]] = set()
    while len(triples) < needed:
        r = int(rng.integers(n_relations))
        h = int(rng.choice(members[src[r]]))
        t = int(rng.choice(members[dst[r]]))
        if h == t or (h, r, t) in seen:
            continue
        seen.add((h, r, t))
        triples.append((h, r, t))
    train = triples[:n_train]
    valid = triples[n_train:n_train + n_valid]
    test = triples[n_train + n_valid:]

    def mention_lines(split, fraction):
        lines = []
        pairs_done = set()
        for h, r, t in split:
            if (h, t) in pairs_done:
                continue
            pairs_done.add((h, t))
            if rng.random() >= fraction:
                continue
            count = int(rng.integers(1, 3))
            for offset in rng.choice(ldps_per_relation, size=count, replace=False):
                ldp = ldps.surface_of(r * ldps_per_relation + int(offset))
                lines.append((entity_names[h], ldp, entity_names[t]))
        return lines

    textual_lines = mention_lines(train, train_mention_fraction)
    textual_lines += mention_lines(test, test_mention_fraction)

    centers = rng.normal(size=(n_clusters, entity_dim))
    centers /= np.linalg.norm(centers, axis=1, keepdims=True)
    entity_vectors = centers[cluster_of] + noise * rng.normal(size=(n_entities, entity_dim))

    paths = SyntheticDatasetPaths(
        train=os.path.join(out_dir, "train.tsv"),
        valid=os.path.join(out_dir, "valid.tsv"),
        test=os.path.join(out_dir, "test.tsv"),
        textual=os.path.join(out_dir, "textual.tsv"),
        entity_vectors=os.path.join(out_dir, "entity_vectors.tsv"),
    )
    for path, split in ((paths.train, train), (paths.valid, valid), (paths.test, test)):
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            for h, r, t in split:
                fh.write(f"{entity_names[h]}\t{relation_names[r]}\t{entity_names[t]}\n")
    with open(paths.textual, "w", encoding="utf-8", newline="\n") as fh:
        for h_name, ldp, t_name in textual_lines:
            fh.write(f"{h_name}\t{ldp}\t{t_name}\n")
    write_keyed_vectors_text(paths.entity_vectors, entity_names, entity_vectors)
    return paths
