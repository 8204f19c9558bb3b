"""Knowledge graph data model and ingestion.

Triples are stored as dense integer ids. Entities and relations each get a
:class:`Vocabulary` mapping surface strings (Freebase MIDs, relation paths,
LDP strings) to contiguous ids. Textual relations (lexicalised dependency
paths extracted from a corpus) live in their own id space until
:func:`augment` merges them into a graph's relation vocabulary, where they
occupy the id range above ``num_kg_relations``.
"""

import logging
from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, NamedTuple

logger = logging.getLogger(__name__)


class TsvFormatError(ValueError):
    """A TSV line did not have the expected shape."""

    def __init__(self, path, lineno: int, message: str):
        self.path = str(path)
        self.lineno = lineno
        super().__init__(f"{path}:{lineno}: {message}")


class Triple(NamedTuple):
    head: int
    relation: int
    tail: int


class TextualTriple(NamedTuple):
    head: int
    ldp: int
    tail: int


class Vocabulary:
    """Bidirectional surface-string <-> dense-id mapping.

    Ids are assigned contiguously from 0 in first-seen order; every id has
    exactly one surface string and vice versa.
    """

    def __init__(self, surfaces: Iterable[str] = ()):
        self._surfaces: list[str] = []
        self._ids: dict[str, int] = {}
        for s in surfaces:
            self.add(s)

    def add(self, surface: str) -> int:
        """Return the id for ``surface``, assigning a new one if unseen."""
        idx = self._ids.get(surface)
        if idx is None:
            idx = len(self._surfaces)
            self._ids[surface] = idx
            self._surfaces.append(surface)
        return idx

    def id_of(self, surface: str) -> int:
        return self._ids[surface]

    def surface_of(self, idx: int) -> str:
        return self._surfaces[idx]

    def surfaces(self) -> list[str]:
        return list(self._surfaces)

    def __contains__(self, surface: str) -> bool:
        return surface in self._ids

    def __len__(self) -> int:
        return len(self._surfaces)

    def __eq__(self, other) -> bool:
        return isinstance(other, Vocabulary) and self._surfaces == other._surfaces

    def copy(self) -> "Vocabulary":
        return Vocabulary(self._surfaces)

    def save(self, path) -> None:
        """Write an ``index<TAB>surface`` TSV for reproducible id assignment."""
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            for idx, surface in enumerate(self._surfaces):
                fh.write(f"{idx}\t{surface}\n")

    @classmethod
    def load(cls, path) -> "Vocabulary":
        vocab = cls()
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                fields = line.rstrip("\n").split("\t")
                if len(fields) != 2:
                    raise TsvFormatError(path, lineno, f"expected 2 fields, got {len(fields)}")
                idx = vocab.add(fields[1])
                if idx != int(fields[0]):
                    raise TsvFormatError(path, lineno, f"non-contiguous index {fields[0]} (expected {idx})")
        return vocab


@dataclass
class KnowledgeGraph:
    """Entity/relation vocabularies plus train/valid/test triple sets.

    ``relations`` holds KG relations and textual relations in one id space:
    ids below ``num_kg_relations`` are KG relations, ids at or above it are
    textual (LDP, co-occurrence or link-all) relations appended by
    :func:`augment`. The instance is treated as immutable once built; all
    mutating pipeline steps return a new graph.
    """

    entities: Vocabulary
    relations: Vocabulary
    num_kg_relations: int
    train: list[Triple]
    valid: list[Triple] = field(default_factory=list)
    test: list[Triple] = field(default_factory=list)

    def is_textual_relation(self, relation_id: int) -> bool:
        return relation_id >= self.num_kg_relations

    @property
    def num_entities(self) -> int:
        return len(self.entities)

    @property
    def num_relations(self) -> int:
        return len(self.relations)

    def kg_relation_ids(self) -> range:
        return range(self.num_kg_relations)

    def all_known_triples(self) -> set[Triple]:
        """Union of train/valid/test, the filter universe for evaluation."""
        return set(self.train) | set(self.valid) | set(self.test)


@dataclass
class TextualTriples:
    """A textual-relation corpus over an existing entity vocabulary.

    LDP ids are local to ``ldps``; they are mapped into a graph's combined
    relation space by :func:`augment`.
    """

    ldps: Vocabulary
    triples: list[TextualTriple]

    def ordered_pairs(self) -> set[tuple[int, int]]:
        return {(t.head, t.tail) for t in self.triples}

    def __len__(self) -> int:
        return len(self.triples)


@dataclass
class MentionSplit:
    """Partition of a test set by textual co-occurrence of the (h, t) pair."""

    with_mention: list[Triple]
    without_mention: list[Triple]


class RelationCategory(Enum):
    ONE_TO_ONE = "1to1"
    ONE_TO_N = "1toN"
    N_TO_ONE = "Nto1"
    N_TO_N = "NtoN"


@dataclass
class TripleLoadResult:
    triples: list[Triple]
    duplicates_dropped: int


@dataclass
class TextualLoadResult:
    corpus: TextualTriples
    dropped_rare_ldp: int
    dropped_unknown_entity: int


def _parse_tsv_line(path, lineno: int, line: str) -> tuple[str, str, str]:
    fields = line.rstrip("\n").split("\t")
    if len(fields) != 3:
        raise TsvFormatError(path, lineno, f"expected 3 tab-separated fields, got {len(fields)}")
    return fields[0], fields[1], fields[2]


def load_triples(path, entities: Vocabulary, relations: Vocabulary) -> TripleLoadResult:
    """Load a ``head<TAB>relation<TAB>tail`` TSV, growing the vocabularies.

    Duplicate lines are dropped (first occurrence wins) and counted. An empty
    file yields an empty triple list.
    """
    triples: list[Triple] = []
    seen: set[Triple] = set()
    duplicates = 0
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            h, r, t = _parse_tsv_line(path, lineno, line)
            triple = Triple(entities.add(h), relations.add(r), entities.add(t))
            if triple in seen:
                duplicates += 1
                continue
            seen.add(triple)
            triples.append(triple)
    if duplicates:
        logger.info("%s: dropped %d duplicate triples", path, duplicates)
    return TripleLoadResult(triples, duplicates)


def load_textual_triples(path, entities: Vocabulary, min_pairs: int = 1) -> TextualLoadResult:
    """Load textual triples, keeping LDPs seen with >= ``min_pairs`` distinct pairs.

    The TSV has the same three-field shape as KG triples with the raw LDP
    string in field 2. Lines whose endpoints are not already in ``entities``
    are dropped and counted: the corpus may only relabel known entities,
    never introduce new ones. The distinct-pair count for the frequency
    filter uses ordered (head, tail) pairs. Kept lines are returned in file
    order, duplicates included (deduplication happens at augmentation).
    """
    if min_pairs < 1:
        raise ValueError(f"min_pairs must be >= 1, got {min_pairs}")
    raw: list[tuple[int, str, int]] = []
    dropped_unknown = 0
    pairs_per_ldp: dict[str, set[tuple[int, int]]] = defaultdict(set)
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            h, ldp, t = _parse_tsv_line(path, lineno, line)
            if not ldp:
                raise TsvFormatError(path, lineno, "empty LDP string")
            if h not in entities or t not in entities:
                dropped_unknown += 1
                continue
            pair = (entities.id_of(h), entities.id_of(t))
            raw.append((pair[0], ldp, pair[1]))
            pairs_per_ldp[ldp].add(pair)

    kept_ldps = {ldp for ldp, pairs in pairs_per_ldp.items() if len(pairs) >= min_pairs}
    ldps = Vocabulary()
    triples: list[TextualTriple] = []
    dropped_rare = 0
    for h, ldp, t in raw:
        if ldp not in kept_ldps:
            dropped_rare += 1
            continue
        triples.append(TextualTriple(h, ldps.add(ldp), t))
    if dropped_unknown or dropped_rare:
        logger.info(
            "%s: dropped %d lines with unknown entities, %d lines with rare LDPs",
            path, dropped_unknown, dropped_rare,
        )
    return TextualLoadResult(TextualTriples(ldps, triples), dropped_rare, dropped_unknown)


def save_triples(path, triples: Iterable[Triple], entities: Vocabulary, relations: Vocabulary) -> None:
    """Write triples back to the three-field TSV format."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for h, r, t in triples:
            fh.write(f"{entities.surface_of(h)}\t{relations.surface_of(r)}\t{entities.surface_of(t)}\n")


def save_textual_triples(path, corpus: TextualTriples, entities: Vocabulary) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for h, ldp, t in corpus.triples:
            fh.write(f"{entities.surface_of(h)}\t{corpus.ldps.surface_of(ldp)}\t{entities.surface_of(t)}\n")


def split_mentions(test: Iterable[Triple], corpus: TextualTriples) -> MentionSplit:
    """Partition test triples by whether the ordered (h, t) pair has a mention.

    A triple is with-mention iff its ordered (head, tail) pair occurs in at
    least one textual triple of the filtered corpus. LDP strings are
    directional, so (t, h) co-occurrence does not count.
    """
    mentioned = corpus.ordered_pairs()
    with_mention: list[Triple] = []
    without_mention: list[Triple] = []
    for triple in test:
        if (triple.head, triple.tail) in mentioned:
            with_mention.append(triple)
        else:
            without_mention.append(triple)
    logger.info("mention split: %d with, %d without", len(with_mention), len(without_mention))
    return MentionSplit(with_mention, without_mention)


def relation_category(train: Iterable[Triple], relation_id: int) -> RelationCategory:
    """Classify a relation as 1to1 / 1toN / Nto1 / NtoN from training triples.

    hpt is the mean number of distinct heads per distinct tail, tph the mean
    number of distinct tails per distinct head; both use the conventional
    1.5 threshold.
    """
    heads_per_tail: dict[int, set[int]] = defaultdict(set)
    tails_per_head: dict[int, set[int]] = defaultdict(set)
    for h, r, t in train:
        if r != relation_id:
            continue
        heads_per_tail[t].add(h)
        tails_per_head[h].add(t)
    if not heads_per_tail:
        raise ValueError(f"relation {relation_id} does not appear in the training triples")
    hpt = sum(len(v) for v in heads_per_tail.values()) / len(heads_per_tail)
    tph = sum(len(v) for v in tails_per_head.values()) / len(tails_per_head)
    if hpt < 1.5 and tph < 1.5:
        return RelationCategory.ONE_TO_ONE
    if hpt < 1.5:
        return RelationCategory.ONE_TO_N
    if tph < 1.5:
        return RelationCategory.N_TO_ONE
    return RelationCategory.N_TO_N


def relation_categories(kg: KnowledgeGraph) -> dict[int, RelationCategory]:
    """Category of every KG relation that appears in the training set."""
    present = {t.relation for t in kg.train if t.relation < kg.num_kg_relations}
    return {r: relation_category(kg.train, r) for r in sorted(present)}


def augment(kg: KnowledgeGraph, corpus: TextualTriples) -> KnowledgeGraph:
    """Append textual triples to the training set of a new graph.

    LDP surface strings are registered in the combined relation vocabulary
    (above ``num_kg_relations``); the training set becomes the union of the
    existing triples and the mapped textual triples, deduplicated by id
    triple. Valid/test sets are untouched. Augmenting twice with the same
    corpus is a no-op the second time.
    """
    relations = kg.relations.copy()
    entities = kg.entities
    train = list(kg.train)
    seen = set(train)
    for h, ldp, t in corpus.triples:
        if h >= len(entities) or t >= len(entities):
            raise ValueError(f"textual triple endpoint ({h}, {t}) outside the entity vocabulary")
        mapped = Triple(h, relations.add(corpus.ldps.surface_of(ldp)), t)
        if mapped in seen:
            continue
        seen.add(mapped)
        train.append(mapped)
    return KnowledgeGraph(
        entities=entities,
        relations=relations,
        num_kg_relations=kg.num_kg_relations,
        train=train,
        valid=kg.valid,
        test=kg.test,
    )


def load_knowledge_graph(train_path, valid_path=None, test_path=None) -> KnowledgeGraph:
    """Load a graph from train/valid/test TSV files sharing one vocabulary.

    The evaluation splits must be disjoint from the training set; an
    overlap would leak eval triples into training and is rejected here.
    """
    entities = Vocabulary()
    relations = Vocabulary()
    train = load_triples(train_path, entities, relations).triples
    valid = load_triples(valid_path, entities, relations).triples if valid_path else []
    test = load_triples(test_path, entities, relations).triples if test_path else []
    train_set = set(train)
    for name, split in (("valid", valid), ("test", test)):
        overlap = sum(1 for t in split if t in train_set)
        if overlap:
            raise ValueError(f"{name} split shares {overlap} triples with the training set")
    return KnowledgeGraph(
        entities=entities,
        relations=relations,
        num_kg_relations=len(relations),
        train=train,
        valid=valid,
        test=test,
    )
