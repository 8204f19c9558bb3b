"""Load a toy graph plus textual corpus and inspect the mention split.

Walks through the ingestion layer: triple TSV loading with growing
vocabularies, textual-triple filtering by distinct-pair frequency, the
with/without-mention partition of the test set, and relation categories.
"""

import tempfile
from pathlib import Path

from kgborrow import (
    RelationCategory,
    load_knowledge_graph,
    load_textual_triples,
    relation_categories,
    split_mentions,
)
from kgborrow.kg import augment

workdir = Path(tempfile.mkdtemp(prefix="kgborrow-demo-"))

(workdir / "train.tsv").write_text(
    "tokyo\tcapital-of\tjapan\n"
    "paris\tcapital-of\tfrance\n"
    "paris\tlocated-in\tfrance\n"
    "tokyo\tlocated-in\tjapan\n"
    "kyoto\tlocated-in\tjapan\n"
    "osaka\tlocated-in\tjapan\n"
)
(workdir / "test.tsv").write_text(
    "kyoto\tcapital-of\tjapan\n"  # historically true, and mentioned in text
    "osaka\tcapital-of\tjapan\n"
)
# textual triples: raw dependency paths between mentioned entity pairs
(workdir / "textual.tsv").write_text(
    "kyoto\th:<-nsubj>:capital:<prep>:of:<pobj>:t\tjapan\n"
    "kyoto\th:<-nsubj>:capital:<prep>:of:<pobj>:t\tjapan\n"
    "tokyo\th:<-nsubj>:capital:<prep>:of:<pobj>:t\tjapan\n"
    "paris\th:<-nsubj>:capital:<prep>:of:<pobj>:t\tfrance\n"
    "rare-entity\th:<-poss>:t\tjapan\n"  # unknown head entity: dropped
)

kg = load_knowledge_graph(workdir / "train.tsv", test_path=workdir / "test.tsv")
print(f"{kg.num_entities} entities, {kg.num_kg_relations} KG relations, "
      f"{len(kg.train)} train / {len(kg.test)} test triples")

loaded = load_textual_triples(workdir / "textual.tsv", kg.entities, min_pairs=2)
corpus = loaded.corpus
print(f"kept {len(corpus)} textual triples "
      f"({loaded.dropped_unknown_entity} unknown-entity lines dropped, "
      f"{loaded.dropped_rare_ldp} rare-LDP lines dropped)")

split = split_mentions(kg.test, corpus)
print("with-mention test triples:",
      [(kg.entities.surface_of(h), kg.entities.surface_of(t)) for h, _, t in split.with_mention])
print("without-mention test triples:",
      [(kg.entities.surface_of(h), kg.entities.surface_of(t)) for h, _, t in split.without_mention])

augmented = augment(kg, corpus)
print(f"augmented training set has {len(augmented.train)} triples and "
      f"{augmented.num_relations - augmented.num_kg_relations} textual relations")

for relation_id, category in relation_categories(kg).items():
    name = kg.relations.surface_of(relation_id)
    print(f"relation {name!r}: {category.value}")
assert relation_categories(kg)[kg.relations.id_of("located-in")] is RelationCategory.N_TO_ONE
