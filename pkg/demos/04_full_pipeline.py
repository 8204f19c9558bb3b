"""End-to-end config-driven runs on a small synthetic dataset.

Generates a typed graph plus textual corpus, then compares link
prediction with no augmentation against supervised borrowing. The same
flow is available from the command line:

    kgborrow run --config config.json
    kgborrow borrow --mode superborrow --k 3 --train train.tsv ...
    kgborrow export --embeddings run/embeddings.tsv --format binary
"""

import json
import tempfile
from pathlib import Path

from kgborrow import RunConfig, SuperBorrowConfig, TrainConfig, run
from kgborrow.evaluation import EvalSettings
from kgborrow.synthetic import write_text_kg_dataset

base = Path(tempfile.mkdtemp(prefix="kgborrow-pipeline-"))
paths = write_text_kg_dataset(
    base / "data",
    n_entities=300, n_relations=10, n_clusters=6,
    n_train=2400, n_valid=200, n_test=400,
    ldps_per_relation=4, train_mention_fraction=0.45,
    test_mention_fraction=0.15, entity_dim=16, noise=0.2, seed=9,
)


def config(mode, **kw):
    return RunConfig(
        train_path=paths.train, valid_path=paths.valid, test_path=paths.test,
        textual_path=paths.textual, entity_vectors_path=paths.entity_vectors,
        mode=mode, min_pairs=3, seed=4, out_dir=str(base / mode),
        train=TrainConfig(model_kind="transe", dim=24, learning_rate=0.3, epochs=80,
                          negatives_per_positive=5, loss_kind="margin", margin=4.0,
                          batches_per_epoch=20),
        superborrow=SuperBorrowConfig(hidden_layers=2, hidden_dim=64, epochs=60,
                                      batch_size=64, learning_rate=0.005, l2=0.001,
                                      negatives_per_pair=25),
        eval=EvalSettings(),
        **kw,
    )


for mode, extra in [("none", {}), ("superborrow", {"k": 3})]:
    outcome = run(config(mode, **extra))
    print(f"=== mode {mode}")
    print(outcome.report.to_markdown())

# a config is plain JSON; this file reproduces the second run byte-for-byte
config_path = base / "superborrow.json"
config_path.write_text(json.dumps(config("superborrow", k=3).to_dict(), indent=2))
print(f"artifacts under {base}; rerun with: kgborrow run --config {config_path}")
