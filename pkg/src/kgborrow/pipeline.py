"""Config-driven end-to-end runs: load, filter, borrow, augment, train,
evaluate, export.

A run is fully described by a :class:`RunConfig` (JSON on disk) plus a
seed; in sequential mode the same config and seed reproduce byte-identical
reports. Every stage's artifacts are hashed into a manifest so reruns can
be compared; a failing stage aborts the run with its name and flags the
manifest as partial.
"""

import dataclasses
import hashlib
import json
import os
from dataclasses import dataclass, field

import numpy as np

from . import borrowing
from .borrowing import (
    SuperBorrowConfig,
    borrow_topk,
    build_borrow_train_set,
    train_superborrow,
)
from .dumps import (
    read_matrix_binary,
    read_matrix_text,
    write_loss_trace,
    write_matrix_binary,
    write_matrix_text,
)
from .evaluation import EvalReport, EvalSettings, evaluate
from .kg import (
    KnowledgeGraph,
    MentionSplit,
    TextualTriples,
    Vocabulary,
    augment,
    load_knowledge_graph,
    load_textual_triples,
    save_textual_triples,
    split_mentions,
)
from .ldpspace import LdpVectorStore, build_fallback_store, load_vectors
from .scores import EmbeddingTable
from .training import TrainConfig, train

MODES = ("none", "extracted-only", "linkall", "cooccurrence", "neighb", "superborrow")
BORROW_TARGETS = ("train", "valid", "test")


class StageError(RuntimeError):
    """An error in a named pipeline stage."""

    def __init__(self, stage: str, cause: BaseException):
        self.stage = stage
        super().__init__(f"[{stage}] {cause}")


def _stage_seed(seed: int, stage: str) -> int:
    digest = hashlib.blake2b(f"{seed}/{stage}".encode(), digest_size=4).digest()
    return int.from_bytes(digest, "little")


@dataclass
class RunConfig:
    train_path: str
    test_path: str
    valid_path: str | None = None
    textual_path: str | None = None
    entity_vectors_path: str | None = None
    ldp_vectors_path: str | None = None
    mode: str = "none"
    k: int | None = None
    min_pairs: int = 1
    borrow_targets: tuple[str, ...] = ("test",)
    fallback_dim: int = 768
    seed: int = 0
    out_dir: str = "run-output"
    train: TrainConfig = field(default_factory=TrainConfig)
    bootstrap: TrainConfig | None = None
    superborrow: SuperBorrowConfig = field(default_factory=SuperBorrowConfig)
    eval: EvalSettings = field(default_factory=EvalSettings)

    def validate(self) -> None:
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}; expected one of {MODES}")
        if self.mode == "superborrow":
            if self.k is None or self.k < 1:
                raise ValueError("mode superborrow requires k >= 1")
        if self.mode != "none" and not self.textual_path:
            raise ValueError(f"mode {self.mode!r} requires textual_path")
        unknown = set(self.borrow_targets) - set(BORROW_TARGETS)
        if unknown:
            raise ValueError(f"unknown borrow targets {sorted(unknown)}")
        for name in ("train_path", "valid_path", "test_path", "textual_path",
                     "entity_vectors_path", "ldp_vectors_path"):
            path = getattr(self, name)
            if path is not None and not os.path.exists(path):
                raise FileNotFoundError(f"{name}: no such file {path!r}")

    def to_dict(self) -> dict:
        out = dataclasses.asdict(self)
        out["borrow_targets"] = list(self.borrow_targets)
        out["train"]["corruption_modes"] = list(self.train.corruption_modes)
        if out["bootstrap"] is not None:
            out["bootstrap"]["corruption_modes"] = list(self.bootstrap.corruption_modes)
        out["eval"]["slices"] = list(self.eval.slices)
        return out

    @classmethod
    def from_dict(cls, raw: dict) -> "RunConfig":
        raw = dict(raw)
        if "train" in raw and isinstance(raw["train"], dict):
            tr = dict(raw["train"])
            if "corruption_modes" in tr:
                tr["corruption_modes"] = tuple(tr["corruption_modes"])
            raw["train"] = TrainConfig(**tr)
        if raw.get("bootstrap") is not None and isinstance(raw["bootstrap"], dict):
            bo = dict(raw["bootstrap"])
            if "corruption_modes" in bo:
                bo["corruption_modes"] = tuple(bo["corruption_modes"])
            raw["bootstrap"] = TrainConfig(**bo)
        if "superborrow" in raw and isinstance(raw["superborrow"], dict):
            raw["superborrow"] = SuperBorrowConfig(**raw["superborrow"])
        if "eval" in raw and isinstance(raw["eval"], dict):
            ev = dict(raw["eval"])
            if "slices" in ev:
                ev["slices"] = tuple(ev["slices"])
            raw["eval"] = EvalSettings(**ev)
        if "borrow_targets" in raw:
            raw["borrow_targets"] = tuple(raw["borrow_targets"])
        return cls(**raw)

    @classmethod
    def from_json_file(cls, path) -> "RunConfig":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


# ---------------------------------------------------------------------------
# Embedding export


_KIND_TOKENS = {("transe", 1): "transe", ("transe", 2): "transe-l2"}


def _table_kind_token(table: EmbeddingTable) -> str:
    if table.model_kind == "transe":
        return _KIND_TOKENS[("transe", table.transe_norm)]
    return table.model_kind


def _interleave(matrix: np.ndarray, dim: int) -> np.ndarray:
    out = np.empty_like(matrix)
    out[:, 0::2] = matrix[:, :dim]
    out[:, 1::2] = matrix[:, dim:]
    return out


def _deinterleave(matrix: np.ndarray, dim: int) -> np.ndarray:
    out = np.empty_like(matrix)
    out[:, :dim] = matrix[:, 0::2]
    out[:, dim:] = matrix[:, 1::2]
    return out


def relations_path_for(path: str) -> str:
    stem, suffix = os.path.splitext(path)
    return f"{stem}.relations{suffix}"


def export_embeddings(table: EmbeddingTable, path, fmt: str = "text") -> None:
    """Dump a table's entity matrix at ``path`` and relations alongside.

    Complex-valued rows are stored with interleaved re,im columns; rotate
    relation rows are phase angles stored plainly. Text files round-trip
    float64 exactly; binary files are little-endian float32.
    """
    if fmt not in ("text", "binary"):
        raise ValueError(f"format must be 'text' or 'binary', got {fmt!r}")
    if not table.is_finite():
        raise ValueError("refusing to export a table with non-finite values")
    kind = _table_kind_token(table)
    ent = table.entity_vectors
    rel = table.relation_vectors
    if table.model_kind in ("complex", "rotate"):
        ent = _interleave(ent, table.dim)
    if table.model_kind == "complex":
        rel = _interleave(rel, table.dim)
    write = write_matrix_text if fmt == "text" else write_matrix_binary
    write(path, ent, kind)
    write(relations_path_for(path), rel, kind)


def load_embeddings(path, fmt: str = "text") -> EmbeddingTable:
    read = read_matrix_text if fmt == "text" else read_matrix_binary
    ent, kind = read(path)
    rel, rel_kind = read(relations_path_for(path))
    if kind is None or kind != rel_kind:
        raise ValueError(f"{path}: entity/relation dumps disagree on model kind")
    transe_norm = 2 if kind == "transe-l2" else 1
    model_kind = "transe" if kind.startswith("transe") else kind
    if model_kind in ("complex", "rotate"):
        dim = ent.shape[1] // 2
        ent = _deinterleave(ent, dim)
    else:
        dim = ent.shape[1]
    if model_kind == "complex":
        rel = _deinterleave(rel, dim)
    return EmbeddingTable(model_kind, dim, ent, rel, transe_norm)


# ---------------------------------------------------------------------------
# Stages


def _ordered_pairs(triples) -> list[tuple[int, int]]:
    seen: set[tuple[int, int]] = set()
    out = []
    for h, _, t in triples:
        if (h, t) not in seen:
            seen.add((h, t))
            out.append((h, t))
    return out


def borrow_target_pairs(
    kg: KnowledgeGraph, corpus: TextualTriples, targets
) -> list[tuple[int, int]]:
    """Ordered pairs of the chosen splits that have no textual mention."""
    mentioned = corpus.ordered_pairs()
    splits = {"train": kg.train, "valid": kg.valid, "test": kg.test}
    seen: set[tuple[int, int]] = set()
    out: list[tuple[int, int]] = []
    for name in BORROW_TARGETS:
        if name not in targets:
            continue
        for pair in _ordered_pairs(splits[name]):
            if pair not in mentioned and pair not in seen:
                seen.add(pair)
                out.append(pair)
    return out


def _entity_vectors_for(config: RunConfig, kg: KnowledgeGraph) -> np.ndarray:
    """Pretrained entity vectors from file, or a bootstrap training run."""
    if config.entity_vectors_path:
        # the keyed-vector loader enforces full coverage of the vocabulary
        store = load_vectors(config.entity_vectors_path, kg.entities)
        return np.asarray(store.vectors, dtype=np.float64)
    bootstrap = config.bootstrap or TrainConfig(
        model_kind="transe", dim=50, learning_rate=0.1, epochs=50,
        negatives_per_positive=5, loss_kind="margin", margin=5.0,
    )
    bootstrap = dataclasses.replace(bootstrap, rng_seed=_stage_seed(config.seed, "bootstrap"))
    return train(kg, bootstrap).table.entity_vectors.copy()


def _ldp_store_for(config: RunConfig, corpus: TextualTriples) -> LdpVectorStore:
    if config.ldp_vectors_path:
        return load_vectors(config.ldp_vectors_path, corpus.ldps)
    return build_fallback_store(
        corpus.ldps, dim=config.fallback_dim, seed=_stage_seed(config.seed, "fallback")
    )


def _encoder_corpus(kg: KnowledgeGraph, corpus: TextualTriples) -> TextualTriples:
    """Corpus restricted to pairs outside valid/test, for encoder training."""
    eval_pairs = {(h, t) for h, _, t in kg.valid} | {(h, t) for h, _, t in kg.test}
    kept = [tt for tt in corpus.triples if (tt.head, tt.tail) not in eval_pairs]
    return TextualTriples(corpus.ldps, kept)


def compute_borrowed(
    config: RunConfig,
    kg: KnowledgeGraph,
    corpus: TextualTriples,
) -> TextualTriples | None:
    """The mode-specific triples added on top of the extracted corpus."""
    if config.mode in ("none", "extracted-only"):
        return None
    targets = borrow_target_pairs(kg, corpus, config.borrow_targets)
    if config.mode == "cooccurrence":
        return borrowing.cooccurrence_augment(_ordered_pairs(corpus.triples))
    if config.mode == "linkall":
        return borrowing.linkall_augment(targets)
    entity_vectors = _entity_vectors_for(config, kg)
    if config.mode == "neighb":
        index = borrowing.TextualIndex(corpus)
        return borrowing.neighb_borrow_triples(
            targets, index.pairs, entity_vectors, index, corpus.ldps
        )
    # superborrow
    store = _ldp_store_for(config, corpus)
    trainset = build_borrow_train_set(_encoder_corpus(kg, corpus))
    sb_cfg = dataclasses.replace(
        config.superborrow, rng_seed=_stage_seed(config.seed, "superborrow")
    )
    result = train_superborrow(trainset, entity_vectors, store, sb_cfg)
    return borrow_topk(result.encoder, targets, config.k, entity_vectors, store)


def augmented_graph(
    config: RunConfig,
    kg: KnowledgeGraph,
    corpus: TextualTriples,
    borrowed: TextualTriples | None,
) -> KnowledgeGraph:
    """Compose the training graph for the configured mode.

    Every mode except ``none`` and ``cooccurrence`` keeps the extracted
    corpus triples; the co-occurrence baseline replaces them with its
    generic relation.
    """
    if config.mode == "none":
        return kg
    if config.mode == "cooccurrence":
        return augment(kg, borrowed)
    out = augment(kg, corpus)
    if borrowed is not None:
        out = augment(out, borrowed)
    return out


# ---------------------------------------------------------------------------
# The run driver


@dataclass
class RunOutcome:
    report: EvalReport
    table: EmbeddingTable
    graph: KnowledgeGraph
    split: MentionSplit
    out_dir: str
    manifest: dict


def _sha256(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(65536), b""):
            digest.update(block)
    return digest.hexdigest()


def run(config: RunConfig) -> RunOutcome:
    """Execute the full pipeline and write artifacts under ``out_dir``.

    Raises :class:`StageError` naming the failing stage; on failure the
    manifest records the stages completed so far and is flagged partial.
    """
    config.validate()
    os.makedirs(config.out_dir, exist_ok=True)
    config_json = json.dumps(config.to_dict(), indent=2, sort_keys=True) + "\n"
    manifest: dict = {
        "config_hash": hashlib.sha256(config_json.encode()).hexdigest(),
        "seed": config.seed,
        "mode": config.mode,
        "stages": [],
        "artifacts": {},
        "partial": True,
    }

    def artifact(name: str, path: str) -> None:
        manifest["artifacts"][name] = {"path": os.path.basename(path), "sha256": _sha256(path)}

    def finish_stage(name: str) -> None:
        manifest["stages"].append({"name": name, "status": "ok"})

    def write_manifest() -> None:
        with open(os.path.join(config.out_dir, "manifest.json"), "w", encoding="utf-8") as fh:
            fh.write(json.dumps(manifest, indent=2, sort_keys=True) + "\n")

    stage = "config"
    try:
        config_path = os.path.join(config.out_dir, "config.json")
        with open(config_path, "w", encoding="utf-8") as fh:
            fh.write(config_json)
        artifact("config", config_path)
        finish_stage(stage)

        stage = "load"
        kg = load_knowledge_graph(config.train_path, config.valid_path, config.test_path)
        finish_stage(stage)

        stage = "textual"
        if config.textual_path:
            corpus = load_textual_triples(config.textual_path, kg.entities, config.min_pairs).corpus
        else:
            corpus = TextualTriples(Vocabulary(), [])
        finish_stage(stage)

        stage = "split"
        split = split_mentions(kg.test, corpus)
        finish_stage(stage)

        stage = "borrow"
        borrowed = compute_borrowed(config, kg, corpus)
        if borrowed is not None:
            borrowed_path = os.path.join(config.out_dir, "borrowed.tsv")
            save_textual_triples(borrowed_path, borrowed, kg.entities)
            artifact("borrowed", borrowed_path)
        finish_stage(stage)

        stage = "augment"
        graph = augmented_graph(config, kg, corpus, borrowed)
        finish_stage(stage)

        stage = "train"
        train_cfg = dataclasses.replace(config.train, rng_seed=_stage_seed(config.seed, "train"))
        result = train(graph, train_cfg)
        trace_path = os.path.join(config.out_dir, "loss_trace.csv")
        write_loss_trace(trace_path, result.epoch_losses)
        artifact("loss_trace", trace_path)
        embeddings_path = os.path.join(config.out_dir, "embeddings.tsv")
        export_embeddings(result.table, embeddings_path, "text")
        artifact("embeddings", embeddings_path)
        artifact("embeddings_relations", relations_path_for(embeddings_path))
        finish_stage(stage)

        stage = "evaluate"
        report = evaluate(result.table, graph, split, config.eval)
        report_json_path = os.path.join(config.out_dir, "report.json")
        with open(report_json_path, "w", encoding="utf-8") as fh:
            fh.write(report.to_json())
        artifact("report_json", report_json_path)
        report_md_path = os.path.join(config.out_dir, "report.md")
        with open(report_md_path, "w", encoding="utf-8") as fh:
            fh.write(report.to_markdown())
        artifact("report_md", report_md_path)
        finish_stage(stage)

        manifest["partial"] = False
        write_manifest()
        return RunOutcome(report, result.table, graph, split, config.out_dir, manifest)
    except StageError:
        write_manifest()
        raise
    except Exception as err:
        manifest["stages"].append({"name": stage, "status": "failed"})
        write_manifest()
        raise StageError(stage, err) from err
