"""Negative sampling and the embedding training loop.

Training follows the usual contrastive recipe: every epoch shuffles the
training triples into a fixed number of batches; each positive triple is
paired with ``negatives_per_positive`` corrupted copies; scores flow
through the configured loss and the gradients are applied with sparse
AdaGrad. With a fixed seed the run is bit-identical in sequential mode,
and the negatives of each batch are derived from a per-batch seed.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from .kg import KnowledgeGraph, Triple
from .losses import LOSS_KINDS, compute_loss
from .optim import AdaGradState, NonFiniteGradientError, adagrad_step
from .scores import MODEL_KINDS, EmbeddingTable, init_embeddings, score_and_grads

logger = logging.getLogger(__name__)

CORRUPTION_MODES = ("head", "tail", "relation")

# Link-prediction defaults per model: learning rate, dimension, negatives
# per positive, loss, margin, epochs. AdaGrad with 100 batches per epoch.
PAPER_HYPERPARAMETERS = {
    "transe": {"learning_rate": 1.0, "dim": 300, "negatives_per_positive": 25,
               "loss_kind": "margin", "margin": 5.0, "epochs": 1000},
    "distmult": {"learning_rate": 0.5, "dim": 300, "negatives_per_positive": 25,
                 "loss_kind": "softplus", "margin": None, "epochs": 1000},
    "complex": {"learning_rate": 0.5, "dim": 100, "negatives_per_positive": 25,
                "loss_kind": "softplus", "margin": None, "epochs": 1000},
    "rotate": {"learning_rate": 2e-5, "dim": 300, "negatives_per_positive": 25,
               "loss_kind": "sigmoid", "margin": 9.0, "epochs": 1000},
}


class TrainingError(RuntimeError):
    """Non-finite values encountered during training, with location."""


@dataclass
class TrainConfig:
    model_kind: str = "transe"
    dim: int = 100
    learning_rate: float = 0.1
    epochs: int = 100
    negatives_per_positive: int = 25
    loss_kind: str = "margin"
    margin: float | None = 5.0
    batches_per_epoch: int = 100
    corruption_modes: tuple[str, ...] = ("head", "tail")
    rng_seed: int = 0
    transe_norm: int = 1
    adagrad_epsilon: float = 1e-10
    collision_retries: int = 10

    def __post_init__(self):
        if self.model_kind not in MODEL_KINDS:
            raise ValueError(f"unknown model kind {self.model_kind!r}")
        if self.loss_kind not in LOSS_KINDS:
            raise ValueError(f"unknown loss kind {self.loss_kind!r}")
        if self.negatives_per_positive < 1:
            raise ValueError("negatives_per_positive must be >= 1")
        if self.loss_kind in ("margin", "sigmoid") and (self.margin is None or self.margin <= 0):
            raise ValueError(f"{self.loss_kind} loss requires margin > 0, got {self.margin}")
        if self.epochs < 0 or self.batches_per_epoch < 1:
            raise ValueError("epochs must be >= 0 and batches_per_epoch >= 1")
        modes = tuple(self.corruption_modes)
        if not modes or any(m not in CORRUPTION_MODES for m in modes):
            raise ValueError(f"corruption_modes must be a nonempty subset of {CORRUPTION_MODES}")
        self.corruption_modes = modes

    @classmethod
    def paper_defaults(cls, model_kind: str, **overrides) -> "TrainConfig":
        params = dict(PAPER_HYPERPARAMETERS[model_kind])
        params.update(overrides)
        return cls(model_kind=model_kind, **params)


@dataclass
class TrainResult:
    table: EmbeddingTable
    epoch_losses: list[float] = field(default_factory=list)


def _resample_distinct(rng: np.random.Generator, original: np.ndarray, size: int) -> np.ndarray:
    """Uniform draw over [0, size) excluding the original value per entry."""
    draw = rng.integers(0, size - 1, size=original.shape, dtype=np.int64)
    return draw + (draw >= original)


def sample_negatives(
    triple: Triple,
    mode: str,
    n: int,
    kg: KnowledgeGraph,
    rng: np.random.Generator,
    max_retries: int = 10,
) -> list[Triple]:
    """Corrupt one slot of a triple n times, avoiding known training triples.

    Candidates are uniform over the full entity (or relation) vocabulary,
    always different from the original slot value. A candidate that forms a
    known training triple is resampled up to ``max_retries`` times and then
    kept.
    """
    if mode not in CORRUPTION_MODES:
        raise ValueError(f"unknown corruption mode {mode!r}")
    if n < 1:
        raise ValueError("n must be >= 1")
    size = kg.num_relations if mode == "relation" else kg.num_entities
    if size < 2:
        raise ValueError(f"cannot corrupt the {mode} slot with a vocabulary of size {size}")
    slot = {"head": 0, "relation": 1, "tail": 2}[mode]
    original = np.full(n, triple[slot], dtype=np.int64)
    values = _resample_distinct(rng, original, size)
    train_set = set(kg.train)

    def build(v: int) -> Triple:
        parts = list(triple)
        parts[slot] = int(v)
        return Triple(*parts)

    out = [build(v) for v in values]
    for i, candidate in enumerate(out):
        retries = 0
        while candidate in train_set and retries < max_retries:
            candidate = build(_resample_distinct(rng, original[:1], size)[0])
            retries += 1
        out[i] = candidate
    return out


def _encode(h: np.ndarray, r: np.ndarray, t: np.ndarray, n_ent: int, n_rel: int) -> np.ndarray:
    return (h.astype(np.int64) * n_rel + r) * n_ent + t


def _sample_negative_batch(
    pos: np.ndarray,
    n_neg: int,
    modes: tuple[str, ...],
    n_ent: int,
    n_rel: int,
    train_codes: np.ndarray,
    rng: np.random.Generator,
    max_retries: int,
) -> np.ndarray:
    """Vectorised corruption of a (B, 3) positive block into (B, n_neg, 3)."""
    b = pos.shape[0]
    neg = np.repeat(pos[:, None, :], n_neg, axis=1)
    slot_of_mode = np.array([{"head": 0, "relation": 1, "tail": 2}[m] for m in modes])
    slots = slot_of_mode[rng.integers(0, len(modes), size=(b, n_neg))]
    sizes = np.where(slots == 1, n_rel, n_ent)
    rows, cols = np.indices((b, n_neg))
    original = neg[rows, cols, slots].copy()
    draw = rng.integers(0, sizes - 1, dtype=np.int64)
    neg[rows, cols, slots] = draw + (draw >= original)
    codes = _encode(neg[..., 0], neg[..., 1], neg[..., 2], n_ent, n_rel)
    collides = np.isin(codes, train_codes, assume_unique=False)
    for _ in range(max_retries):
        if not collides.any():
            break
        idx = np.nonzero(collides)
        sub_sizes = sizes[idx]
        sub_orig = original[idx]
        draw = rng.integers(0, sub_sizes - 1, dtype=np.int64)
        neg[idx[0], idx[1], slots[idx]] = draw + (draw >= sub_orig)
        codes = _encode(neg[..., 0], neg[..., 1], neg[..., 2], n_ent, n_rel)
        collides = np.isin(codes, train_codes)
    return neg


def _scatter_rows(ids: np.ndarray, grads: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Sum per-example gradient rows that hit the same parameter row."""
    unique, inverse = np.unique(ids, return_inverse=True)
    summed = np.zeros((unique.shape[0], grads.shape[1]), dtype=np.float64)
    np.add.at(summed, inverse, grads)
    return unique, summed


def train(kg: KnowledgeGraph, cfg: TrainConfig) -> TrainResult:
    """Train an embedding table on the (possibly augmented) training set.

    The recorded trace holds one mean loss per epoch (total batch loss
    divided by the number of positive triples). With ``epochs=0`` the
    seed-controlled initialisation is returned unchanged.
    """
    if not kg.train:
        raise ValueError("cannot train on an empty training set")
    for mode in cfg.corruption_modes:
        size = kg.num_relations if mode == "relation" else kg.num_entities
        if size < 2:
            raise ValueError(f"cannot corrupt the {mode} slot with a vocabulary of size {size}")
    init_rng = np.random.default_rng(np.random.SeedSequence([cfg.rng_seed, 0]))
    table = init_embeddings(
        cfg.model_kind, kg.num_entities, kg.num_relations, cfg.dim, init_rng, cfg.transe_norm
    )
    if cfg.epochs == 0:
        return TrainResult(table, [])

    triples = np.asarray(kg.train, dtype=np.int64)
    n_ent, n_rel = kg.num_entities, kg.num_relations
    train_codes = np.sort(_encode(triples[:, 0], triples[:, 1], triples[:, 2], n_ent, n_rel))
    ent_state = AdaGradState.for_params(table.entity_vectors, cfg.adagrad_epsilon)
    rel_state = AdaGradState.for_params(table.relation_vectors, cfg.adagrad_epsilon)
    shuffle_rng = np.random.default_rng(np.random.SeedSequence([cfg.rng_seed, 1]))

    epoch_losses: list[float] = []
    for epoch in range(cfg.epochs):
        order = shuffle_rng.permutation(triples.shape[0])
        chunks = [c for c in np.array_split(order, cfg.batches_per_epoch) if c.size]
        epoch_loss = 0.0
        for batch_idx, chunk in enumerate(chunks):
            batch_rng = np.random.default_rng(
                np.random.SeedSequence([cfg.rng_seed, 2, epoch, batch_idx])
            )
            pos = triples[chunk]
            neg = _sample_negative_batch(
                pos, cfg.negatives_per_positive, cfg.corruption_modes,
                n_ent, n_rel, train_codes, batch_rng, cfg.collision_retries,
            )
            try:
                epoch_loss += _apply_batch(table, ent_state, rel_state, cfg, pos, neg)
            except NonFiniteGradientError as err:
                raise TrainingError(f"epoch {epoch}, batch {batch_idx}: {err}") from None
        mean_loss = epoch_loss / triples.shape[0]
        epoch_losses.append(mean_loss)
        if not table.is_finite():
            raise TrainingError(f"epoch {epoch}: non-finite parameters after update")
    return TrainResult(table, epoch_losses)


def _apply_batch(table, ent_state, rel_state, cfg, pos, neg) -> float:
    flat = neg.reshape(-1, 3)
    pos_scores, pgh, pgr, pgt = score_and_grads(table, pos[:, 0], pos[:, 1], pos[:, 2])
    neg_scores, ngh, ngr, ngt = score_and_grads(table, flat[:, 0], flat[:, 1], flat[:, 2])
    loss, dpos, dneg = compute_loss(
        cfg.loss_kind, pos_scores, neg_scores.reshape(pos.shape[0], -1), cfg.margin
    )
    dneg_flat = dneg.reshape(-1)

    ent_ids = np.concatenate([pos[:, 0], pos[:, 2], flat[:, 0], flat[:, 2]])
    ent_grads = np.concatenate([
        pgh * dpos[:, None], pgt * dpos[:, None],
        ngh * dneg_flat[:, None], ngt * dneg_flat[:, None],
    ])
    rel_ids = np.concatenate([pos[:, 1], flat[:, 1]])
    rel_grads = np.concatenate([pgr * dpos[:, None], ngr * dneg_flat[:, None]])

    rows, grads = _scatter_rows(ent_ids, ent_grads)
    adagrad_step(table.entity_vectors, grads, ent_state, cfg.learning_rate, rows)
    rows, grads = _scatter_rows(rel_ids, rel_grads)
    adagrad_step(table.relation_vectors, grads, rel_state, cfg.learning_rate, rows)
    return loss
