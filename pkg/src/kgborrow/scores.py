"""Triple score functions and their analytic gradients.

All four models score a triple (h, r, t) so that *higher is better*; the
two distance-based models return negated distances so one ranking
comparator works everywhere:

* ``transe``:   -||h + r - t||_p      (p = 1 or 2)
* ``distmult``: sum_i h_i r_i t_i
* ``complex``:  Re<h, r, conj(t)>     (h, r, t complex)
* ``rotate``:   -||h o r - t||^2      (h, t complex; r a unit rotation)

Complex-valued parameters are stored as real matrices with the real parts
in the first ``dim`` columns and imaginary parts in the last ``dim``
columns. RotatE relations are stored as phase angles, so every relation
coordinate has unit modulus by construction.
"""

from dataclasses import dataclass

import numpy as np

MODEL_KINDS = ("transe", "distmult", "complex", "rotate")

# Per-coordinate widths of the parameter rows, as multiples of dim.
_ENTITY_WIDTH = {"transe": 1, "distmult": 1, "complex": 2, "rotate": 2}
_RELATION_WIDTH = {"transe": 1, "distmult": 1, "complex": 2, "rotate": 1}


@dataclass
class EmbeddingTable:
    """Trainable per-entity and per-relation parameter vectors."""

    model_kind: str
    dim: int
    entity_vectors: np.ndarray
    relation_vectors: np.ndarray
    transe_norm: int = 1

    def __post_init__(self):
        if self.model_kind not in MODEL_KINDS:
            raise ValueError(f"unknown model kind {self.model_kind!r}")
        if self.transe_norm not in (1, 2):
            raise ValueError(f"transe_norm must be 1 or 2, got {self.transe_norm}")
        if self.entity_vectors.shape[1] != self.entity_width:
            raise ValueError(
                f"entity rows must have width {self.entity_width}, "
                f"got {self.entity_vectors.shape[1]}"
            )
        if self.relation_vectors.shape[1] != self.relation_width:
            raise ValueError(
                f"relation rows must have width {self.relation_width}, "
                f"got {self.relation_vectors.shape[1]}"
            )

    @property
    def entity_width(self) -> int:
        return _ENTITY_WIDTH[self.model_kind] * self.dim

    @property
    def relation_width(self) -> int:
        return _RELATION_WIDTH[self.model_kind] * self.dim

    @property
    def num_entities(self) -> int:
        return self.entity_vectors.shape[0]

    @property
    def num_relations(self) -> int:
        return self.relation_vectors.shape[0]

    def is_finite(self) -> bool:
        return bool(
            np.all(np.isfinite(self.entity_vectors))
            and np.all(np.isfinite(self.relation_vectors))
        )

    def relation_moduli(self) -> np.ndarray:
        """Coordinate-wise complex moduli of the relation vectors (rotate only)."""
        if self.model_kind != "rotate":
            raise ValueError("relation_moduli is only defined for rotate tables")
        return np.hypot(np.cos(self.relation_vectors), np.sin(self.relation_vectors))

    def copy(self) -> "EmbeddingTable":
        return EmbeddingTable(
            self.model_kind,
            self.dim,
            self.entity_vectors.copy(),
            self.relation_vectors.copy(),
            self.transe_norm,
        )


def init_embeddings(
    model_kind: str,
    num_entities: int,
    num_relations: int,
    dim: int,
    rng: np.random.Generator,
    transe_norm: int = 1,
) -> EmbeddingTable:
    """Seed-controlled uniform init in [-6/sqrt(d), +6/sqrt(d)] per coordinate."""
    bound = 6.0 / np.sqrt(dim)
    ent = rng.uniform(-bound, bound, size=(num_entities, _ENTITY_WIDTH[model_kind] * dim))
    rel = rng.uniform(-bound, bound, size=(num_relations, _RELATION_WIDTH[model_kind] * dim))
    return EmbeddingTable(model_kind, dim, ent, rel, transe_norm)


def _split(x: np.ndarray, d: int) -> tuple[np.ndarray, np.ndarray]:
    return x[..., :d], x[..., d:]


def score_batch(table: EmbeddingTable, h, r, t) -> np.ndarray:
    """Scores for aligned id arrays of shape (B,)."""
    H = table.entity_vectors[h]
    R = table.relation_vectors[r]
    T = table.entity_vectors[t]
    return _score_rows(table, H, R, T)


def _score_rows(table: EmbeddingTable, H, R, T) -> np.ndarray:
    d = table.dim
    kind = table.model_kind
    if kind == "transe":
        diff = H + R - T
        if table.transe_norm == 1:
            return -np.abs(diff).sum(axis=-1)
        return -np.sqrt((diff * diff).sum(axis=-1))
    if kind == "distmult":
        return (H * R * T).sum(axis=-1)
    if kind == "complex":
        hr, hi = _split(H, d)
        rr, ri = _split(R, d)
        tr, ti = _split(T, d)
        return (hr * rr * tr + hi * rr * ti + hr * ri * ti - hi * ri * tr).sum(axis=-1)
    # rotate
    hr, hi = _split(H, d)
    tr, ti = _split(T, d)
    c, s = np.cos(R), np.sin(R)
    dre = hr * c - hi * s - tr
    dim_ = hr * s + hi * c - ti
    return -(dre * dre + dim_ * dim_).sum(axis=-1)


def score(table: EmbeddingTable, h: int, r: int, t: int) -> float:
    """Score a single triple; deterministic for fixed inputs."""
    return float(score_batch(table, np.asarray([h]), np.asarray([r]), np.asarray([t]))[0])


def score_and_grads(table: EmbeddingTable, h, r, t):
    """Scores plus gradients of each score w.r.t. its h, r and t rows.

    Returns ``(scores, grad_h, grad_r, grad_t)`` where the gradient arrays
    have shape (B, entity_width) / (B, relation_width).
    """
    d = table.dim
    kind = table.model_kind
    H = table.entity_vectors[h]
    R = table.relation_vectors[r]
    T = table.entity_vectors[t]
    if kind == "transe":
        diff = H + R - T
        if table.transe_norm == 1:
            scores = -np.abs(diff).sum(axis=-1)
            g = -np.sign(diff)
        else:
            norms = np.sqrt((diff * diff).sum(axis=-1))
            scores = -norms
            g = -diff / np.maximum(norms, 1e-300)[:, None]
        return scores, g, g.copy(), -g
    if kind == "distmult":
        scores = (H * R * T).sum(axis=-1)
        return scores, R * T, H * T, H * R
    if kind == "complex":
        hr, hi = _split(H, d)
        rr, ri = _split(R, d)
        tr, ti = _split(T, d)
        scores = (hr * rr * tr + hi * rr * ti + hr * ri * ti - hi * ri * tr).sum(axis=-1)
        gh = np.concatenate([rr * tr + ri * ti, rr * ti - ri * tr], axis=-1)
        gr = np.concatenate([hr * tr + hi * ti, hr * ti - hi * tr], axis=-1)
        gt = np.concatenate([hr * rr - hi * ri, hi * rr + hr * ri], axis=-1)
        return scores, gh, gr, gt
    # rotate
    hr, hi = _split(H, d)
    tr, ti = _split(T, d)
    c, s = np.cos(R), np.sin(R)
    dre = hr * c - hi * s - tr
    dim_ = hr * s + hi * c - ti
    scores = -(dre * dre + dim_ * dim_).sum(axis=-1)
    gh = -2.0 * np.concatenate([dre * c + dim_ * s, -dre * s + dim_ * c], axis=-1)
    gr = -2.0 * (dre * (-(hr * s + hi * c)) + dim_ * (hr * c - hi * s))
    gt = 2.0 * np.concatenate([dre, dim_], axis=-1)
    return scores, gh, gr, gt


def score_all_tails(table: EmbeddingTable, h: int, r: int) -> np.ndarray:
    """Scores of (h, r, t) for every entity t; shape (num_entities,)."""
    H = table.entity_vectors[h][None, :]
    R = table.relation_vectors[r][None, :]
    return _score_rows(table, H, R, table.entity_vectors)


def score_all_heads(table: EmbeddingTable, r: int, t: int) -> np.ndarray:
    """Scores of (h, r, t) for every entity h."""
    R = table.relation_vectors[r][None, :]
    T = table.entity_vectors[t][None, :]
    return _score_rows(table, table.entity_vectors, R, T)


def score_all_relations(table: EmbeddingTable, h: int, t: int, relation_ids) -> np.ndarray:
    """Scores of (h, r, t) for the given candidate relation ids."""
    relation_ids = np.asarray(relation_ids)
    H = table.entity_vectors[h][None, :]
    T = table.entity_vectors[t][None, :]
    return _score_rows(table, H, table.relation_vectors[relation_ids], T)
