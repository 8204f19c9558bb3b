"""Borrowing textual relations for entity pairs that lack mentions.

The supervised borrower encodes an entity pair into the LDP vector space
with a small MLP and ranks every known LDP by inner product against that
encoding. Training pushes each pair's observed LDPs above LDPs seen with
only one of its endpoints, using a margin ranking objective. Unsupervised
baselines (nearest-neighbour borrowing, a generic co-occurrence relation,
one fresh link per pair) share the same output type so every strategy
composes with graph augmentation the same way.
"""

import logging
from collections import defaultdict
from dataclasses import dataclass, replace

import numpy as np

from .kg import TextualTriple, TextualTriples, Vocabulary
from .ldpspace import LdpVectorStore

logger = logging.getLogger(__name__)

# Borrowed-LDP counts selected on validation data at full scale.
OPTIMAL_K = {"transe": 30, "distmult": 20, "complex": 15, "rotate": 25}
K_GRID = (1, 3, 10, 15, 20, 25, 30)

SUPERBORROW_GRID = {
    "hidden_layers": (2, 3),
    "l2": (0.0, 0.01, 0.001),
    "learning_rate": (0.01, 0.1),
    "activation": ("tanh", "relu", "sigmoid"),
}


def pair_features(h_vec: np.ndarray, t_vec: np.ndarray) -> np.ndarray:
    """Feature map [h + t + (h - t) + (h * t)] (+ is concatenation)."""
    h_vec = np.asarray(h_vec, dtype=np.float64)
    t_vec = np.asarray(t_vec, dtype=np.float64)
    if h_vec.shape != t_vec.shape or h_vec.ndim != 1:
        raise ValueError(f"expected equal-length vectors, got {h_vec.shape} and {t_vec.shape}")
    return np.concatenate([h_vec, t_vec, h_vec - t_vec, h_vec * t_vec])


def pair_features_batch(heads: np.ndarray, tails: np.ndarray) -> np.ndarray:
    """Row-wise feature map for (B, d) head and tail vector blocks."""
    if heads.shape != tails.shape:
        raise ValueError(f"shape mismatch: {heads.shape} vs {tails.shape}")
    return np.concatenate([heads, tails, heads - tails, heads * tails], axis=1)


class TextualIndex:
    """Lookup structures over a textual corpus for pool construction."""

    def __init__(self, corpus: TextualTriples):
        self.pair_ldps: dict[tuple[int, int], set[int]] = defaultdict(set)
        self._by_head: dict[int, set[tuple[int, int]]] = defaultdict(set)
        self._by_tail: dict[int, set[tuple[int, int]]] = defaultdict(set)
        for h, ldp, t in corpus.triples:
            self.pair_ldps[(h, t)].add(ldp)
            self._by_head[h].add((ldp, t))
            self._by_tail[t].add((ldp, h))
        self.pairs: list[tuple[int, int]] = []
        seen = set()
        for h, _, t in corpus.triples:
            if (h, t) not in seen:
                seen.add((h, t))
                self.pairs.append((h, t))

    def positive_ldps(self, pair: tuple[int, int]) -> set[int]:
        return set(self.pair_ldps.get(pair, set()))


def build_negative_pool(pair: tuple[int, int], index: TextualIndex) -> set[int]:
    """LDPs seen with the pair's head or tail alone, minus its own LDPs.

    This is the union of LDPs connecting h to some other tail and LDPs
    connecting some other head to t, with the pair's positive LDPs
    removed. An empty pool is allowed; such pairs are skipped (and
    counted) during encoder training.
    """
    h, t = pair
    pool = {ldp for ldp, t2 in index._by_head.get(h, ()) if t2 != t}
    pool |= {ldp for ldp, h2 in index._by_tail.get(t, ()) if h2 != h}
    return pool - index.pair_ldps.get(pair, set())


@dataclass
class BorrowTrainSet:
    """Positive textual triples grouped by pair, with per-pair negative pools."""

    pairs: list[tuple[int, int]]
    pair_positives: list[list[int]]
    pair_pools: list[np.ndarray]

    def __post_init__(self):
        if not (len(self.pairs) == len(self.pair_positives) == len(self.pair_pools)):
            raise ValueError("pairs, positives and pools must be aligned")

    @property
    def num_positives(self) -> int:
        return sum(len(p) for p in self.pair_positives)


def build_borrow_train_set(corpus: TextualTriples) -> BorrowTrainSet:
    """Positives are the distinct (h, l, t) of the corpus; pools follow the
    one-endpoint rule above."""
    index = TextualIndex(corpus)
    pairs = index.pairs
    positives = [sorted(index.pair_ldps[p]) for p in pairs]
    pools = [np.array(sorted(build_negative_pool(p, index)), dtype=np.int64) for p in pairs]
    return BorrowTrainSet(pairs, positives, pools)


# ---------------------------------------------------------------------------
# Pair encoder


_ACTIVATIONS = ("tanh", "relu", "sigmoid")


def _activate(name: str, z: np.ndarray) -> np.ndarray:
    if name == "tanh":
        return np.tanh(z)
    if name == "relu":
        return np.maximum(z, 0.0)
    return 0.5 * (1.0 + np.tanh(0.5 * z))  # sigmoid


def _activate_grad(name: str, z: np.ndarray, a: np.ndarray) -> np.ndarray:
    if name == "tanh":
        return 1.0 - a * a
    if name == "relu":
        return (z > 0.0).astype(np.float64)
    return a * (1.0 - a)


@dataclass
class PairEncoder:
    """MLP mapping pair features into the LDP vector space.

    Hidden layers use the configured activation; the output layer is
    linear so encodings can reach arbitrary inner products with
    unnormalised LDP vectors.
    """

    weights: list[np.ndarray]
    biases: list[np.ndarray]
    activation: str
    margin: float = 1.0

    def __post_init__(self):
        if self.activation not in _ACTIVATIONS:
            raise ValueError(f"unknown activation {self.activation!r}")
        if self.margin < 0:
            raise ValueError(f"margin must be >= 0, got {self.margin}")
        if len(self.weights) != len(self.biases) or not self.weights:
            raise ValueError("weights and biases must be nonempty and aligned")

    @property
    def input_dim(self) -> int:
        return self.weights[0].shape[0]

    @property
    def output_dim(self) -> int:
        return self.weights[-1].shape[1]

    def forward(self, X: np.ndarray):
        """Return (output, caches) for a (B, input_dim) batch."""
        if X.ndim != 2 or X.shape[1] != self.input_dim:
            raise ValueError(f"expected (B, {self.input_dim}) input, got {X.shape}")
        a = X
        caches = []
        for i, (W, b) in enumerate(zip(self.weights, self.biases)):
            z = a @ W + b
            if i < len(self.weights) - 1:
                out = _activate(self.activation, z)
                caches.append((a, z, out))
                a = out
            else:
                caches.append((a, z, z))
                a = z
        return a, caches

    def encode(self, X: np.ndarray) -> np.ndarray:
        return self.forward(np.asarray(X, dtype=np.float64))[0]

    def backward(self, caches, d_out: np.ndarray):
        """Gradients of a scalar loss w.r.t. weights and biases, given the
        loss gradient at the output."""
        weight_grads = [None] * len(self.weights)
        bias_grads = [None] * len(self.biases)
        delta = d_out
        for i in reversed(range(len(self.weights))):
            a_in, z, a_out = caches[i]
            if i < len(self.weights) - 1:
                delta = delta * _activate_grad(self.activation, z, a_out)
            weight_grads[i] = a_in.T @ delta
            bias_grads[i] = delta.sum(axis=0)
            if i > 0:
                delta = delta @ self.weights[i].T
        return weight_grads, bias_grads


def init_pair_encoder(
    input_dim: int,
    output_dim: int,
    rng: np.random.Generator,
    hidden_dim: int = 768,
    hidden_layers: int = 2,
    activation: str = "tanh",
    margin: float = 1.0,
) -> PairEncoder:
    """Xavier-uniform initialised encoder with ``hidden_layers`` hidden layers."""
    if hidden_layers < 1:
        raise ValueError("need at least one hidden layer")
    dims = [input_dim] + [hidden_dim] * hidden_layers + [output_dim]
    weights, biases = [], []
    for fan_in, fan_out in zip(dims[:-1], dims[1:]):
        bound = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return PairEncoder(weights, biases, activation, margin)


def hinge_loss_and_grads(
    encoder: PairEncoder,
    X: np.ndarray,
    pos_vecs: np.ndarray,
    neg_vec_rows: list[np.ndarray],
    l2: float = 0.0,
):
    """Margin ranking loss over a batch, with encoder parameter gradients.

    For each row i the loss adds max(0, margin - e_i . (l_i - l'_ij)) over
    that row's negative LDP vectors. ``l2`` adds ``l2 * sum ||W||^2`` over
    weight matrices (biases are not regularised).

    Returns ``(loss, weight_grads, bias_grads)`` where ``loss`` excludes
    the regularisation term but the gradients include it.
    """
    Y, caches = encoder.forward(X)
    d_out = np.zeros_like(Y)
    loss = 0.0
    for i, negs in enumerate(neg_vec_rows):
        if negs.shape[0] == 0:
            continue
        diffs = pos_vecs[i][None, :] - negs
        slack = encoder.margin - diffs @ Y[i]
        active = slack > 0
        if active.any():
            loss += float(slack[active].sum())
            d_out[i] = -diffs[active].sum(axis=0)
    weight_grads, bias_grads = encoder.backward(caches, d_out)
    if l2:
        for g, W in zip(weight_grads, encoder.weights):
            g += 2.0 * l2 * W
    return loss, weight_grads, bias_grads


@dataclass
class SuperBorrowConfig:
    hidden_layers: int = 2
    hidden_dim: int = 768
    activation: str = "tanh"
    learning_rate: float = 0.01
    l2: float = 0.0
    momentum: float = 0.9
    epochs: int = 50
    batch_size: int = 128
    negatives_per_pair: int = 100
    holdout_fraction: float = 0.1
    margin: float = 1.0
    rng_seed: int = 0


@dataclass
class SuperBorrowResult:
    encoder: PairEncoder
    epoch_losses: list[float]
    validation_mrr: float
    skipped_pairs: int
    config: SuperBorrowConfig
    holdout_pairs: list[int]


def _holdout_split(n_pairs: int, fraction: float, rng: np.random.Generator):
    order = rng.permutation(n_pairs)
    n_holdout = int(round(n_pairs * fraction))
    return np.sort(order[n_holdout:]), np.sort(order[:n_holdout])


def _retrieval_mrr(
    encoder: PairEncoder,
    trainset: BorrowTrainSet,
    pair_indices: np.ndarray,
    entity_vectors: np.ndarray,
    ldp_vectors: np.ndarray,
    negatives_per_pair: int,
    rng: np.random.Generator,
) -> float:
    """Mean reciprocal rank of each positive LDP among itself plus sampled
    pool negatives, under the encoder's inner-product scores."""
    reciprocal = []
    for idx in pair_indices:
        pool = trainset.pair_pools[idx]
        if pool.size == 0:
            continue
        h, t = trainset.pairs[idx]
        e = encoder.encode(pair_features(entity_vectors[h], entity_vectors[t])[None, :])[0]
        sampled = rng.choice(pool, size=min(negatives_per_pair, pool.size), replace=False)
        neg_scores = ldp_vectors[sampled] @ e
        for ldp in trainset.pair_positives[idx]:
            pos_score = float(ldp_vectors[ldp] @ e)
            rank = 1 + int(np.sum(neg_scores > pos_score))
            reciprocal.append(1.0 / rank)
    return float(np.mean(reciprocal)) if reciprocal else 0.0


def train_superborrow(
    trainset: BorrowTrainSet,
    entity_vectors: np.ndarray,
    store: LdpVectorStore,
    cfg: SuperBorrowConfig,
) -> SuperBorrowResult:
    """Fit the pair encoder with mini-batch SGD plus momentum.

    A fraction of the pairs is held out; the reported validation score is
    the held-out retrieval MRR, which the grid-search helper maximises.
    Pairs with an empty negative pool are skipped with a count. Negatives
    are resampled from each pair's pool every epoch, without replacement,
    capped at ``negatives_per_pair``.
    """
    if not trainset.pairs:
        raise ValueError("empty borrow train set")
    max_end = max(max(h, t) for h, t in trainset.pairs)
    if max_end >= entity_vectors.shape[0]:
        raise ValueError(f"entity vectors cover {entity_vectors.shape[0]} ids, pair uses {max_end}")
    rng = np.random.default_rng(np.random.SeedSequence([cfg.rng_seed, 0]))
    encoder = init_pair_encoder(
        input_dim=4 * entity_vectors.shape[1],
        output_dim=store.dim,
        rng=rng,
        hidden_dim=cfg.hidden_dim,
        hidden_layers=cfg.hidden_layers,
        activation=cfg.activation,
        margin=cfg.margin,
    )
    train_idx, holdout_idx = _holdout_split(len(trainset.pairs), cfg.holdout_fraction, rng)
    ldp_vectors = np.asarray(store.vectors, dtype=np.float64)

    positives = [
        (pair_idx, ldp)
        for pair_idx in train_idx
        for ldp in trainset.pair_positives[pair_idx]
        if trainset.pair_pools[pair_idx].size > 0
    ]
    skipped = sum(
        1 for pair_idx in train_idx if trainset.pair_pools[pair_idx].size == 0
    )
    if skipped:
        logger.info("skipping %d training pairs with empty negative pools", skipped)
    if not positives:
        raise ValueError("no trainable positives: all pairs have empty negative pools")

    velocity_w = [np.zeros_like(W) for W in encoder.weights]
    velocity_b = [np.zeros_like(b) for b in encoder.biases]
    epoch_losses: list[float] = []
    for epoch in range(cfg.epochs):
        epoch_rng = np.random.default_rng(np.random.SeedSequence([cfg.rng_seed, 1, epoch]))
        order = epoch_rng.permutation(len(positives))
        epoch_loss = 0.0
        for start in range(0, len(order), cfg.batch_size):
            batch = [positives[i] for i in order[start:start + cfg.batch_size]]
            heads = np.array([trainset.pairs[p][0] for p, _ in batch])
            tails = np.array([trainset.pairs[p][1] for p, _ in batch])
            X = pair_features_batch(entity_vectors[heads], entity_vectors[tails])
            pos_vecs = ldp_vectors[[ldp for _, ldp in batch]]
            neg_rows = []
            for p, _ in batch:
                pool = trainset.pair_pools[p]
                take = min(cfg.negatives_per_pair, pool.size)
                neg_rows.append(ldp_vectors[epoch_rng.choice(pool, size=take, replace=False)])
            loss, w_grads, b_grads = hinge_loss_and_grads(encoder, X, pos_vecs, neg_rows, cfg.l2)
            if not np.isfinite(loss):
                raise ValueError(f"non-finite loss at epoch {epoch}, batch {start // cfg.batch_size}")
            epoch_loss += loss
            for i in range(len(encoder.weights)):
                velocity_w[i] = cfg.momentum * velocity_w[i] - cfg.learning_rate * w_grads[i]
                velocity_b[i] = cfg.momentum * velocity_b[i] - cfg.learning_rate * b_grads[i]
                encoder.weights[i] += velocity_w[i]
                encoder.biases[i] += velocity_b[i]
        epoch_losses.append(epoch_loss / len(positives))

    val_rng = np.random.default_rng(np.random.SeedSequence([cfg.rng_seed, 2]))
    val_mrr = _retrieval_mrr(
        encoder, trainset, holdout_idx, entity_vectors, ldp_vectors,
        cfg.negatives_per_pair, val_rng,
    )
    return SuperBorrowResult(
        encoder, epoch_losses, val_mrr, skipped, cfg, [int(i) for i in holdout_idx]
    )


def grid_search_superborrow(
    trainset: BorrowTrainSet,
    entity_vectors: np.ndarray,
    store: LdpVectorStore,
    base_cfg: SuperBorrowConfig,
    grid: dict | None = None,
) -> SuperBorrowResult:
    """Train one encoder per grid point, keep the best held-out MRR."""
    grid = SUPERBORROW_GRID if grid is None else grid
    best: SuperBorrowResult | None = None
    for hidden_layers in grid["hidden_layers"]:
        for l2 in grid["l2"]:
            for lr in grid["learning_rate"]:
                for activation in grid["activation"]:
                    cfg = replace(
                        base_cfg, hidden_layers=hidden_layers, l2=l2,
                        learning_rate=lr, activation=activation,
                    )
                    result = train_superborrow(trainset, entity_vectors, store, cfg)
                    logger.info(
                        "grid point layers=%d l2=%g lr=%g act=%s -> MRR %.4f",
                        hidden_layers, l2, lr, activation, result.validation_mrr,
                    )
                    if best is None or result.validation_mrr > best.validation_mrr:
                        best = result
    return best


# ---------------------------------------------------------------------------
# Borrowing (inference) and baselines


def score_ldps(
    encoder: PairEncoder,
    pair: tuple[int, int],
    entity_vectors: np.ndarray,
    store: LdpVectorStore,
) -> list[tuple[int, float]]:
    """All store LDPs ranked by inner product with the pair encoding.

    Descending by score; exact score ties break by ascending LDP id.
    """
    if len(store) == 0:
        raise ValueError("cannot rank over an empty LDP store")
    h, t = pair
    e = encoder.encode(pair_features(entity_vectors[h], entity_vectors[t])[None, :])[0]
    scores = np.asarray(store.vectors, dtype=np.float64) @ e
    order = np.lexsort((np.arange(scores.shape[0]), -scores))
    return [(int(i), float(scores[i])) for i in order]


def borrow_topk(
    encoder: PairEncoder,
    pairs,
    k: int,
    entity_vectors: np.ndarray,
    store: LdpVectorStore,
) -> TextualTriples:
    """Top-k ranked LDPs per pair, as borrowable textual triples.

    Every pair contributes exactly k triples (fewer only when the store
    holds fewer than k LDPs); output order follows the input pair order,
    then rank.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if len(store) == 0:
        raise ValueError("cannot borrow from an empty LDP store")
    pairs = list(pairs)
    triples: list[TextualTriple] = []
    ldp_vectors = np.asarray(store.vectors, dtype=np.float64)
    ids = np.arange(len(store))
    chunk = 1024
    for start in range(0, len(pairs), chunk):
        block = pairs[start:start + chunk]
        heads = np.array([p[0] for p in block])
        tails = np.array([p[1] for p in block])
        X = pair_features_batch(entity_vectors[heads], entity_vectors[tails])
        encodings = encoder.encode(X)
        scores = encodings @ ldp_vectors.T
        for row, (h, t) in enumerate(block):
            order = np.lexsort((ids, -scores[row]))[:k]
            triples.extend(TextualTriple(h, int(ldp), t) for ldp in order)
    return TextualTriples(store.ldps, triples)


def _checked_cosine(u: np.ndarray, v: np.ndarray) -> float:
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        raise ValueError("cosine undefined for a zero-norm entity vector")
    return float(np.dot(u, v) / (nu * nv))


def pair_similarity(
    p1: tuple[int, int], p2: tuple[int, int], entity_vectors: np.ndarray
) -> float:
    """Product of shifted head and tail cosines, in [0, 1].

    Each cosine is mapped to [0, 1] with (x + 1) / 2 before multiplying,
    so antiparallel components floor the similarity at zero.
    """
    c_head = (_checked_cosine(entity_vectors[p1[0]], entity_vectors[p2[0]]) + 1.0) / 2.0
    c_tail = (_checked_cosine(entity_vectors[p1[1]], entity_vectors[p2[1]]) + 1.0) / 2.0
    return float(np.clip(c_head * c_tail, 0.0, 1.0))


def neighb_borrow(
    pair: tuple[int, int],
    with_mention_pairs,
    entity_vectors: np.ndarray,
    index: TextualIndex,
) -> set[int]:
    """LDP set of the most similar with-mention pair (1-nearest neighbour).

    Candidates are scanned in ascending (head, tail) order so exact
    similarity ties resolve to the smallest id pair.
    """
    candidates = sorted(set(with_mention_pairs))
    if not candidates:
        raise ValueError("no with-mention pairs to borrow from")
    best_pair = None
    best_sim = -1.0
    for candidate in candidates:
        sim = pair_similarity(pair, candidate, entity_vectors)
        if sim > best_sim:
            best_sim = sim
            best_pair = candidate
    return index.positive_ldps(best_pair)


def neighb_borrow_triples(
    target_pairs,
    with_mention_pairs,
    entity_vectors: np.ndarray,
    index: TextualIndex,
    ldps: Vocabulary,
) -> TextualTriples:
    """Apply 1NN borrowing to every target pair, in target order."""
    triples: list[TextualTriple] = []
    for h, t in target_pairs:
        for ldp in sorted(neighb_borrow((h, t), with_mention_pairs, entity_vectors, index)):
            triples.append(TextualTriple(h, ldp, t))
    return TextualTriples(ldps, triples)


COOCCURRENCE_SURFACE = "<co-occurrence>"


def cooccurrence_augment(textual_pairs) -> TextualTriples:
    """One generic-relation triple per distinct ordered co-occurring pair."""
    ldps = Vocabulary([COOCCURRENCE_SURFACE])
    seen: set[tuple[int, int]] = set()
    triples: list[TextualTriple] = []
    for h, t in textual_pairs:
        if (h, t) in seen:
            continue
        seen.add((h, t))
        triples.append(TextualTriple(h, 0, t))
    return TextualTriples(ldps, triples)


def linkall_augment(without_pairs) -> TextualTriples:
    """One fresh relation per distinct pair; adds as many relations as pairs."""
    ldps = Vocabulary()
    seen: set[tuple[int, int]] = set()
    triples: list[TextualTriple] = []
    for h, t in without_pairs:
        if (h, t) in seen:
            continue
        seen.add((h, t))
        triples.append(TextualTriple(h, ldps.add(f"<link:{h}:{t}>"), t))
    return TextualTriples(ldps, triples)


# ---------------------------------------------------------------------------
# Encoder checkpoints


def save_encoder(encoder: PairEncoder, path) -> None:
    """Binary checkpoint: header line with activation/margin/layer count,
    then one ``rows cols`` line plus a float32 block per matrix."""
    with open(path, "wb") as fh:
        n = len(encoder.weights)
        fh.write(f"pair-encoder {encoder.activation} {encoder.margin!r} {n}\n".encode("ascii"))
        for matrix in [m for pair in zip(encoder.weights, encoder.biases) for m in pair]:
            arr = np.atleast_2d(np.asarray(matrix, dtype="<f4"))
            fh.write(f"{arr.shape[0]} {arr.shape[1]}\n".encode("ascii"))
            fh.write(np.ascontiguousarray(arr).tobytes())


def load_encoder(path) -> PairEncoder:
    with open(path, "rb") as fh:
        header = fh.readline().decode("ascii").split()
        if len(header) != 4 or header[0] != "pair-encoder":
            raise ValueError(f"{path}: not a pair-encoder checkpoint")
        activation, margin, n = header[1], float(header[2]), int(header[3])
        weights, biases = [], []
        for i in range(2 * n):
            rows, cols = (int(v) for v in fh.readline().decode("ascii").split())
            data = np.frombuffer(fh.read(rows * cols * 4), dtype="<f4").astype(np.float64)
            matrix = data.reshape(rows, cols)
            if i % 2 == 0:
                weights.append(matrix)
            else:
                biases.append(matrix.reshape(-1))
    return PairEncoder(weights, biases, activation, margin)
