"""Training losses over positive/negative score pairs.

Each positive score is paired with a row of negative scores. All losses
return the summed loss together with exact gradients w.r.t. the scores,
so the optimiser can chain them through the score-function gradients.

* ``margin``:   sum_ij max(0, margin - pos_i + neg_ij)
* ``softplus``: sum_i softplus(-pos_i) + sum_ij softplus(neg_ij)
* ``sigmoid``:  -sum_i log sig(margin + pos_i) - sum_ij log sig(-neg_ij - margin)
                with uniform negative weights
"""

import numpy as np

LOSS_KINDS = ("margin", "softplus", "sigmoid")


def _sigmoid(x: np.ndarray) -> np.ndarray:
    # tanh form is stable for large |x|
    return 0.5 * (1.0 + np.tanh(0.5 * x))


def _softplus(x: np.ndarray) -> np.ndarray:
    return np.logaddexp(0.0, x)


def compute_loss(kind: str, pos_scores, neg_scores, margin: float | None = None):
    """Loss and score gradients for a batch.

    Args:
        kind: one of ``margin``, ``softplus``, ``sigmoid``.
        pos_scores: shape (B,) scores of the positive triples.
        neg_scores: shape (B, n) scores, row i holding the n negatives
            paired with positive i (a 1-d array is treated as n=1).
        margin: required and > 0 for ``margin`` and ``sigmoid``.

    Returns:
        ``(loss, grad_pos, grad_neg)`` with gradient shapes matching the
        score shapes.
    """
    if kind not in LOSS_KINDS:
        raise ValueError(f"unknown loss kind {kind!r}")
    pos = np.asarray(pos_scores, dtype=np.float64)
    neg = np.asarray(neg_scores, dtype=np.float64)
    if neg.ndim == 1:
        neg = neg[:, None]
    if pos.shape[0] != neg.shape[0]:
        raise ValueError(f"{pos.shape[0]} positives but {neg.shape[0]} negative rows")

    if kind == "margin":
        if margin is None or margin <= 0:
            raise ValueError(f"margin loss requires margin > 0, got {margin}")
        slack = margin - pos[:, None] + neg
        active = slack > 0
        loss = float(slack[active].sum())
        grad_neg = active.astype(np.float64)
        grad_pos = -grad_neg.sum(axis=1)
        return loss, grad_pos, grad_neg

    if kind == "softplus":
        loss = float(_softplus(-pos).sum() + _softplus(neg).sum())
        grad_pos = -_sigmoid(-pos)
        grad_neg = _sigmoid(neg)
        return loss, grad_pos, grad_neg

    # sigmoid
    if margin is None or margin <= 0:
        raise ValueError(f"sigmoid loss requires margin > 0, got {margin}")
    loss = float(_softplus(-(margin + pos)).sum() + _softplus(neg + margin).sum())
    grad_pos = _sigmoid(margin + pos) - 1.0
    grad_neg = _sigmoid(neg + margin)
    return loss, grad_pos, grad_neg
