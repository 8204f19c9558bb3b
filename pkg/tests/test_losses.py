"""Loss values and score-gradient oracles."""

import numpy as np
import pytest

from kgborrow import compute_loss


class TestMarginLoss:
    def test_satisfied_margin_gives_zero_loss_and_gradient(self):
        loss, gpos, gneg = compute_loss("margin", [5.0], [[0.0]], margin=1.0)
        assert loss == 0.0
        assert np.all(gpos == 0.0) and np.all(gneg == 0.0)

    def test_plug_in_arithmetic(self):
        loss, gpos, gneg = compute_loss("margin", [0.0], [[0.0]], margin=5.0)
        assert loss == 5.0
        assert gpos[0] == -1.0 and gneg[0, 0] == 1.0

    def test_sums_over_negatives(self):
        loss, gpos, _ = compute_loss("margin", [0.0], [[0.0, 0.0, -10.0]], margin=2.0)
        assert loss == 4.0  # two active negatives, 2 each
        assert gpos[0] == -2.0

    def test_nonpositive_margin_rejected(self):
        with pytest.raises(ValueError, match="margin"):
            compute_loss("margin", [0.0], [[0.0]], margin=0.0)


class TestSoftplusLoss:
    def test_closed_form_at_zero(self):
        loss, _, _ = compute_loss("softplus", [0.0], np.zeros((1, 0)))
        assert loss == pytest.approx(np.log(2.0), abs=1e-12)

    def test_negative_contributions_add(self):
        loss, _, gneg = compute_loss("softplus", [0.0], [[0.0]])
        assert loss == pytest.approx(2 * np.log(2.0), abs=1e-12)
        assert gneg[0, 0] == pytest.approx(0.5)

    def test_stable_for_large_scores(self):
        loss, gpos, gneg = compute_loss("softplus", [1e4], [[-1e4]])
        assert np.isfinite(loss) and loss == pytest.approx(0.0, abs=1e-12)
        assert np.all(np.isfinite(gpos)) and np.all(np.isfinite(gneg))


class TestSigmoidLoss:
    def test_hand_value(self):
        # -log sig(9 + 0) - log sig(-0 - 9) for one pos/neg pair at 0
        loss, _, _ = compute_loss("sigmoid", [0.0], [[0.0]], margin=9.0)
        expected = -np.log(1 / (1 + np.exp(-9.0))) - np.log(1 / (1 + np.exp(9.0)))
        assert loss == pytest.approx(expected, rel=1e-12)

    def test_requires_positive_margin(self):
        with pytest.raises(ValueError, match="margin"):
            compute_loss("sigmoid", [0.0], [[0.0]], margin=-1.0)


class TestLossGradientsMatchFiniteDifferences:
    @pytest.mark.parametrize("kind,margin", [("margin", 2.0), ("softplus", None), ("sigmoid", 3.0)])
    def test_central_differences(self, kind, margin, rng):
        pos = rng.normal(size=4)
        neg = rng.normal(size=(4, 3))
        _, gpos, gneg = compute_loss(kind, pos, neg, margin=margin)
        h = 1e-6
        for i in range(4):
            up, down = pos.copy(), pos.copy()
            up[i] += h
            down[i] -= h
            fd = (compute_loss(kind, up, neg, margin=margin)[0]
                  - compute_loss(kind, down, neg, margin=margin)[0]) / (2 * h)
            assert gpos[i] == pytest.approx(fd, abs=1e-5)
        for i in range(4):
            for j in range(3):
                up, down = neg.copy(), neg.copy()
                up[i, j] += h
                down[i, j] -= h
                fd = (compute_loss(kind, pos, up, margin=margin)[0]
                      - compute_loss(kind, pos, down, margin=margin)[0]) / (2 * h)
                assert gneg[i, j] == pytest.approx(fd, abs=1e-5)

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError, match="loss kind"):
            compute_loss("zero-one", [0.0], [[0.0]])
