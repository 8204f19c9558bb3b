"""AdaGrad step arithmetic and state invariants."""

import numpy as np
import pytest

from kgborrow import AdaGradState, NonFiniteGradientError, adagrad_step


class TestAdagradStep:
    def test_null_step_changes_nothing(self):
        params = np.array([[1.0, 2.0]])
        state = AdaGradState.for_params(params)
        adagrad_step(params, np.zeros_like(params), state, lr=0.5)
        assert np.array_equal(params, [[1.0, 2.0]])
        assert np.array_equal(state.accumulator, np.zeros((1, 2)))

    def test_single_step_arithmetic(self):
        # acc = 4, param = 1 - 1 * 2 / sqrt(4) = 0 with eps = 0
        params = np.array([[1.0]])
        state = AdaGradState(np.zeros((1, 1)), epsilon=0.0)
        adagrad_step(params, np.array([[2.0]]), state, lr=1.0)
        assert state.accumulator[0, 0] == 4.0
        assert params[0, 0] == 0.0

    def test_second_identical_step_is_smaller(self):
        params = np.array([[10.0]])
        state = AdaGradState(np.zeros((1, 1)), epsilon=0.0)
        grad = np.array([[2.0]])
        adagrad_step(params, grad, state, lr=1.0)
        first = 10.0 - params[0, 0]
        before = params[0, 0]
        adagrad_step(params, grad, state, lr=1.0)
        second = before - params[0, 0]
        assert 0 < second < first
        assert second == pytest.approx(2.0 / np.sqrt(8.0))

    def test_accumulator_nonnegative_and_nondecreasing(self, rng):
        params = rng.normal(size=(5, 3))
        state = AdaGradState.for_params(params)
        previous = state.accumulator.copy()
        for _ in range(10):
            adagrad_step(params, rng.normal(size=(5, 3)), state, lr=0.1)
            assert np.all(state.accumulator >= previous)
            assert np.all(state.accumulator >= 0)
            previous = state.accumulator.copy()

    def test_nonfinite_gradient_aborts_before_mutation(self):
        params = np.array([[1.0, 1.0]])
        state = AdaGradState.for_params(params)
        bad = np.array([[np.nan, 1.0]])
        with pytest.raises(NonFiniteGradientError):
            adagrad_step(params, bad, state, lr=0.1)
        assert np.array_equal(params, [[1.0, 1.0]])
        assert np.array_equal(state.accumulator, np.zeros((1, 2)))

    def test_sparse_update_touches_only_named_rows(self, rng):
        params = rng.normal(size=(6, 2))
        before = params.copy()
        state = AdaGradState.for_params(params)
        rows = np.array([1, 4])
        adagrad_step(params, np.ones((2, 2)), state, lr=0.1, rows=rows)
        untouched = [0, 2, 3, 5]
        assert np.array_equal(params[untouched], before[untouched])
        assert np.all(params[rows] != before[rows])
        assert np.all(state.accumulator[untouched] == 0.0)
