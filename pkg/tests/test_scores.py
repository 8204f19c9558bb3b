"""Score-function oracles and algebraic properties."""

import numpy as np
import pytest

from kgborrow import EmbeddingTable, init_embeddings, score, score_batch
from kgborrow.scores import score_all_heads, score_all_relations, score_all_tails


def transe_table(entities, relations, norm=1):
    return EmbeddingTable("transe", np.asarray(entities).shape[1],
                          np.asarray(entities, float), np.asarray(relations, float), norm)


class TestScoreOracles:
    def test_transe_exact_translation_scores_zero(self):
        table = transe_table([[1.0, 0.0], [1.0, 1.0]], [[0.0, 1.0]])
        assert score(table, 0, 0, 1) == 0.0

    def test_transe_l1_hand_value(self):
        table = transe_table([[0.0, 0.0], [2.0, -1.0]], [[1.0, 1.0]])
        # |0+1-2| + |0+1-(-1)| = 1 + 2
        assert score(table, 0, 0, 1) == -3.0

    def test_transe_l2_hand_value(self):
        table = transe_table([[0.0, 0.0], [3.0, 4.0]], [[0.0, 0.0]], norm=2)
        assert score(table, 0, 0, 1) == -5.0

    def test_distmult_hand_arithmetic(self):
        table = EmbeddingTable(
            "distmult", 2, np.array([[1.0, 2.0], [5.0, 6.0]]), np.array([[3.0, 4.0]])
        )
        assert score(table, 0, 0, 1) == 63.0  # 1*3*5 + 2*4*6

    def test_complex_conjugate_arithmetic(self):
        # h = 1+0i, r = 0+1i, t = 0+1i: Re((1)(i)(-i)) = 1
        entities = np.array([[1.0, 0.0], [0.0, 1.0]])  # [re | im], d=1
        relations = np.array([[0.0, 1.0]])
        table = EmbeddingTable("complex", 1, entities, relations)
        assert score(table, 0, 0, 1) == 1.0

    def test_rotate_exact_rotation_scores_zero(self):
        # h = 1+0i rotated by pi/2 lands on t = 0+1i
        entities = np.array([[1.0, 0.0], [0.0, 1.0]])
        relations = np.array([[np.pi / 2]])
        table = EmbeddingTable("rotate", 1, entities, relations)
        assert score(table, 0, 0, 1) == pytest.approx(0.0, abs=1e-12)

    def test_rotate_distance_is_squared(self):
        # h = 1, r = identity rotation, t = 3: |1-3|^2 = 4
        entities = np.array([[1.0, 0.0], [3.0, 0.0]])
        relations = np.array([[0.0]])
        table = EmbeddingTable("rotate", 1, entities, relations)
        assert score(table, 0, 0, 1) == pytest.approx(-4.0)


class TestScoreProperties:
    @pytest.mark.parametrize("kind", ["transe", "distmult", "complex", "rotate"])
    def test_deterministic(self, kind, rng):
        table = init_embeddings(kind, 6, 3, 4, rng)
        first = score(table, 0, 1, 2)
        assert all(score(table, 0, 1, 2) == first for _ in range(5))

    def test_complex_with_real_parts_equals_distmult(self, rng):
        d = 5
        for _ in range(200):
            ent = rng.normal(size=(4, d))
            rel = rng.normal(size=(2, d))
            dm = EmbeddingTable("distmult", d, ent, rel)
            cx = EmbeddingTable(
                "complex", d,
                np.concatenate([ent, np.zeros_like(ent)], axis=1),
                np.concatenate([rel, np.zeros_like(rel)], axis=1),
            )
            assert score(cx, 0, 1, 2) == pytest.approx(score(dm, 0, 1, 2), abs=1e-9)

    def test_transe_maximal_iff_exact_translation(self, rng):
        d = 4
        ent = rng.normal(size=(3, d))
        rel = rng.normal(size=(1, d))
        ent[2] = ent[0] + rel[0]
        table = transe_table(ent, rel)
        assert score(table, 0, 0, 2) == pytest.approx(0.0, abs=1e-12)
        assert score(table, 0, 0, 1) < 0.0

    def test_rotate_maximal_iff_exact_rotation(self, rng):
        d = 3
        phases = rng.uniform(-np.pi, np.pi, size=(1, d))
        h = rng.normal(size=(1, 2 * d))
        hr, hi = h[0, :d], h[0, d:]
        rotated = np.concatenate([
            hr * np.cos(phases[0]) - hi * np.sin(phases[0]),
            hr * np.sin(phases[0]) + hi * np.cos(phases[0]),
        ])
        ent = np.vstack([h, rotated[None, :], rng.normal(size=(1, 2 * d))])
        table = EmbeddingTable("rotate", d, ent, phases)
        assert score(table, 0, 0, 1) == pytest.approx(0.0, abs=1e-12)
        assert score(table, 0, 0, 2) < 0.0

    def test_rotate_relations_have_unit_modulus(self, rng):
        table = init_embeddings("rotate", 5, 4, 6, rng)
        assert np.allclose(table.relation_moduli(), 1.0, atol=1e-6)

    @pytest.mark.parametrize("kind", ["transe", "distmult", "complex", "rotate"])
    def test_argsort_invariant_under_constant_shift(self, kind, rng):
        table = init_embeddings(kind, 20, 3, 4, rng)
        scores = score_all_tails(table, 0, 1)
        shifted = scores + 123.456
        assert np.array_equal(np.argsort(-scores, kind="stable"),
                              np.argsort(-shifted, kind="stable"))

    @pytest.mark.parametrize("kind", ["transe", "distmult", "complex", "rotate"])
    def test_candidate_scorers_match_batch_scores(self, kind, rng):
        table = init_embeddings(kind, 8, 5, 4, rng)
        ids = np.arange(8)
        np.testing.assert_allclose(
            score_all_tails(table, 2, 1),
            score_batch(table, np.full(8, 2), np.full(8, 1), ids),
            atol=1e-12,
        )
        np.testing.assert_allclose(
            score_all_heads(table, 1, 3),
            score_batch(table, ids, np.full(8, 1), np.full(8, 3)),
            atol=1e-12,
        )
        rel_ids = np.arange(5)
        np.testing.assert_allclose(
            score_all_relations(table, 2, 3, rel_ids),
            score_batch(table, np.full(5, 2), rel_ids, np.full(5, 3)),
            atol=1e-12,
        )


class TestTableValidation:
    def test_wrong_entity_width_rejected(self):
        with pytest.raises(ValueError, match="entity rows"):
            EmbeddingTable("complex", 2, np.zeros((3, 2)), np.zeros((2, 4)))

    def test_wrong_relation_width_rejected(self):
        with pytest.raises(ValueError, match="relation rows"):
            EmbeddingTable("rotate", 2, np.zeros((3, 4)), np.zeros((2, 4)))

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError, match="model kind"):
            EmbeddingTable("rescal", 2, np.zeros((3, 2)), np.zeros((2, 2)))
