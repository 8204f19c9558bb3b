"""Fallback encoder determinism and vector-store round trips."""

import numpy as np
import pytest

from kgborrow import TsvFormatError, Vocabulary, build_fallback_store, fallback_encode, load_vectors
from kgborrow.ldpspace import LdpVectorStore

from conftest import write_lines


class TestFallbackEncode:
    def test_deterministic(self):
        a = fallback_encode("h:<-nsubj>:joined:<dobj>:t", dim=32, seed=5)
        b = fallback_encode("h:<-nsubj>:joined:<dobj>:t", dim=32, seed=5)
        assert np.array_equal(a, b)

    def test_unit_norm(self):
        for ldp in ("h:<-poss>:t", "h:<-nsubj>:president:<prep>:of:<pobj>:t", "x"):
            assert np.linalg.norm(fallback_encode(ldp, dim=64)) == pytest.approx(1.0, abs=1e-6)

    def test_one_token_difference_moves_the_vector(self):
        a = fallback_encode("h:<-nsubj>:joined:<dobj>:t", dim=128, seed=0)
        b = fallback_encode("h:<-nsubj>:left:<dobj>:t", dim=128, seed=0)
        cosine = float(a @ b)
        assert cosine < 1.0 - 1e-6  # strictly separated
        assert cosine > 0.0  # but still sharing most tokens

    def test_swapped_tokens_change_the_encoding(self):
        a = fallback_encode("h:alpha:beta:t", dim=64, seed=0)
        b = fallback_encode("h:beta:alpha:t", dim=64, seed=0)
        assert not np.allclose(a, b)

    def test_seed_changes_encoding(self):
        a = fallback_encode("h:w:t", dim=64, seed=0)
        b = fallback_encode("h:w:t", dim=64, seed=1)
        assert not np.allclose(a, b)

    def test_empty_string_rejected(self):
        with pytest.raises(ValueError, match="empty LDP"):
            fallback_encode("", dim=8)


class TestVectorStore:
    def test_minimal_file(self, tmp_path):
        path = write_lines(tmp_path / "v.tsv", ["1 4", "h:w:t\t0.5 0.25 -1.0 2.0"])
        store = load_vectors(path, Vocabulary(["h:w:t"]))
        assert len(store) == 1 and store.dim == 4
        assert np.allclose(store.vector(0), [0.5, 0.25, -1.0, 2.0])
        assert store.provenance == "external-export"

    def test_unknown_keys_skipped(self, tmp_path):
        path = write_lines(
            tmp_path / "v.tsv",
            ["2 2", "h:w:t\t1 2", "h:other:t\t3 4"],
        )
        store = load_vectors(path, Vocabulary(["h:w:t"]))
        assert len(store) == 1

    def test_missing_vocabulary_ldp_is_named_in_the_error(self, tmp_path):
        path = write_lines(tmp_path / "v.tsv", ["1 2", "h:w:t\t1 2"])
        with pytest.raises(ValueError, match="h:missing:t"):
            load_vectors(path, Vocabulary(["h:w:t", "h:missing:t"]))

    def test_row_arity_mismatch_reports_line(self, tmp_path):
        path = write_lines(tmp_path / "v.tsv", ["1 3", "h:w:t\t1 2"])
        with pytest.raises(TsvFormatError, match=":2:"):
            load_vectors(path, Vocabulary(["h:w:t"]))

    def test_text_round_trip_within_tolerance(self, tmp_path, rng):
        vocab = Vocabulary([f"h:w{i}:t" for i in range(7)])
        store = build_fallback_store(vocab, dim=16, seed=1)
        path = tmp_path / "store.tsv"
        store.save(path)
        again = load_vectors(path, vocab)
        assert np.max(np.abs(again.vectors - store.vectors)) <= 1e-6

    def test_binary_round_trip_is_bit_exact(self, tmp_path):
        vocab = Vocabulary([f"h:w{i}:t" for i in range(5)])
        store = build_fallback_store(vocab, dim=12, seed=2)
        path = tmp_path / "store.bin"
        store.save(path, binary=True)
        again = load_vectors(path, vocab, binary=True)
        assert np.array_equal(again.vectors, store.vectors)

    def test_store_rejects_nonfinite_vectors(self):
        with pytest.raises(ValueError, match="finite"):
            LdpVectorStore(Vocabulary(["a"]), np.array([[np.inf]], dtype=np.float32), "fallback")

    def test_fallback_store_covers_vocabulary(self):
        vocab = Vocabulary(["h:a:t", "h:b:t", "h:c:t"])
        store = build_fallback_store(vocab, dim=24, seed=0)
        assert len(store) == 3
        assert store.provenance == "fallback"
        norms = np.linalg.norm(store.vectors, axis=1)
        assert np.allclose(norms, 1.0, atol=1e-6)
