"""Embedding-dump formats: round trips, headers, binary size arithmetic."""

import os

import numpy as np
import pytest

from kgborrow import init_embeddings
from kgborrow.dumps import (
    read_matrix_binary,
    read_matrix_text,
    write_loss_trace,
    read_loss_trace,
    write_matrix_binary,
    write_matrix_text,
)
from kgborrow.pipeline import export_embeddings, load_embeddings, relations_path_for


class TestMatrixFiles:
    def test_text_round_trip_is_exact_for_float64(self, tmp_path, rng):
        matrix = rng.normal(size=(9, 5))
        path = tmp_path / "m.tsv"
        write_matrix_text(path, matrix, "transe")
        back, kind = read_matrix_text(path)
        assert kind == "transe"
        assert np.array_equal(back, matrix)

    def test_binary_round_trip_is_exact_for_float32(self, tmp_path, rng):
        matrix = rng.normal(size=(4, 3)).astype(np.float32).astype(np.float64)
        path = tmp_path / "m.bin"
        write_matrix_binary(path, matrix, "distmult")
        back, kind = read_matrix_binary(path)
        assert kind == "distmult"
        assert np.array_equal(back, matrix)

    def test_binary_file_size_is_header_plus_rows(self, tmp_path, rng):
        n, d = 17, 6
        matrix = rng.normal(size=(n, d))
        path = tmp_path / "m.bin"
        write_matrix_binary(path, matrix, "transe")
        header = f"{n} {d} transe\n"
        assert os.path.getsize(path) == len(header) + n * d * 4


class TestEmbeddingExport:
    @pytest.mark.parametrize("kind", ["transe", "distmult", "complex", "rotate"])
    def test_text_export_round_trips_tables(self, kind, tmp_path, rng):
        table = init_embeddings(kind, 6, 3, 4, rng)
        path = str(tmp_path / "emb.tsv")
        export_embeddings(table, path, "text")
        back = load_embeddings(path, "text")
        assert back.model_kind == kind and back.dim == 4
        assert np.array_equal(back.entity_vectors, table.entity_vectors)
        assert np.array_equal(back.relation_vectors, table.relation_vectors)

    @pytest.mark.parametrize("kind", ["transe", "complex"])
    def test_binary_export_round_trips_at_float32(self, kind, tmp_path, rng):
        table = init_embeddings(kind, 5, 2, 3, rng)
        table.entity_vectors = table.entity_vectors.astype(np.float32).astype(np.float64)
        table.relation_vectors = table.relation_vectors.astype(np.float32).astype(np.float64)
        path = str(tmp_path / "emb.bin")
        export_embeddings(table, path, "binary")
        back = load_embeddings(path, "binary")
        assert np.array_equal(back.entity_vectors, table.entity_vectors)
        assert np.array_equal(back.relation_vectors, table.relation_vectors)

    def test_l2_transe_norm_survives_round_trip(self, tmp_path, rng):
        table = init_embeddings("transe", 4, 2, 3, rng, transe_norm=2)
        path = str(tmp_path / "emb.tsv")
        export_embeddings(table, path, "text")
        assert load_embeddings(path, "text").transe_norm == 2

    def test_relations_file_sits_next_to_entities(self, tmp_path, rng):
        table = init_embeddings("distmult", 4, 2, 3, rng)
        path = str(tmp_path / "emb.tsv")
        export_embeddings(table, path, "text")
        assert os.path.exists(relations_path_for(path))
        assert relations_path_for(path).endswith("emb.relations.tsv")

    def test_complex_rows_are_interleaved_in_the_file(self, tmp_path):
        entities = np.array([[1.0, 2.0, 3.0, 4.0]])  # re = (1, 2), im = (3, 4)
        relations = np.array([[0.0, 0.0, 0.0, 0.0]])
        from kgborrow import EmbeddingTable

        table = EmbeddingTable("complex", 2, entities, relations)
        path = str(tmp_path / "emb.tsv")
        export_embeddings(table, path, "text")
        row = open(path).readlines()[1].split("\t")[1].split()
        assert [float(v) for v in row] == [1.0, 3.0, 2.0, 4.0]

    def test_nonfinite_table_refused(self, tmp_path, rng):
        table = init_embeddings("transe", 3, 2, 2, rng)
        table.entity_vectors[0, 0] = np.nan
        with pytest.raises(ValueError, match="non-finite"):
            export_embeddings(table, str(tmp_path / "emb.tsv"), "text")


class TestLossTrace:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "trace.csv"
        write_loss_trace(path, [3.25, 1.5, 0.125])
        assert read_loss_trace(path) == [3.25, 1.5, 0.125]
        assert open(path).readline() == "epoch,mean_loss\n"
