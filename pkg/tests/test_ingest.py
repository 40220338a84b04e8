import numpy as np
import pytest

from conftest import write_counts_csv
from spikecov.errors import DegenerateInput, ParseError, ShapeError
from spikecov.ingest import ExpressionMatrix, load_matrix, transform_and_spectrum


class TestLoadMatrix:
    def test_basic_csv(self, tmp_path):
        path = write_counts_csv(tmp_path / "g.csv", [[0, 1, 2], [3, 4, 5]])
        em = load_matrix(path)
        assert (em.d, em.n) == (2, 3)
        np.testing.assert_array_equal(em.counts, [[0, 1, 2], [3, 4, 5]])
        np.testing.assert_allclose(em.transformed, np.log10(em.counts + 1.0))
        assert em.gene_id == "g"

    def test_tsv_header_rownames(self, tmp_path):
        path = write_counts_csv(
            tmp_path / "g.tsv", [[1, 2], [3, 4]],
            header=["pos", "s1", "s2"], rownames=["p1", "p2"], delimiter="\t",
        )
        em = load_matrix(path, fmt="tsv", has_header=True, has_rownames=True,
                         gene_id="GENE1")
        assert (em.d, em.n) == (2, 2)
        assert em.gene_id == "GENE1"
        np.testing.assert_array_equal(em.counts, [[1, 2], [3, 4]])

    def test_transpose(self, tmp_path):
        path = write_counts_csv(tmp_path / "g.csv", [[1, 2, 3], [4, 5, 6]])
        em = load_matrix(path, transpose=True)
        assert (em.d, em.n) == (3, 2)
        np.testing.assert_array_equal(em.counts, [[1, 4], [2, 5], [3, 6]])

    def test_ragged_rows(self, tmp_path):
        path = tmp_path / "g.csv"
        path.write_text("1,2,3\n4,5\n")
        with pytest.raises(ShapeError, match="line 2"):
            load_matrix(path)

    def test_non_numeric_cell_coordinates(self, tmp_path):
        path = tmp_path / "g.csv"
        path.write_text("1,2\n3,x\n")
        with pytest.raises(ParseError) as err:
            load_matrix(path)
        assert err.value.row == 2
        assert err.value.col == 2

    def test_negative_count(self, tmp_path):
        path = tmp_path / "g.csv"
        path.write_text("1,2\n-3,4\n")
        with pytest.raises(ParseError) as err:
            load_matrix(path)
        assert (err.value.row, err.value.col) == (2, 1)

    def test_empty_file(self, tmp_path):
        path = tmp_path / "g.csv"
        path.write_text("\n\n")
        with pytest.raises(ShapeError):
            load_matrix(path)

    def test_blank_lines_skipped(self, tmp_path):
        path = tmp_path / "g.csv"
        path.write_text("1,2\n\n3,4\n")
        em = load_matrix(path)
        assert em.d == 2

    def test_bad_format(self, tmp_path):
        with pytest.raises(ValueError):
            load_matrix(tmp_path / "g.csv", fmt="parquet")


class TestTransformAndSpectrum:
    def test_spectrum_of_transformed_counts(self, tmp_path):
        rng = np.random.default_rng(0)
        counts = rng.poisson(10.0, size=(30, 12))
        path = write_counts_csv(tmp_path / "g.csv", counts)
        em = load_matrix(path)
        sp = transform_and_spectrum(em)
        assert (sp.d, sp.n) == (30, 12)
        assert sp.centered
        assert sp.gene_id == "g"
        X = np.log10(counts + 1.0)
        Xc = X - X.mean(axis=1, keepdims=True)
        assert sp.values_desc.sum() == pytest.approx(np.sum(Xc ** 2) / 12, rel=1e-9)

    def test_constant_matrix_gives_zero_spectrum(self):
        counts = np.full((5, 4), 7)
        em = ExpressionMatrix(counts, np.log10(counts + 1.0), "flat", 5, 4)
        sp = transform_and_spectrum(em)
        assert np.all(sp.values_desc == 0.0)

    def test_single_sample_rejected(self):
        counts = np.array([[1], [2]])
        em = ExpressionMatrix(counts, np.log10(counts + 1.0), "tiny", 2, 1)
        with pytest.raises(DegenerateInput):
            transform_and_spectrum(em)
