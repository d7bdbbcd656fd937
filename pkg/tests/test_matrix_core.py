import numpy as np
import pytest

from lingmat.matrix_core import (
    Ensemble,
    ParseError,
    PermutationMap,
    WordMatrix,
    antisymmetric_part,
    apply_permutation,
    read_ensemble,
    read_matrix,
    read_vector,
    symmetric_part,
    write_ensemble,
    write_matrix,
    write_vector,
)


def wm(values, label="w"):
    return WordMatrix(label, np.asarray(values, dtype=float))


class TestWordMatrix:
    def test_rejects_nan(self):
        with pytest.raises(ValueError, match="non-finite"):
            wm([[0.0, np.nan], [0.0, 0.0]])

    def test_rejects_inf(self):
        with pytest.raises(ValueError, match="non-finite"):
            wm([[np.inf]])

    def test_rejects_non_square(self):
        with pytest.raises(ValueError, match="square"):
            WordMatrix("w", np.zeros((2, 3)))

    def test_rejects_empty_label(self):
        with pytest.raises(ValueError):
            WordMatrix("", np.zeros((1, 1)))

    def test_values_locked(self):
        m = wm([[1.0, 2.0], [3.0, 4.0]])
        with pytest.raises(ValueError):
            m.values[0, 0] = 9.0


class TestEnsemble:
    def test_nonempty(self):
        with pytest.raises(ValueError, match="nonempty"):
            Ensemble(())

    def test_dim_mismatch(self):
        with pytest.raises(ValueError, match="dimension"):
            Ensemble((wm(np.zeros((2, 2))), wm(np.zeros((3, 3)))))


class TestSymmetricDecomposition:
    def test_symmetric_part_basic(self):
        s = symmetric_part(wm([[0, 2], [0, 0]]))
        np.testing.assert_array_equal(s.values, [[0, 1], [1, 0]])

    def test_symmetric_fixed_point(self):
        m = wm([[1, 5], [5, 2]])
        np.testing.assert_array_equal(symmetric_part(m).values, m.values)

    def test_symmetric_hand_case(self):
        s = symmetric_part(wm([[1, 3], [-1, 2]]))
        np.testing.assert_array_equal(s.values, [[1, 1], [1, 2]])

    def test_antisymmetric_basic(self):
        a = antisymmetric_part(wm([[0, 2], [0, 0]]))
        np.testing.assert_array_equal(a.values, [[0, 1], [-1, 0]])

    def test_antisymmetric_of_symmetric_is_zero(self):
        a = antisymmetric_part(wm([[1, 5], [5, 2]]))
        np.testing.assert_array_equal(a.values, np.zeros((2, 2)))

    def test_antisymmetric_hand_case(self):
        a = antisymmetric_part(wm([[1, 3], [-1, 2]]))
        np.testing.assert_array_equal(a.values, [[0, 2], [-2, 0]])

    def test_decomposition_reconstructs(self):
        rng = np.random.default_rng(0)
        for d in (1, 2, 5, 9):
            m = wm(rng.normal(size=(d, d)))
            total = symmetric_part(m).values + antisymmetric_part(m).values
            np.testing.assert_allclose(total, m.values, rtol=0, atol=1e-15)

    def test_transpose_identities(self):
        m = wm(np.random.default_rng(1).normal(size=(4, 4)))
        s = symmetric_part(m).values
        a = antisymmetric_part(m).values
        np.testing.assert_array_equal(s, s.T)
        np.testing.assert_array_equal(a, -a.T)


class TestPermutations:
    def test_identity(self):
        m = wm([[1, 2], [3, 4]])
        out = apply_permutation(m, PermutationMap.identity(2))
        np.testing.assert_array_equal(out.values, m.values)

    def test_swap(self):
        out = apply_permutation(wm([[1, 2], [3, 4]]), PermutationMap([1, 0]))
        np.testing.assert_array_equal(out.values, [[4, 3], [2, 1]])

    def test_inverse_roundtrip(self):
        rng = np.random.default_rng(2)
        m = wm(rng.normal(size=(6, 6)))
        sigma = PermutationMap(rng.permutation(6))
        back = apply_permutation(apply_permutation(m, sigma), sigma.inverse())
        np.testing.assert_array_equal(back.values, m.values)

    def test_group_action(self):
        rng = np.random.default_rng(3)
        m = wm(rng.normal(size=(5, 5)))
        for _ in range(10):
            sigma = PermutationMap(rng.permutation(5))
            tau = PermutationMap(rng.permutation(5))
            lhs = apply_permutation(apply_permutation(m, sigma), tau)
            rhs = apply_permutation(m, tau.compose(sigma))
            np.testing.assert_array_equal(lhs.values, rhs.values)

    def test_not_a_bijection(self):
        with pytest.raises(ValueError, match="bijection"):
            PermutationMap([0, 0, 1])

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="dimension"):
            apply_permutation(wm(np.zeros((3, 3))), PermutationMap([1, 0]))


class TestMatrixIO:
    def test_roundtrip_exact(self, tmp_path):
        rng = np.random.default_rng(4)
        values = rng.normal(size=(7, 7)) * np.exp(rng.normal(size=(7, 7)) * 20)
        m = WordMatrix("some word", values)
        path = tmp_path / "m.txt"
        write_matrix(m, path)
        back = read_matrix(path)
        assert back.label == "some word"
        np.testing.assert_array_equal(back.values, m.values)

    def test_row_length_mismatch_names_line(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("label w\ndim 3\n1 2 3\n4 5\n7 8 9\n")
        with pytest.raises(ParseError, match=r"bad\.txt:4"):
            read_matrix(path)

    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.txt"
        path.write_text("")
        with pytest.raises(ParseError, match="empty"):
            read_matrix(path)

    def test_non_numeric_entry(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("label w\ndim 2\n1 2\n3 x\n")
        with pytest.raises(ParseError, match=r"bad\.txt:4.*non-numeric"):
            read_matrix(path)

    def test_missing_rows(self, tmp_path):
        path = tmp_path / "short.txt"
        path.write_text("label w\ndim 3\n1 2 3\n")
        with pytest.raises(ParseError, match="rows"):
            read_matrix(path)

    def test_bad_header(self, tmp_path):
        path = tmp_path / "hdr.txt"
        path.write_text("dim 2\nlabel w\n1 2\n3 4\n")
        with pytest.raises(ParseError, match=r"hdr\.txt:1"):
            read_matrix(path)

    def test_vector_roundtrip(self, tmp_path):
        v = np.random.default_rng(5).normal(size=11)
        path = tmp_path / "v.txt"
        write_vector("red car", v, path)
        label, back = read_vector(path)
        assert label == "red car"
        np.testing.assert_array_equal(back, v)


class TestEnsembleIO:
    def test_roundtrip_preserves_order(self, tmp_path):
        rng = np.random.default_rng(6)
        members = tuple(WordMatrix(f"word{i}", rng.normal(size=(3, 3)))
                        for i in range(5))
        ens = Ensemble(members)
        write_ensemble(ens, tmp_path / "ens")
        back = read_ensemble(tmp_path / "ens")
        assert back.labels() == [m.label for m in members]
        for a, b in zip(back.members, members):
            np.testing.assert_array_equal(a.values, b.values)

    def test_missing_manifest(self, tmp_path):
        with pytest.raises(ParseError, match="manifest"):
            read_ensemble(tmp_path)
