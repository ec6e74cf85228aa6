"""Sparse storage, norms, structural checks, scaling, and Matrix Market I/O."""

import numpy as np
import pytest
import scipy.io
from hypothesis import given, settings, strategies as st

from perronkit import (
    MatrixMarketParseError,
    SparseMatrix,
    apply_scaling,
    check_rcdd,
    check_sdd,
    induced_norms,
    is_irreducible,
    load_matrix,
    load_vector,
    matvec,
    save_vector,
    shifted_m_matrix,
)

from pathlib import Path

DATA = Path(__file__).parent / "data"


def dense_matvec_oracle(M, x, transpose=False):
    """Triple-loop reference product."""
    M = M.T if transpose else M
    out = np.zeros(M.shape[0])
    for i in range(M.shape[0]):
        acc = 0.0
        for j in range(M.shape[1]):
            acc += M[i, j] * x[j]
        out[i] = acc
    return out


def boolean_power_irreducible_oracle(M):
    """Reachability closure of boolean powers: irreducible iff all pairs
    connect within n steps in both the pattern and its transpose."""
    n = M.shape[0]
    B = (M != 0).astype(np.int64)
    reach = np.eye(n, dtype=np.int64)
    acc = np.eye(n, dtype=np.int64)
    for _ in range(n):
        acc = (acc @ B != 0).astype(np.int64)
        reach |= acc
    return bool(reach.all() and reach.T.all())


class TestStorage:
    def test_duplicates_summed_and_zeros_dropped(self):
        A = SparseMatrix(2, 2, [0, 0, 1], [1, 1, 0], [2.0, 3.0, -0.0])
        assert A.nnz == 1
        assert A.to_dense()[0, 1] == 5.0

    def test_entries_round_trip(self):
        M = np.array([[0.0, 1.5], [2.5, 0.0]])
        A = SparseMatrix.from_dense(M)
        rows, cols, vals = A.entries()
        rebuilt = np.zeros((2, 2))
        rebuilt[rows, cols] = vals
        assert np.array_equal(rebuilt, M)

    def test_transpose_agrees_with_forward(self):
        rng = np.random.default_rng(0)
        M = np.where(rng.random((7, 5)) < 0.4, rng.normal(size=(7, 5)), 0.0)
        A = SparseMatrix.from_dense(M)
        assert np.array_equal(A.csr_transpose().toarray(), M.T)

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            SparseMatrix(1, 1, [0], [0], [np.nan])

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            SparseMatrix(2, 2, [2], [0], [1.0])


class TestMatvec:
    def test_permutation(self):
        A = SparseMatrix.from_dense([[0.0, 1.0], [1.0, 0.0]])
        assert np.array_equal(matvec(A, [1.0, 2.0]), [2.0, 1.0])

    def test_zero_matrix(self):
        A = SparseMatrix.zeros(3)
        assert np.array_equal(matvec(A, [1.0, 2.0, 3.0]), np.zeros(3))

    def test_matches_dense_oracle(self):
        rng = np.random.default_rng(1)
        M = np.where(rng.random((10, 10)) < 0.5, rng.normal(size=(10, 10)), 0.0)
        A = SparseMatrix.from_dense(M)
        x = rng.normal(size=10)
        for transpose in (False, True):
            got = matvec(A, x, transpose=transpose)
            want = dense_matvec_oracle(M, x, transpose=transpose)
            assert np.linalg.norm(got - want) <= 1e-14 * max(1.0, np.linalg.norm(want))

    def test_dimension_mismatch(self):
        A = SparseMatrix.zeros(3, 2)
        with pytest.raises(ValueError):
            matvec(A, np.ones(3))
        with pytest.raises(ValueError):
            matvec(A, np.ones(2), transpose=True)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(2, 8), st.integers(0, 2**31 - 1))
    def test_transpose_equals_explicit_transpose(self, n, seed):
        rng = np.random.default_rng(seed)
        M = np.where(rng.random((n, n)) < 0.5, rng.normal(size=(n, n)), 0.0)
        A = SparseMatrix.from_dense(M)
        At = SparseMatrix.from_dense(M.T)
        x = rng.normal(size=n)
        assert np.array_equal(matvec(A, x, transpose=True), matvec(At, x))


class TestNorms:
    def test_exchange(self):
        rep = induced_norms(SparseMatrix.from_dense([[0.0, 1.0], [1.0, 0.0]]))
        assert (rep.norm_1, rep.norm_inf) == (1.0, 1.0)

    def test_upper_triangular(self):
        rep = induced_norms(SparseMatrix.from_dense([[1.0, 2.0], [0.0, 3.0]]))
        assert (rep.norm_1, rep.norm_inf) == (5.0, 3.0)

    def test_matches_dense(self):
        # the oracle accumulates in plain row-major order, the same
        # elementary sums the sparse path performs
        rng = np.random.default_rng(2)
        n = 20
        M = np.where(rng.random((n, n)) < 0.3, rng.normal(size=(n, n)), 0.0)
        row = np.zeros(n)
        col = np.zeros(n)
        for i in range(n):
            for j in range(n):
                row[i] += abs(M[i, j])
                col[j] += abs(M[i, j])
        rep = induced_norms(SparseMatrix.from_dense(M))
        assert rep.norm_1 == col.max()
        assert rep.norm_inf == row.max()

    def test_nonnegative_inf_norm_is_max_row_sum_of_ones_product(self):
        # for nonnegative B the inf-norm equals max_i (B 1)_i
        rng = np.random.default_rng(3)
        for _ in range(100):
            n = int(rng.integers(1, 12))
            B = np.where(rng.random((n, n)) < 0.5, rng.random((n, n)), 0.0)
            A = SparseMatrix.from_dense(B)
            assert induced_norms(A).norm_inf == matvec(A, np.ones(n)).max(initial=0.0)


class TestIrreducibility:
    def test_two_cycle(self):
        assert is_irreducible(SparseMatrix.from_dense([[0.0, 1.0], [1.0, 0.0]]))

    def test_triangular_not_irreducible(self):
        assert not is_irreducible(SparseMatrix.from_dense([[1.0, 1.0], [0.0, 1.0]]))

    def test_one_by_one(self):
        assert is_irreducible(SparseMatrix.from_dense([[2.0]]))
        assert not is_irreducible(SparseMatrix.from_dense([[0.0]]))

    def test_matches_boolean_power_oracle(self):
        rng = np.random.default_rng(4)
        seen = {True: 0, False: 0}
        for _ in range(40):
            n = int(rng.integers(2, 31))
            density = rng.uniform(0.05, 0.35)
            M = np.where(rng.random((n, n)) < density, 1.0, 0.0)
            got = is_irreducible(SparseMatrix.from_dense(M))
            assert got == boolean_power_irreducible_oracle(M)
            seen[got] += 1
        assert seen[True] > 0 and seen[False] > 0

    @settings(max_examples=20, deadline=None)
    @given(st.integers(2, 10), st.integers(0, 2**31 - 1))
    def test_invariant_under_symmetric_permutation(self, n, seed):
        rng = np.random.default_rng(seed)
        M = np.where(rng.random((n, n)) < 0.25, 1.0, 0.0)
        perm = rng.permutation(n)
        P = np.eye(n)[perm]
        assert is_irreducible(SparseMatrix.from_dense(M)) == is_irreducible(
            SparseMatrix.from_dense(P @ M @ P.T)
        )


class TestRCDD:
    def test_equality_dominance(self):
        S = shifted_m_matrix(SparseMatrix.from_dense([[0.0, 1.0], [1.0, 0.0]]), 2.0)
        assert check_rcdd(S, 0.0)

    def test_violating(self):
        S = shifted_m_matrix(SparseMatrix.from_dense([[0.0, 2.0], [2.0, 0.0]]), 1.0)
        assert not check_rcdd(S, 0.0)

    def test_row_but_not_column_dominant(self):
        S = SparseMatrix.from_dense([[2.0, 1.0], [-2.9, 3.0]])
        assert not check_rcdd(S, 0.0)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(2, 10), st.integers(0, 2**31 - 1))
    def test_closed_under_nonnegative_diagonal(self, n, seed):
        rng = np.random.default_rng(seed)
        M = rng.normal(size=(n, n))
        np.fill_diagonal(M, 0.0)
        # accumulate in the same elementary order as the margin check so the
        # boundary case sits at exactly zero margin
        row = np.zeros(n)
        col = np.zeros(n)
        for i in range(n):
            for j in range(n):
                if i != j:
                    row[i] += abs(M[i, j])
                    col[j] += abs(M[i, j])
        np.fill_diagonal(M, np.maximum(row, col))
        S = SparseMatrix.from_dense(M)
        assert check_rcdd(S, 0.0)
        bumped = SparseMatrix.from_dense(M + np.diag(rng.random(n)))
        assert check_rcdd(bumped, 0.0)

    def test_sdd_requires_symmetry(self):
        S = SparseMatrix.from_dense([[3.0, 1.0], [-1.0, 3.0]])
        assert check_rcdd(S, 0.0)
        assert not check_sdd(S, 0.0)


class TestApplyScaling:
    def test_identity_scaling(self):
        M = SparseMatrix.from_dense([[1.0, -2.0], [0.5, 3.0]])
        out = apply_scaling(np.ones(2), M, np.ones(2))
        assert np.array_equal(out.to_dense(), M.to_dense())

    def test_reciprocal_pair(self):
        M = SparseMatrix.identity(2)
        out = apply_scaling([2.0, 2.0], M, [0.5, 0.5])
        assert np.array_equal(out.to_dense(), np.eye(2))

    def test_matches_dense(self):
        rng = np.random.default_rng(5)
        M = np.where(rng.random((8, 8)) < 0.4, rng.normal(size=(8, 8)), 0.0)
        ell = rng.random(8) + 0.1
        r = rng.random(8) + 0.1
        out = apply_scaling(ell, SparseMatrix.from_dense(M), r)
        want = np.diag(ell) @ M @ np.diag(r)
        assert np.abs(out.to_dense() - want).max() <= 1e-15 * np.abs(want).max()

    def test_rejects_nonpositive(self):
        M = SparseMatrix.identity(2)
        with pytest.raises(ValueError):
            apply_scaling([1.0, 0.0], M, [1.0, 1.0])


class TestMatrixMarketIO:
    def test_basic_general(self):
        A = load_matrix(DATA / "basic_general.mtx")
        assert A.shape == (2, 2) and A.nnz == 2
        assert np.array_equal(A.to_dense(), [[0.0, 1.0], [1.0, 0.0]])

    def test_zero_matrix(self):
        A = load_matrix(DATA / "zero_3x3.mtx")
        assert A.shape == (3, 3) and A.nnz == 0

    def test_duplicates_summed(self):
        A = load_matrix(DATA / "duplicates.mtx")
        assert A.to_dense()[0, 0] == 5.0
        assert A.to_dense()[1, 2] == 1.75
        assert A.nnz == 3

    @pytest.mark.parametrize(
        "name",
        ["basic_general", "zero_3x3", "duplicates", "symmetric", "integer_dups"],
    )
    def test_agrees_with_reference_reader(self, name):
        path = DATA / f"{name}.mtx"
        ours = load_matrix(path).to_dense()
        reference = np.asarray(scipy.io.mmread(path).todense())
        assert np.array_equal(ours, reference)

    def test_parse_error_carries_line_number(self, tmp_path):
        bad = tmp_path / "bad.mtx"
        bad.write_text(
            "%%MatrixMarket matrix coordinate real general\n2 2 1\n1 oops 1.0\n"
        )
        with pytest.raises(MatrixMarketParseError) as err:
            load_matrix(bad)
        assert err.value.line_number == 3

    def test_dimension_mismatch(self, tmp_path):
        bad = tmp_path / "oob.mtx"
        bad.write_text(
            "%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n"
        )
        with pytest.raises(MatrixMarketParseError) as err:
            load_matrix(bad)
        assert err.value.line_number == 3

    def test_wrong_entry_count(self, tmp_path):
        bad = tmp_path / "count.mtx"
        bad.write_text(
            "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1.0\n"
        )
        with pytest.raises(MatrixMarketParseError):
            load_matrix(bad)


class TestVectorIO:
    def test_round_trip(self, tmp_path):
        x = np.array([1.5, -2.25, 0.0, 1e-17])
        path = tmp_path / "v.txt"
        save_vector(path, x)
        assert np.array_equal(load_vector(path), x)

    def test_rejects_nonfinite(self, tmp_path):
        path = tmp_path / "v.txt"
        path.write_text("1.0\ninf\n")
        with pytest.raises(ValueError):
            load_vector(path)
