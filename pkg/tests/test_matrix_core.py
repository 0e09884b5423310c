import numpy as np
import pytest

from anacont.errors import RankDeficient, SingularMatrix
from anacont.matrix_core import (
    cmatrix,
    fro_norm,
    matmul,
    numerical_rank,
    orthonormalize,
    range_basis,
    solve,
)


def random_complex(rng, rows, cols):
    return rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))


class TestCMatrix:
    def test_promotes_and_validates(self):
        m = cmatrix([[1, 2], [3, 4]])
        assert m.dtype == np.complex128
        assert m.shape == (2, 2)

    def test_vector_becomes_column(self):
        assert cmatrix([1, 2, 3]).shape == (3, 1)

    def test_rejects_nan_and_inf(self):
        with pytest.raises(ValueError):
            cmatrix([[np.nan, 0], [0, 1]])
        with pytest.raises(ValueError):
            cmatrix([[np.inf, 0], [0, 1]])

    def test_rejects_bad_shape(self):
        with pytest.raises(ValueError):
            cmatrix(np.zeros((2, 2, 2)))


class TestMatmul:
    def test_identity(self):
        x = cmatrix([[1.0, 2.0], [3.0, 4.0 + 1j]])
        assert np.array_equal(matmul(np.eye(2, dtype=complex), x), x)

    def test_hand_product(self):
        a = cmatrix([[1.0, -0.1], [0.0, 0.0]])
        b = cmatrix([[1.0], [0.0]])
        assert np.array_equal(matmul(a, b), cmatrix([[1.0], [0.0]]))

    def test_involution(self):
        s = cmatrix([[0.0, 1.0], [1.0, 0.0]])
        assert np.allclose(matmul(s, s), np.eye(2), atol=0)

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            matmul(np.zeros((2, 3), dtype=complex), np.zeros((2, 2), dtype=complex))

    def test_associativity_on_random_triples(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            a = random_complex(rng, 4, 3)
            b = random_complex(rng, 3, 5)
            c = random_complex(rng, 5, 2)
            lhs = matmul(matmul(a, b), c)
            rhs = matmul(a, matmul(b, c))
            assert fro_norm(lhs - rhs) <= 1e-12 * fro_norm(lhs)


class TestSolve:
    def test_identity(self):
        b = cmatrix([[2.0], [3.0 + 1j]])
        assert np.allclose(solve(np.eye(2, dtype=complex), b), b, atol=0)

    def test_diagonal(self):
        a = cmatrix([[2.0, 0.0], [0.0, 4.0]])
        b = cmatrix([[2.0], [4.0]])
        assert np.allclose(solve(a, b), cmatrix([[1.0], [1.0]]), atol=1e-15)

    def test_zero_matrix_raises(self):
        with pytest.raises(SingularMatrix):
            solve(np.zeros((2, 2), dtype=complex), cmatrix([[1.0], [1.0]]))

    def test_near_singular_raises(self):
        a = cmatrix([[1.0, 1.0], [1.0, 1.0 + 1e-15]])
        with pytest.raises(SingularMatrix):
            solve(a, cmatrix([[1.0], [1.0]]))

    def test_non_square_rejected(self):
        with pytest.raises(ValueError):
            solve(np.zeros((2, 3), dtype=complex), np.zeros((2, 1), dtype=complex))

    def test_round_trip_on_well_conditioned(self):
        rng = np.random.default_rng(1)
        tried = 0
        for _ in range(40):
            a = random_complex(rng, 5, 5)
            if np.linalg.cond(a) >= 1e4:
                continue
            tried += 1
            b = random_complex(rng, 5, 2)
            x = solve(a, b)
            assert fro_norm(a @ x - b) <= 1e-10 * fro_norm(b)
        assert tried >= 10


class TestOrthonormalize:
    def test_scaling_case(self):
        q = orthonormalize(cmatrix([[2.0], [0.0]]))
        assert np.allclose(q, cmatrix([[1.0], [0.0]]), atol=0)

    def test_hand_triangular_reduction(self):
        q = orthonormalize(cmatrix([[1.0, 1.0], [0.0, 1.0]]))
        assert np.allclose(q, np.eye(2), atol=1e-15)

    def test_duplicate_direction_raises(self):
        with pytest.raises(RankDeficient):
            orthonormalize(cmatrix([[1.0, 2.0], [1.0, 2.0]]))

    def test_phase_deterministic(self):
        # diag of the triangular factor is forced real nonnegative, so a
        # negated input negates the basis rather than shifting phase freely
        m = cmatrix([[-3.0], [0.0]])
        assert np.allclose(orthonormalize(m), cmatrix([[-1.0], [0.0]]), atol=0)

    def test_orthonormality_and_range(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            m = random_complex(rng, 6, 3)
            q = orthonormalize(m)
            assert fro_norm(q.conj().T @ q - np.eye(3)) <= 1e-12
            assert fro_norm(q @ (q.conj().T @ m) - m) <= 1e-10 * fro_norm(m)


class TestNumericalRank:
    @pytest.mark.parametrize(
        "m, tol, expected",
        [
            (np.eye(3, dtype=complex), 1e-10, 3),
            (np.zeros((2, 2), dtype=complex), 1e-10, 0),
            (np.diag([1.0, 1e-14]).astype(complex), 1e-10, 1),
        ],
    )
    def test_examples(self, m, tol, expected):
        assert numerical_rank(m, tol) == expected

    def test_negative_tol_rejected(self):
        with pytest.raises(ValueError):
            numerical_rank(np.eye(2, dtype=complex), -1.0)


class TestRangeBasis:
    def test_projector_range(self):
        p = cmatrix([[1.0, -0.3], [0.0, 0.0]])  # oblique rank-1 projector
        q = range_basis(p, 1)
        assert q.shape == (2, 1)
        # the range is the first coordinate axis
        assert abs(abs(q[0, 0]) - 1.0) < 1e-14
        assert abs(q[1, 0]) < 1e-14

    def test_rank_too_high_raises(self):
        with pytest.raises(RankDeficient):
            range_basis(cmatrix([[1.0, 0.0], [0.0, 0.0]]), 2)


def test_fro_norm_matches_numpy():
    rng = np.random.default_rng(3)
    m = random_complex(rng, 4, 4)
    assert fro_norm(m) == pytest.approx(np.linalg.norm(m))
