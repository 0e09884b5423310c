import numpy as np
import pytest

from anacont.errors import DegenerateDuality, SpectralGapViolation
from anacont.matrix_core import cmatrix, fro_norm
from anacont.spectral import (
    SpectralHalf,
    eigenprojection,
    spectral_split,
    stable_projector,
)


def span_projector(q):
    """Orthogonal projector onto the column span (phase-free comparator)."""
    return q @ q.conj().T


def random_gap_matrix(rng, n, gap=0.5):
    """Random matrix with eigenvalue real parts pushed away from the axis."""
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    eigs, vecs = np.linalg.eig(a)
    sign = np.where(eigs.real >= 0, 1.0, -1.0)
    eigs = sign * (np.abs(eigs.real) + gap) + 1j * eigs.imag
    return vecs @ np.diag(eigs) @ np.linalg.inv(vecs)


class TestSpectralSplit:
    def test_diagonal_case(self):
        a = cmatrix([[-1.0, 0.0], [0.0, 2.0]])
        q = spectral_split(a, SpectralHalf.STABLE)
        assert q.shape == (2, 1)
        assert np.allclose(span_projector(q), np.diag([1.0, 0.0]), atol=1e-14)

    def test_against_eig_oracle(self):
        a = cmatrix([[0.0, 1.0], [4.0, 0.0]])
        q = spectral_split(a, SpectralHalf.STABLE)
        # oracle: eigendecomposition picks the eigenvector of mu = -2
        v = np.array([[1.0], [-2.0]]) / np.sqrt(5.0)
        assert np.allclose(span_projector(q), v @ v.T, atol=1e-12)

    def test_invariance_postcondition(self):
        rng = np.random.default_rng(7)
        for _ in range(10):
            a = random_gap_matrix(rng, 5)
            for half in SpectralHalf:
                q = spectral_split(a, half)
                if q.shape[1] == 0:
                    continue
                res = (np.eye(5) - q @ q.conj().T) @ a @ q
                assert fro_norm(res) <= 1e-9 * fro_norm(a)
                assert fro_norm(q.conj().T @ q - np.eye(q.shape[1])) <= 1e-12

    def test_nilpotent_raises(self):
        with pytest.raises(SpectralGapViolation):
            spectral_split(cmatrix([[0.0, 1.0], [0.0, 0.0]]), SpectralHalf.STABLE)

    def test_non_square_rejected(self):
        with pytest.raises(ValueError):
            spectral_split(np.zeros((2, 3), dtype=complex), SpectralHalf.STABLE)


class TestEigenprojection:
    def test_orthogonal_projection(self):
        e1 = cmatrix([[1.0], [0.0]])
        proj = eigenprojection(e1, e1)
        assert np.allclose(proj.p, np.diag([1.0, 0.0]), atol=0)
        assert proj.rank == 1

    def test_oblique_rank1(self):
        r = cmatrix([[1.0], [1.0]])
        l = cmatrix([[1.0], [0.0]])
        proj = eigenprojection(r, l)
        assert np.allclose(proj.p, cmatrix([[1.0, 0.0], [1.0, 0.0]]), atol=0)

    def test_orthogonal_bases_degenerate(self):
        with pytest.raises(DegenerateDuality):
            eigenprojection(cmatrix([[1.0], [0.0]]), cmatrix([[0.0], [1.0]]))

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            eigenprojection(np.zeros((2, 1), dtype=complex), np.zeros((3, 1), dtype=complex))


class TestStableProjector:
    def test_diagonal(self):
        proj = stable_projector(cmatrix([[-1.0, 0.0], [0.0, 2.0]]))
        assert np.allclose(proj.p, np.diag([1.0, 0.0]), atol=1e-14)

    def test_frozen_oblique_value(self):
        # oracle: P = v w* / (w* v) with A v = -2 v, A* w = -2 w
        # for A = [[0,1],[4,0]]: v = (1,-2), w = (-2,1), giving 0.5*[[1,-1/2],[-2,1]]
        proj = stable_projector(cmatrix([[0.0, 1.0], [4.0, 0.0]]))
        expected = 0.5 * cmatrix([[1.0, -0.5], [-2.0, 1.0]])
        assert np.allclose(proj.p, expected, atol=1e-12)
        assert proj.rank == 1

    def test_branch_family_member(self):
        # A = [[0,1],[lam,0]] at lam=1: projector onto span{(1,-1)} along span{(1,1)}
        proj = stable_projector(cmatrix([[0.0, 1.0], [1.0, 0.0]]))
        expected = 0.5 * cmatrix([[1.0, -1.0], [-1.0, 1.0]])
        assert np.allclose(proj.p, expected, atol=1e-12)

    def test_idempotence_invariant(self):
        rng = np.random.default_rng(11)
        for _ in range(10):
            a = random_gap_matrix(rng, 4)
            proj = stable_projector(a)
            assert proj.idempotency_defect() <= 1e-10 * (1.0 + fro_norm(proj.p))

    def test_complementarity(self):
        rng = np.random.default_rng(13)
        for _ in range(10):
            a = random_gap_matrix(rng, 4)
            ps = stable_projector(a, SpectralHalf.STABLE)
            pu = stable_projector(a, SpectralHalf.UNSTABLE)
            if ps.rank == 0 or pu.rank == 0:
                continue
            assert fro_norm(ps.p + pu.p - np.eye(4)) <= 1e-9

    def test_commutation_with_matrix(self):
        rng = np.random.default_rng(17)
        for _ in range(10):
            a = random_gap_matrix(rng, 4)
            p = stable_projector(a).p
            assert fro_norm(p @ a - a @ p) <= 1e-9 * fro_norm(a)
