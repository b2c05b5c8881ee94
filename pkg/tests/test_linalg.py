import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fadagrad import linalg


def random_spd(d, rng, cond=10.0):
    Q, _ = np.linalg.qr(rng.standard_normal((d, d)))
    eigs = np.linspace(1.0, cond, d)
    return (Q * eigs) @ Q.T


class TestMatVec:
    def test_identity(self):
        v = np.array([1.0, 2.0, 3.0])
        assert np.array_equal(linalg.mat_vec(np.eye(3), v), v)

    def test_diagonal_scaling(self):
        A = np.diag([2.0, 2.0])
        assert np.array_equal(linalg.mat_vec(A, np.ones(2)),
                              np.array([2.0, 2.0]))

    def test_matches_double_loop_oracle(self):
        rng = np.random.default_rng(11)
        A = random_spd(4, rng)
        v = rng.standard_normal(4)
        # brute-force double loop
        expected = np.zeros(4)
        for i in range(4):
            for j in range(4):
                expected[i] += A[i, j] * v[j]
        assert np.max(np.abs(linalg.mat_vec(A, v) - expected)) < 1e-12

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="dimension mismatch"):
            linalg.mat_vec(np.eye(3), np.ones(2))


class TestQuadForm:
    def test_identity_gives_squared_norm(self):
        assert linalg.quad_form(np.eye(2), np.array([3.0, 4.0])) == 25.0

    def test_zero_vector(self):
        rng = np.random.default_rng(0)
        A = random_spd(3, rng)
        assert linalg.quad_form(A, np.zeros(3)) == 0.0

    def test_hand_expansion(self):
        A = np.array([[1.0, 0.9], [0.9, 1.0]])
        # 1 + 0.9 + 0.9 + 1
        assert linalg.quad_form(A, np.ones(2)) == pytest.approx(3.8, abs=1e-14)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            linalg.quad_form(np.eye(2), np.ones(3))


class TestInvSqrtEig:
    def test_identity(self):
        M = linalg.inv_sqrt_eig(np.eye(4))
        assert np.allclose(M, np.eye(4), atol=1e-12)

    def test_diagonal_closed_form(self):
        M = linalg.inv_sqrt_eig(np.diag([4.0, 9.0]))
        assert np.allclose(M, np.diag([0.5, 1.0 / 3.0]), atol=1e-12)

    def test_residual_on_correlated_matrix(self):
        S = np.array([[1.0, 0.9], [0.9, 1.0]])
        M = linalg.inv_sqrt_eig(S)
        assert np.linalg.norm(M @ S @ M - np.eye(2)) < 1e-10

    def test_rejects_non_pd(self):
        with pytest.raises(ValueError, match="not positive definite"):
            linalg.inv_sqrt_eig(np.diag([1.0, -0.5]))

    def test_residual_under_high_condition(self):
        rng = np.random.default_rng(5)
        for _ in range(10):
            S = random_spd(6, rng, cond=1e6)
            M = linalg.inv_sqrt_eig(S)
            assert np.linalg.norm(M @ S @ M - np.eye(6)) < 1e-9

    def test_scaling_property(self):
        rng = np.random.default_rng(7)
        S = random_spd(5, rng, cond=100.0)
        for c in (0.25, 3.0, 17.0):
            left = linalg.inv_sqrt_eig(c * S)
            right = c ** -0.5 * linalg.inv_sqrt_eig(S)
            assert np.max(np.abs(left - right)) < 1e-10

    def test_result_symmetric(self):
        rng = np.random.default_rng(9)
        M = linalg.inv_sqrt_eig(random_spd(5, rng))
        assert np.array_equal(M, M.T)


class TestEigExtremes:
    def test_identity(self):
        assert linalg.eig_extremes(np.eye(3)) == (1.0, 1.0)

    def test_diagonal(self):
        lo, hi = linalg.eig_extremes(np.diag([0.1, 5.0]))
        assert lo == pytest.approx(0.1, rel=1e-8)
        assert hi == pytest.approx(5.0, rel=1e-8)

    def test_hand_characteristic_polynomial(self):
        # [[2,1],[1,2]]: det(A - x I) = (2-x)^2 - 1 -> x in {1, 3}
        lo, hi = linalg.eig_extremes(np.array([[2.0, 1.0], [1.0, 2.0]]))
        assert lo == pytest.approx(1.0, rel=1e-8)
        assert hi == pytest.approx(3.0, rel=1e-8)

    def test_sandwich_on_quad_form(self):
        rng = np.random.default_rng(13)
        A = random_spd(6, rng, cond=50.0)
        lo, hi = linalg.eig_extremes(A)
        for _ in range(100):
            v = rng.standard_normal(6)
            q = linalg.quad_form(A, v)
            nsq = float(v @ v)
            assert lo * nsq - 1e-9 <= q <= hi * nsq + 1e-9


class TestFrobenius:
    def test_identical(self):
        assert linalg.frobenius_distance(np.eye(3), np.eye(3)) == 0.0

    def test_identity_vs_zero(self):
        assert linalg.frobenius_distance(np.eye(2), np.zeros((2, 2))) == \
            pytest.approx(np.sqrt(2.0), abs=1e-15)

    def test_matches_sum_of_squares_oracle(self):
        rng = np.random.default_rng(3)
        A = rng.standard_normal((4, 4))
        E = rng.standard_normal((4, 4))
        total = 0.0
        for i in range(4):
            for j in range(4):
                total += E[i, j] ** 2
        assert linalg.frobenius_distance(A, A + E) == \
            pytest.approx(np.sqrt(total), rel=1e-12)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(min_value=0, max_value=2 ** 31 - 1))
    def test_triangle_inequality(self, seed):
        rng = np.random.default_rng(seed)
        A, B, C = (rng.standard_normal((3, 3)) for _ in range(3))
        ab = linalg.frobenius_distance(A, B)
        bc = linalg.frobenius_distance(B, C)
        ac = linalg.frobenius_distance(A, C)
        assert ac <= ab + bc + 1e-12

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            linalg.frobenius_distance(np.eye(2), np.eye(3))


class TestKernelCounters:
    def test_counts_accumulate_and_reset(self):
        linalg.reset_kernel_counts()
        linalg.mat_vec(np.eye(2), np.ones(2))
        linalg.quad_form(np.eye(2), np.ones(2))
        linalg.eig_extremes(np.eye(2))
        counts = linalg.kernel_counts()
        assert counts["mat_vec"] == 1
        assert counts["quad_form"] == 1
        assert linalg.quadratic_calls() == 2
        assert linalg.cubic_calls() == 1
        linalg.reset_kernel_counts()
        assert linalg.quadratic_calls() == 0

    def test_symmetrize_uses_scratch_correctly(self):
        A = np.array([[1.0, 2.0], [4.0, 3.0]])
        linalg.symmetrize(A)
        assert np.array_equal(A, np.array([[1.0, 3.0], [3.0, 3.0]]))

    def test_blend_matches_formula(self):
        Y = np.ones((2, 2))
        X = np.full((2, 2), 3.0)
        linalg.blend(Y, 0.25, X, 0.75)
        assert np.allclose(Y, 0.25 * 1.0 + 0.75 * 3.0)
