import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import renyiflow.matcore as mc
from renyiflow.errors import SingularityError, StructuralError

# eigenvalues of [[2,3],[3,5]]/7 from the characteristic polynomial:
# tr = 1, det = 1/49  ->  (7 -+ 3 sqrt5)/14
PAPER_EIGS = ((7.0 - 3.0 * np.sqrt(5.0)) / 14.0, (7.0 + 3.0 * np.sqrt(5.0)) / 14.0)


class TestEigHermitian:
    def test_identity(self):
        dec = mc.eig_hermitian(np.eye(2))
        assert np.allclose(dec.values, [1.0, 1.0])

    def test_cm_sigma(self, cm_sigma):
        dec = mc.eig_hermitian(cm_sigma)
        assert dec.values == pytest.approx(PAPER_EIGS, abs=1e-14)

    def test_diagonal(self):
        dec = mc.eig_hermitian(np.diag([0.3, 0.7]))
        assert dec.values == pytest.approx([0.3, 0.7], abs=1e-15)

    def test_rejects_non_hermitian(self):
        with pytest.raises(StructuralError):
            mc.eig_hermitian(np.array([[0.0, 1.0], [0.0, 0.0]]))

    def test_reconstruction_ensemble(self, rng):
        for _ in range(1000):
            n = rng.integers(2, 9)
            A = mc.random_hermitian(rng, n)
            dec = mc.eig_hermitian(A)
            assert np.linalg.norm(dec.reconstruct() - A) <= 1e-10 * np.linalg.norm(A)
            U = dec.vectors
            assert np.max(np.abs(U.conj().T @ U - np.eye(n))) <= 1e-12

    def test_phase_fixing_deterministic(self, rng):
        A = mc.random_hermitian(rng, 4)
        d1 = mc.eig_hermitian(A)
        d2 = mc.eig_hermitian(A.copy())
        assert np.array_equal(d1.vectors, d2.vectors)
        for k in range(4):
            col = d1.vectors[:, k]
            idx = np.argmax(np.abs(col) > 1e-12)
            assert col[idx].real > 0 and abs(col[idx].imag) <= 1e-12 * abs(col[idx])


class TestMatrixFunction:
    def test_sqrt(self):
        out = mc.matrix_function(np.diag([4.0, 9.0]), np.sqrt)
        assert np.allclose(out, np.diag([2.0, 3.0]))

    def test_power_zero(self, rng):
        A = mc.random_positive(rng, 3)
        assert np.allclose(mc.matrix_power(A, 0.0), np.eye(3))

    def test_log_of_cm_sigma(self, cm_sigma):
        out = mc.matrix_log(cm_sigma)
        w = np.linalg.eigvalsh(out)
        assert w == pytest.approx([np.log(PAPER_EIGS[0]), np.log(PAPER_EIGS[1])], abs=1e-12)

    def test_log_singular_raises(self):
        with pytest.raises(SingularityError, match="eigenvalue"):
            mc.matrix_log(np.diag([0.0, 1.0]))

    def test_lenient_clamp(self):
        out = mc.matrix_log(np.diag([0.0, 1.0]), lenient=True)
        assert np.isfinite(out).all()

    def test_semigroup_property(self, rng):
        for _ in range(50):
            sigma = mc.random_positive(rng, 4, floor=0.05)
            a, b = rng.uniform(-2, 2, size=2)
            lhs = mc.matrix_power(sigma, a) @ mc.matrix_power(sigma, b)
            rhs = mc.matrix_power(sigma, a + b)
            assert np.linalg.norm(lhs - rhs) <= 1e-10 * max(1.0, np.linalg.norm(rhs))


class TestWeightedInner:
    def test_identity_pair(self, rng):
        sigma = mc.random_density(rng, 3, floor=0.1)
        for s in (0.0, 0.3, 0.5, 1.0):
            assert mc.weighted_inner(np.eye(3), np.eye(3), sigma, s) == pytest.approx(1.0, abs=1e-12)

    def test_positive_definite_at_half(self, rng):
        sigma = mc.random_density(rng, 3, floor=0.1)
        A = mc.random_complex(rng, 3)
        val = mc.weighted_inner(A, A, sigma, 0.5)
        assert val.real > 0 and abs(val.imag) <= 1e-12
        assert mc.weighted_inner(np.zeros((3, 3)), np.zeros((3, 3)), sigma, 0.5) == 0

    def test_endpoints_against_direct_trace(self, rng):
        sigma = mc.random_density(rng, 3, floor=0.1)
        A, B = mc.random_complex(rng, 3), mc.random_complex(rng, 3)
        s0 = np.trace(A.conj().T @ sigma @ B)
        s1 = np.trace(sigma @ A.conj().T @ B)
        assert mc.weighted_inner(A, B, sigma, 0.0) == pytest.approx(s0, abs=1e-12)
        assert mc.weighted_inner(A, B, sigma, 1.0) == pytest.approx(s1, abs=1e-12)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.floats(0.0, 1.0))
    def test_conjugate_symmetry(self, seed, s):
        r = np.random.default_rng(seed)
        sigma = mc.random_density(r, 3, floor=0.05)
        A, B = mc.random_complex(r, 3), mc.random_complex(r, 3)
        lhs = mc.weighted_inner(A, B, sigma, s)
        rhs = np.conj(mc.weighted_inner(B, A, sigma, s))
        assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(lhs))


class TestTraceNorm:
    def test_diagonal(self):
        assert mc.trace_norm(np.diag([1.0, -2.0])) == pytest.approx(3.0, abs=1e-14)

    def test_unitary(self, rng):
        U = np.linalg.qr(mc.random_complex(rng, 2))[0]
        assert mc.trace_norm(U) == pytest.approx(2.0, abs=1e-12)

    def test_dominates_trace(self, rng):
        for _ in range(100):
            A = mc.random_complex(rng, 4)
            assert mc.trace_norm(A) >= abs(np.trace(A)) - 1e-12


class TestSuperoperators:
    def test_identity_map(self):
        S = mc.superoperator_of_map(lambda A: A, 2)
        assert np.allclose(S, np.eye(4))

    def test_maximally_mixed_weighting(self):
        sig = np.eye(2) / 2.0
        half = mc.matrix_power(sig, 0.5)
        S = mc.superoperator_of_map(lambda A: half @ A @ half, 2)
        assert np.allclose(S, np.eye(4) / 2.0)

    def test_left_multiplication_is_kron(self, rng):
        X = mc.random_complex(rng, 3)
        S = mc.superoperator_of_map(lambda A: X @ A, 3)
        assert np.allclose(S, np.kron(np.eye(3), X))
        assert np.allclose(S, mc.left_mult_superop(X))

    def test_round_trip(self, rng):
        X, Y = mc.random_complex(rng, 3), mc.random_complex(rng, 3)
        S = mc.superoperator_of_map(lambda A: X @ A @ Y + A, 3)
        for _ in range(20):
            A = mc.random_complex(rng, 3)
            assert np.linalg.norm(mc.apply_superop(S, A) - (X @ A @ Y + A)) <= 1e-12

    def test_trace_norm_zero_and_identity(self):
        assert mc.superop_trace_norm(np.zeros((4, 4))) == 0.0
        assert mc.superop_trace_norm(np.eye(4)) == pytest.approx(4.0, abs=1e-13)

    def test_trace_norm_of_sqrt_weighting(self, cm_sigma):
        half = mc.matrix_power(cm_sigma, 0.5)
        S = mc.superoperator_of_map(lambda A: half @ A @ half, 2)
        lam = np.linalg.eigvalsh(cm_sigma)
        assert mc.superop_trace_norm(S) == pytest.approx(np.sum(np.sqrt(lam)) ** 2, abs=1e-12)


class TestValidation:
    def test_density_trace(self):
        with pytest.raises(StructuralError, match="trace"):
            mc.require_density(np.diag([0.6, 0.6]))

    def test_density_negativity(self):
        with pytest.raises(StructuralError, match="negative"):
            mc.require_density(np.diag([1.2, -0.2]))

    def test_strict_rank(self):
        with pytest.raises(SingularityError):
            mc.require_density(np.diag([1.0, 0.0]), strict=True)


class TestCsvBlocks:
    def test_round_trip(self, rng):
        A = mc.random_complex(rng, 3)
        name, B = mc.matrix_from_csv_block(mc.matrix_to_csv_block("probe", A))
        assert name == "probe"
        assert np.array_equal(A, B)

    def test_rows_round_trip(self, rng):
        A = mc.random_complex(rng, 4)
        assert np.array_equal(mc.rows_to_matrix(mc.matrix_to_rows(A)), A)

    def test_bad_header(self):
        with pytest.raises(StructuralError):
            mc.matrix_from_csv_block("nope,x,2\n1,0,0,0\n0,0,1,0")
