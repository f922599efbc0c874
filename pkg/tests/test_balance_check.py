import numpy as np
import pytest

import renyiflow.balance_check as bc
import renyiflow.matcore as mc
from renyiflow.generator import build_gns, eigen_jump_terms, random_gns_generator

# first verified run of the order sweep on the stock counterexample,
# cross-checked against the kernel-composition oracle; regression-pinned
FIG1_SNAPSHOT = {
    0.25: 0.0760762461469725,
    0.5: 0.04676349632100805,
    1.0: 0.014668977251963592,
    1.5: 0.004402235811781352,
    3.0: 0.0038778646735416248,
    4.0: 0.005630695394635205,
    6.0: 0.007268837631054095,
}


class TestCounterexampleConstruction:
    def test_stationary_state(self, counterexample, cm_sigma):
        assert np.linalg.norm(counterexample.apply_Ldag(cm_sigma)) <= 1e-12

    def test_channel_second_eigenvalue(self):
        psi = np.array([1.0, 1.0]) / np.sqrt(2.0)
        phi = np.array([1.0, 2.0]) / np.sqrt(5.0)
        K1, K2 = np.outer(psi, [1, 0]), np.outer(phi, [0, 1])
        S = mc.superoperator_of_map(
            lambda A: K1 @ A @ K1.conj().T + K2 @ A @ K2.conj().T, 2
        )
        mags = sorted(np.abs(np.linalg.eigvals(S)), reverse=True)
        assert mags[0] == pytest.approx(1.0, abs=1e-12)
        assert mags[1] == pytest.approx(0.3, abs=1e-12)

    def test_primitive_with_unital_generator(self, counterexample):
        assert counterexample.primitivity.primitive
        assert counterexample.primitivity.kernel_dim == 1
        assert np.linalg.norm(counterexample.apply_L(np.eye(2))) <= 1e-12


class TestKmsCheck:
    def test_gns_generators_pass(self, qubit_xz, depol, rng):
        for G in (qubit_xz, depol, random_gns_generator(rng, 3, min_sigma_eig=0.1)):
            assert bc.check_kms(G) <= 1e-10

    def test_counterexample_passes(self, counterexample):
        assert bc.check_kms(counterexample) <= 1e-10


class TestGnsCheck:
    def test_stock_generators_pass(self, qubit_xz, depol):
        assert bc.check_gns(qubit_xz) <= 1e-10
        assert bc.check_gns(depol) <= 1e-10

    def test_random_eigen_generator_passes(self, rng):
        sigma = mc.random_density(rng, 3, floor=0.1)
        G = build_gns(sigma, eigen_jump_terms(sigma))
        assert bc.check_gns(G) <= 1e-10

    def test_counterexample_fails(self, counterexample):
        assert bc.check_gns(counterexample) > 1e-3


class TestSrdCheck:
    def test_gns_generator_passes_all_orders(self, depol):
        res = bc.check_srd(depol, [0.5, 1.0, 2.0, 4.0])
        assert all(r <= 1e-9 for r in res.values())

    def test_counterexample_only_at_two(self, counterexample):
        res = bc.check_srd(counterexample, [0.5, 1.0, 1.5, 2.0, 3.0, 4.0])
        assert res[2.0] <= 1e-9
        for a, r in res.items():
            if a != 2.0:
                assert r >= 1e-3

    def test_order_one_equals_bkm(self, counterexample):
        assert bc.srd_residual(counterexample, 1.0) == pytest.approx(
            bc.check_bkm(counterexample), abs=1e-10
        )

    def test_nonpositive_orders_skipped(self, depol):
        with pytest.warns(UserWarning, match="skipping"):
            res = bc.check_srd(depol, [-1.0, 2.0])
        assert list(res) == [2.0]


class TestImplicationChain:
    def test_chain_on_available_generators(self, qubit_xz, depol, counterexample, rng):
        thr = bc.VERDICT_THRESHOLD
        for G in (qubit_xz, depol, counterexample, random_gns_generator(rng, 2)):
            rep = bc.balance_report(G)
            v = rep.verdicts
            if v["gns"]:
                assert v["srd"] and v["bkm"]
            if v["srd"]:
                assert rep.srd_residuals[2.0] <= thr and v["kms"]

    def test_srd_at_two_matches_kms_on_suite(self, qubit_xz, depol, counterexample):
        for G in (qubit_xz, depol, counterexample):
            assert abs(bc.srd_residual(G, 2.0) - bc.check_kms(G)) <= 1e-10

    def test_permutation_invariance(self, rng):
        sigma = mc.random_density(rng, 3, floor=0.1)
        terms = eigen_jump_terms(sigma)
        G1 = build_gns(sigma, terms)
        G2 = build_gns(sigma, terms[::-1])
        assert bc.check_gns(G1) == pytest.approx(bc.check_gns(G2), abs=1e-12)
        assert bc.check_kms(G1) == pytest.approx(bc.check_kms(G2), abs=1e-12)
        r1 = bc.check_srd(G1, [0.5, 2.0])
        r2 = bc.check_srd(G2, [0.5, 2.0])
        for a in r1:
            assert r1[a] == pytest.approx(r2[a], abs=1e-11)

    def test_weight_rescaling_keeps_residuals(self, counterexample, rng):
        # verdicts are scale-free: rescaling the generator leaves the
        # normalized residuals unchanged
        sigma = mc.random_density(rng, 3, floor=0.1)
        terms = eigen_jump_terms(sigma)
        from renyiflow.generator import JumpTerm

        G1 = build_gns(sigma, terms)
        G2 = build_gns(sigma, [JumpTerm.of(np.sqrt(2.0) * t.V, t.omega) for t in terms])
        assert bc.check_gns(G2) == pytest.approx(bc.check_gns(G1), abs=1e-11)


class TestFig1Sweep:
    def test_minimum_at_order_two(self, counterexample):
        grid = np.arange(0.25, 6.0 + 1e-9, 0.25)
        rows = bc.fig1_sweep(counterexample, grid)
        best_alpha, best_res = min(rows, key=lambda ar: ar[1])
        assert best_alpha == 2.0
        assert best_res <= 1e-9
        for a, r in rows:
            if a != 2.0:
                assert r >= 1e-3

    def test_gns_generator_flat_zero(self, depol):
        rows = bc.fig1_sweep(depol, [0.5, 1.0, 2.0, 4.0])
        assert all(r <= 1e-9 for _, r in rows)

    def test_regression_snapshot(self, counterexample):
        rows = dict(bc.fig1_sweep(counterexample, list(FIG1_SNAPSHOT)))
        for a, expected in FIG1_SNAPSHOT.items():
            assert rows[a] == pytest.approx(expected, rel=1e-9, abs=1e-12)
