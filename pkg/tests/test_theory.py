import math

import numpy as np
import pytest
from scipy import special

from becjump import theory
from becjump._special import erfcx, log_binom
from becjump.jump import fringe_stats
from becjump.trajectory import SimConfig, equal_position_state, run_ensemble


class TestSpecial:
    def test_erfcx_against_scipy(self):
        x = np.concatenate([np.linspace(0, 10, 2001), np.logspace(1, 12, 200)])
        np.testing.assert_allclose(erfcx(x), special.erfcx(x), rtol=1e-13)

    def test_erfcx_negative(self):
        x = np.linspace(-4, 0, 101)
        np.testing.assert_allclose(erfcx(x), special.erfcx(x), rtol=1e-13)

    def test_erfcx_from_definition(self):
        # moderate arguments, where exp(x^2) erfc(x) is representable directly
        for x in (0.0, 0.3, 1.0, 2.5, 5.0):
            assert erfcx(x) == pytest.approx(math.exp(x * x) * math.erfc(x), rel=1e-12)

    def test_log_binom_exact(self):
        for n, k in [(200, 100), (10, 0), (10, 10), (57, 13)]:
            assert log_binom(n, k) == pytest.approx(math.log(math.comb(n, k)), rel=1e-13, abs=1e-13)
        assert log_binom(5, 6) == -np.inf
        assert log_binom(5, -1) == -np.inf


class TestFirstDetections:
    def test_equal_numbers(self):
        assert theory.mean_beta_after_1(100, 100) == pytest.approx(0.50251256, abs=1e-8)
        assert theory.mean_beta_after_1(100, 100) == pytest.approx(0.5 / (1 - 1 / 200), rel=1e-14)

    def test_one_each(self):
        assert theory.mean_beta_after_1(1, 1) == 1

    def test_empty_mode(self):
        assert theory.mean_beta_after_1(7, 0) == 0

    def test_second(self):
        assert theory.mean_beta_after_2(30, 10) == pytest.approx(4 / math.pi * theory.mean_beta_after_1(30, 10))

    def test_domain(self):
        with pytest.raises(theory.DomainError):
            theory.mean_beta_after_1(1, 0)


class TestEqualPositionApprox:
    def test_values(self):
        assert theory.beta_equalpos_approx(1) == pytest.approx(0.3679, abs=1e-4)
        assert theory.beta_equalpos_approx(1e6) == pytest.approx(1, abs=1e-5)

    def test_unequal_prefactor(self):
        assert theory.beta_unequal_approx(200, 50, 1e12) == pytest.approx(0.8, abs=1e-9)

    @pytest.mark.parametrize("k", [1, 2, 7.5, 40])
    def test_reductions(self, k):
        assert theory.beta_unequal_approx(37, 37, k) == pytest.approx(theory.beta_equalpos_approx(k), abs=1e-12)
        assert theory.beta_imperfect(k, 1.0) == pytest.approx(theory.beta_equalpos_approx(k), abs=1e-12)

    @pytest.mark.parametrize("k,eta", [(2, 0.5), (10, 0.3), (7, 0.9)])
    def test_efficiency_substitution(self, k, eta):
        assert theory.beta_imperfect(k, eta) == theory.beta_equalpos_approx(eta * k)

    def test_imperfect_example(self):
        assert theory.beta_imperfect(2, 0.5) == pytest.approx(math.exp(-1))

    def test_monotone(self):
        vals = [theory.beta_equalpos_approx(k) for k in range(1, 300)]
        assert all(b > a for a, b in zip(vals, vals[1:]))

    def test_domain(self):
        with pytest.raises(theory.DomainError):
            theory.beta_equalpos_approx(0.5)
        with pytest.raises(theory.DomainError):
            theory.beta_imperfect(3, 0.0)


class TestPhaseProbability:
    def test_full_detection_peak(self):
        assert theory.pphi_approx(50, 100, 0.0) == pytest.approx(1)

    def test_k10(self):
        assert theory.pphi_approx(100, 10, 0.0) == pytest.approx(0.5 * math.sqrt(10 * 390) / 100)
        assert theory.pphi_approx(100, 10, 0.0) == pytest.approx(0.3122, abs=1e-4)

    def test_k1_undershoots_exact(self):
        approx = theory.pphi_approx(100, 1, 0.0)
        assert approx == pytest.approx(0.0999, abs=1e-4)
        assert approx < 2 * math.comb(200, 100) / 2**200

    def test_vectorized(self):
        phis = np.linspace(-1, 1, 7)
        got = theory.pphi_approx(100, 30, phis)
        assert got.shape == phis.shape
        assert np.argmax(got) == 3

    @pytest.mark.parametrize("n", [5, 50, 100])
    def test_imperfect_reduces(self, n):
        for k in range(1, 2 * n + 1, max(1, n // 5)):
            for phi in (0.0, 0.05, 0.3):
                assert theory.pphi_imperfect(n, k, 1.0, phi) == pytest.approx(
                    theory.pphi_approx(n, k, phi), abs=1e-12
                )

    def test_imperfect_is_substitution(self):
        # n -> n - xi k, k -> eta k with xi = (1 - eta) / 2
        n, k, eta = 100, 40, 0.6
        xi = theory.ApproxParams(eta=eta).xi
        for phi in (0.0, 0.1):
            assert theory.pphi_imperfect(n, k, eta, phi) == pytest.approx(
                theory.pphi_approx(n - xi * k, eta * k, phi), rel=1e-12
            )


class TestTime:
    def test_start(self):
        assert theory.mean_remaining(200, 1, 0) == 200
        assert theory.mean_detected(200, 1, 0) == 0

    def test_half_life(self):
        t = math.log(2) / 2
        assert theory.mean_remaining(200, 1, t) == pytest.approx(100)
        assert theory.mean_detected(200, 1, t) == pytest.approx(100)

    def test_long_time(self):
        assert theory.mean_remaining(200, 1, 1e3) == pytest.approx(0, abs=1e-12)
        assert theory.mean_detected(200, 1, 1e3) == pytest.approx(200)

    def test_sum_and_monotone(self):
        ts = np.linspace(0, 3, 50)
        rem = [theory.mean_remaining(120, 0.7, t) for t in ts]
        assert all(b < a for a, b in zip(rem, rem[1:]))
        for t, r in zip(ts, rem):
            assert r + theory.mean_detected(120, 0.7, t) == pytest.approx(120)

    def test_inverse(self):
        t = theory.time_for_mean_detected(200, 1.0, 10)
        assert theory.mean_detected(200, 1.0, t) == pytest.approx(10)


class TestCollisions:
    def test_revival(self):
        kappa = 0.37
        assert theory.beta_collision_acs(150, kappa, math.pi / (2 * kappa)) == pytest.approx(1)

    def test_small_time_gaussian(self):
        N, kt = 150, 0.01
        assert theory.beta_collision_acs(N, 1.0, kt) == pytest.approx(math.exp(-2 * kt**2 * (N - 1)), rel=2e-3)

    def test_psik_start(self):
        assert theory.beta_collision_psik(100, 30, 2.0, 0.0) == pytest.approx(math.exp(-1 / 30))

    def test_exponents_converge_near_full_detection(self):
        # ratio of the psi_k decay exponent to the coherent-state one (N = 2n - k atoms)
        n = 100
        ratios = [theory.collision_decay_exponent(n, k) / (2 * n - k - 1) for k in range(1, 2 * n - 1)]
        assert ratios[0] < 0.01
        assert all(b > a for a, b in zip(ratios, ratios[1:]))
        assert ratios[-1] == pytest.approx(1, abs=0.011)

    def test_slow_decay_for_few_detections(self):
        # k << n: exp(-kappa^2 t^2 k)
        n, k = 10_000, 10
        assert theory.collision_decay_exponent(n, k) == pytest.approx(k / 2, rel=1e-3)


class TestSteadyState:
    def test_weak_collisions(self):
        assert theory.beta_steady(100, 50, 1.0, 1e-9) == pytest.approx(1, abs=1e-6)

    def test_strong_collisions(self):
        assert theory.beta_steady(100, 50, 1.0, 1e9) == pytest.approx(0.5, abs=1e-6)

    def test_averaged_factor_by_quadrature(self):
        from scipy.integrate import quad

        n, k, gamma, kappa = 100, 30, 1.0, 5.0
        c = theory.collision_decay_exponent(n, k)
        rate = 2 * (2 * n - k) * gamma
        direct, _ = quad(lambda t: math.exp(-2 * c * kappa**2 * t**2) * rate * math.exp(-rate * t), 0, np.inf)
        assert theory.mean_decay_before_next_detection(n, k, gamma, kappa) == pytest.approx(direct, rel=1e-9)

    def test_closed_form_solves_balance(self):
        avg = theory.mean_decay_before_next_detection(100, 60, 1.0, 2.0)
        k0 = 1 + 1 / math.sqrt(1 - avg)
        assert (1 - 1 / k0) * avg == pytest.approx(1 - 1 / (k0 - 1), abs=1e-12)
        assert theory.beta_steady(100, 60, 1.0, 2.0) == pytest.approx(1 - 1 / k0, abs=1e-12)

    def test_ordering_in_kappa(self):
        for k in (10, 100, 180):
            vals = [theory.beta_steady(100, k, 1.0, kap) for kap in (0.5, 2.0, 5.0)]
            assert vals[0] > vals[1] > vals[2]

    @pytest.mark.slow
    def test_overestimates_simulation_for_few_detections(self):
        n = 100
        ks = tuple(range(10, 51, 10))
        cfg = SimConfig(n, n, kappa=5.0, seed=3, max_detections=ks[-1], record_at=ks)
        curve = run_ensemble(cfg, 200)["beta_c"]
        for p in curve.points:
            assert p.mean < theory.beta_steady(n, int(p.x), 1.0, 5.0)


class TestOverlapDecay:
    def test_start(self):
        assert theory.max_overlap_decay(100, 20, 3.0, 0.0) == pytest.approx(theory.pphi_approx(100, 20, 0.0))

    def test_root_two(self):
        n, k, kappa = 100, 20, 3.0
        t = 2 * n / (kappa * k * (2 * n - k))
        assert theory.max_overlap_decay(n, k, kappa, t) == pytest.approx(theory.pphi_approx(n, k, 0.0) / math.sqrt(2))

    def test_time_scale_inverse_in_k(self):
        n, kappa = 1000, 1.0

        def t_half(k):
            return 2 * n / (kappa * k * (2 * n - k))

        assert t_half(2) / t_half(4) == pytest.approx(2, rel=2e-3)


def _pipeline_beta(n, k):
    return fringe_stats(equal_position_state(n, k, 0.0)).beta_c


class TestOracles:
    def test_equalpos_k1_state_vector(self):
        assert theory.oracle_beta_equalpos(100, 1) == pytest.approx(_pipeline_beta(100, 1), abs=1e-10)

    def test_equalpos_gap_at_four(self):
        b = theory.oracle_beta_equalpos(100, 4)
        assert abs(b - math.exp(-1 / 4)) / math.exp(-1 / 4) == pytest.approx(0.03, abs=0.01)

    def test_equalpos_vacuum_guard(self):
        with pytest.raises(theory.DomainError):
            theory.oracle_beta_equalpos(10, 20)

    @pytest.mark.parametrize("n", [1, 2, 7, 20, 50])
    def test_equalpos_agrees_with_state_vector(self, n):
        for k in range(0, 2 * n):
            assert theory.oracle_beta_equalpos(n, k) == pytest.approx(_pipeline_beta(n, k), rel=1e-9, abs=1e-300)

    def test_quadrature_first_detection(self):
        assert theory.oracle_mean_beta_quadrature(100, 100, 1) == pytest.approx(0.502513, abs=1e-6)

    def test_quadrature_unequal(self):
        assert theory.oracle_mean_beta_quadrature(200, 50, 1) == pytest.approx(
            2 * 200 * 50 / (250**2 - 250), abs=1e-6
        )

    def test_quadrature_second_detection_small(self):
        assert theory.oracle_mean_beta_quadrature(5, 3, 2) == pytest.approx(theory.mean_beta_after_2(5, 3), abs=1e-4)

    def test_quadrature_domain(self):
        with pytest.raises(theory.DomainError):
            theory.oracle_mean_beta_quadrature(3, 3, 3)
        with pytest.raises(theory.DomainError):
            theory.oracle_mean_beta_quadrature(3, 3, 1, points=100)
