import math

import numpy as np
import pytest

from cocktail_bpsk.link_sim import (
    CHUNK_SIZE,
    CancellationMode,
    SimConfig,
    ber_analytic_layer1,
    ber_analytic_layer2,
    mi_monte_carlo,
    mi_monte_carlo_stats,
    simulate,
)
from cocktail_bpsk.mi_core import Constellation, NoiseSpec, mi_discrete_awgn, q_function
from cocktail_bpsk.scheme import CocktailParams, mi_exact_total

P = CocktailParams(1.0, 0.7)
UNIT = NoiseSpec(1.0)
FOUR_POINT = Constellation.equiprobable((1.7, 0.3, -0.3, -1.7))


class TestConfig:
    def test_mode_aliases(self):
        assert SimConfig(10, 0, "dd").cancellation_mode is CancellationMode.DECISION_DIRECTED
        assert SimConfig(10, 0, "decision_directed").cancellation_mode is CancellationMode.DECISION_DIRECTED
        assert SimConfig(10, 0, "genie").cancellation_mode is CancellationMode.GENIE

    @pytest.mark.parametrize("kw", [{"num_symbols": 0}, {"num_symbols": 5, "seed": -1},
                                    {"num_symbols": 5, "seed": 2**64}, {"num_symbols": 5, "mode": "x"}])
    def test_rejects_invalid(self, kw):
        kw = dict(kw)
        mode = kw.pop("mode", "genie")
        with pytest.raises(ValueError):
            SimConfig(cancellation_mode=mode, **kw)


class TestSimulate:
    @pytest.mark.parametrize("mode", ["genie", "dd"])
    def test_noiseless_is_error_free(self, mode):
        r = simulate(P, NoiseSpec(1e-9), SimConfig(50_000, 3, mode))
        assert r.ber_layer1 == 0 and r.ber_layer2 == 0
        assert r.errors_layer1 == 0 and r.errors_layer2 == 0
        assert r.mi_sample_total_bits == pytest.approx(2.0, abs=1e-9)

    def test_genie_layer1_matches_analytic(self):
        r = simulate(P, UNIT, SimConfig(1_000_000, 7, "genie"))
        assert abs(r.ber_layer1 - ber_analytic_layer1(P, UNIT)) <= 4 * r.stderr_ber1

    def test_genie_layer2_matches_plain_bpsk(self):
        r = simulate(P, UNIT, SimConfig(1_000_000, 8, "genie"))
        assert abs(r.ber_layer2 - q_function(0.7)) <= 4 * r.stderr_ber2

    def test_error_propagation_only_adds_errors(self):
        g = simulate(P, UNIT, SimConfig(200_000, 11, "genie"))
        d = simulate(P, UNIT, SimConfig(200_000, 11, "dd"))
        assert d.errors_layer1 == g.errors_layer1
        assert d.ber_layer2 >= g.ber_layer2

    def test_report_fields_consistent(self):
        r = simulate(P, NoiseSpec(0.4), SimConfig(12_345, 5, "dd"))
        assert r.symbols == 12_345
        assert r.errors_layer1 == round(r.ber_layer1 * r.symbols)
        assert r.errors_layer2 == round(r.ber_layer2 * r.symbols)
        for p, se in [(r.ber_layer1, r.stderr_ber1), (r.ber_layer2, r.stderr_ber2)]:
            assert 0 <= p <= 1
            assert se == pytest.approx(math.sqrt(p * (1 - p) / r.symbols))

    def test_deterministic_and_worker_independent(self):
        n = 3 * CHUNK_SIZE + 17
        a = simulate(P, UNIT, SimConfig(n, 42, "dd", workers=1))
        b = simulate(P, UNIT, SimConfig(n, 42, "dd", workers=1))
        c = simulate(P, UNIT, SimConfig(n, 42, "dd", workers=4))
        assert a == b == c

    def test_seed_changes_draws(self):
        a = simulate(P, UNIT, SimConfig(10_000, 1))
        b = simulate(P, UNIT, SimConfig(10_000, 2))
        assert a != b

    def test_sample_mi_tracks_quadrature(self):
        r = simulate(P, UNIT, SimConfig(1_000_000, 9))
        assert r.mi_sample_total_bits == pytest.approx(mi_discrete_awgn(FOUR_POINT, UNIT).value_bits, abs=3e-3)


class TestAnalyticBer:
    def test_vanishing_noise(self):
        assert ber_analytic_layer1(P, NoiseSpec(1e-4)) < 1e-20

    def test_equal_amplitude_limit(self):
        p = CocktailParams(1.0, 1.0 - 1e-9)
        sigma = 0.8
        expected = 0.5 * q_function(2 / sigma) + 0.25
        assert ber_analytic_layer1(p, NoiseSpec(sigma**2)) == pytest.approx(expected, abs=1e-8)

    def test_substitution(self):
        assert ber_analytic_layer1(P, UNIT) == 0.5 * q_function(1.7) + 0.5 * q_function(1.0 - 0.7)
        assert ber_analytic_layer2(P, UNIT) == q_function(0.7)


class TestMiMonteCarlo:
    def test_single_point_is_exactly_zero(self):
        assert mi_monte_carlo(Constellation.equiprobable([2.5]), UNIT, 5000, 3) == 0.0

    def test_requires_enough_samples(self):
        with pytest.raises(ValueError):
            mi_monte_carlo(FOUR_POINT, UNIT, 999, 1)

    def test_deterministic(self):
        assert mi_monte_carlo(FOUR_POINT, UNIT, 20_000, 4) == mi_monte_carlo(FOUR_POINT, UNIT, 20_000, 4)

    def test_unequal_priors(self):
        c = Constellation((-1.0, 0.5, 2.0), (0.2, 0.5, 0.3))
        est, se = mi_monte_carlo_stats(c, NoiseSpec(0.5), 400_000, 2)
        assert abs(est - mi_discrete_awgn(c, NoiseSpec(0.5)).value_bits) <= 4 * se

    @pytest.mark.slow
    def test_four_point_matches_exact_total(self):
        # rail variance 1 corresponds to complex-channel noise power 2
        est, se = mi_monte_carlo_stats(FOUR_POINT, UNIT, 10_000_000, 1, workers=4)
        assert abs(est - mi_exact_total(P, NoiseSpec(2.0))) <= 3 * se

    def test_error_shrinks_with_n(self):
        c = Constellation.equiprobable([1.0, -1.0])
        exact = mi_discrete_awgn(c, UNIT).value_bits
        mean_err = [
            np.mean([abs(mi_monte_carlo(c, UNIT, n, s) - exact) for s in range(10)])
            for n in (10**4, 10**5, 10**6)
        ]
        assert mean_err[0] >= mean_err[1] >= mean_err[2]
