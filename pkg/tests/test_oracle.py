"""Tests for the independent pattern-search oracle."""

import math

import numpy as np
import pytest

from conftest import orthogonal_pair, symmetric_power

from twrelay.beamformer import RateProfile, max_sum_rate, min_relay_power
from twrelay.errors import InvalidInputError
from twrelay.model import PowerConfig, effective, gen_channels, rate_pair, relay_power
from twrelay.oracle import oracle_max_sum_rate, oracle_min_power

LOG2_3 = math.log2(3.0)


class TestOracleMaxSumRate:
    def test_orthogonal_closed_form_sandwich(self):
        pair = orthogonal_pair()
        pc = PowerConfig(4.0, 4.0, 10.0)
        res = oracle_max_sum_rate(effective(pair), pc, RateProfile.of(0.5))
        assert res.value >= LOG2_3 - 1e-2  # search reaches the optimum
        assert res.value <= LOG2_3 + 1e-12  # and cannot beat it

    def test_witness_certifies_value(self):
        pair = gen_channels(4, 0.5, seed=3)
        pc = symmetric_power(10.0)
        res = oracle_max_sum_rate(effective(pair), pc, RateProfile.of(0.35))
        rates = rate_pair(res.witness, pair, pc)
        t = min(rates.r21 / 0.35, rates.r12 / 0.65)
        assert t == pytest.approx(res.value, abs=1e-9)
        assert relay_power(res.witness, pair, pc) <= pc.p_relay * (1.0 + 1e-9)

    def test_agrees_with_solver(self):
        pair = gen_channels(4, 0.5, seed=3)
        pc = symmetric_power(10.0)
        res = oracle_max_sum_rate(effective(pair), pc, RateProfile.of(0.5))
        opt, _ = max_sum_rate(effective(pair), pc, RateProfile.of(0.5))
        assert abs(res.value - opt) <= 1e-3

    def test_degenerate_profile(self):
        pair = gen_channels(4, 0.3, seed=6)
        pc = symmetric_power(10.0)
        res = oracle_max_sum_rate(effective(pair), pc, RateProfile.of(1.0))
        rates = rate_pair(res.witness, pair, pc)
        assert rates.r21 == pytest.approx(res.value, abs=1e-9)

    def test_zero_budget(self):
        res = oracle_max_sum_rate(effective(orthogonal_pair()), PowerConfig(4.0, 4.0, 0.0), RateProfile.of(0.5))
        assert res.value == 0.0

    def test_deterministic_per_seed(self):
        pair = gen_channels(4, 0.3, seed=5)
        pc = symmetric_power(10.0)
        a = oracle_max_sum_rate(effective(pair), pc, RateProfile.of(0.5), seed=7)
        b = oracle_max_sum_rate(effective(pair), pc, RateProfile.of(0.5), seed=7)
        assert a.value == b.value
        assert np.array_equal(a.witness, b.witness)

    def test_invalid_profile_rejected(self):
        with pytest.raises(InvalidInputError):
            RateProfile(alpha21=1.5, alpha12=-0.5)


class TestOracleMinPower:
    def test_orthogonal_closed_form_sandwich(self):
        pair = orthogonal_pair()
        pc = PowerConfig(4.0, 4.0, 10.0)
        res = oracle_min_power(effective(pair), pc, 2.0, 2.0)
        assert res.value <= 10.0 + 1e-2  # search reaches the minimum
        assert res.value >= 10.0 * (1.0 - 1e-9)  # and cannot undercut it

    def test_witness_meets_targets(self):
        pair = gen_channels(4, 0.5, seed=1)
        pc = symmetric_power(10.0)
        res = oracle_min_power(effective(pair), pc, 1.5, 1.0)
        rates = rate_pair(res.witness, pair, pc)
        assert rates.r21 >= 0.5 * math.log2(1.0 + 1.5) - 1e-9
        assert rates.r12 >= 0.5 * math.log2(1.0 + 1.0) - 1e-9
        assert relay_power(res.witness, pair, pc) == pytest.approx(
            res.value, rel=1e-9
        )

    def test_agrees_with_solver(self):
        pair = gen_channels(4, 0.5, seed=1)
        pc = symmetric_power(10.0)
        res = oracle_min_power(effective(pair), pc, 1.5, 1.0)
        p_star, _ = min_relay_power(effective(pair), pc, 1.5, 1.0)
        assert abs(res.value - p_star) / p_star <= 1e-2

    def test_zero_targets_cost_nothing(self):
        res = oracle_min_power(effective(orthogonal_pair()), symmetric_power(10.0), 0.0, 0.0)
        assert res.value == 0.0
        assert np.all(res.witness == 0.0)

    def test_unreachable_snr_ceiling_reported_infeasible(self):
        # target equals the forwarded-noise ceiling p2 theta2: no finite
        # power reaches it
        res = oracle_min_power(effective(orthogonal_pair()), PowerConfig(4.0, 1.0, 10.0), 1.0, 0.5)
        assert res.value == math.inf
        assert res.witness is None

    def test_silent_source_infeasible(self):
        res = oracle_min_power(effective(orthogonal_pair()), PowerConfig(0.0, 4.0, 10.0), 0.0, 1.0)
        assert res.value == math.inf
        assert res.witness is None

    def test_negative_target_rejected(self):
        with pytest.raises(InvalidInputError):
            oracle_min_power(effective(orthogonal_pair()), symmetric_power(10.0), -1.0, 1.0)
