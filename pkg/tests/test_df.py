"""Tests for the decode-and-forward baseline."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import orthogonal_pair

from twrelay.beamformer import RateProfile, envelope_value, max_sum_rate
from twrelay.df import (
    _project_psd_trace,
    bc_boundary,
    bc_ray_exit,
    bc_wsrmax,
    df_boundary_value,
    df_capacity_region,
    df_tau_slice,
    mac_region,
)
from twrelay.errors import InvalidInputError
from twrelay.model import ChannelPair, PowerConfig, effective, gen_channels


class TestMacRegion:
    def test_sum_bound_matches_full_determinant(self):
        pair = gen_channels(4, 0.95, seed=21)
        pent = mac_region(pair, 100.0, 100.0)
        big = (
            np.eye(4)
            + 100.0 * np.outer(pair.h1, pair.h1.conj())
            + 100.0 * np.outer(pair.h2, pair.h2.conj())
        )
        assert pent.c_sum == pytest.approx(
            math.log2(np.linalg.det(big).real), abs=1e-10
        )

    def test_orthonormal_channels_decouple(self):
        pent = mac_region(orthogonal_pair(), 10.0, 10.0)
        assert pent.c1 == pytest.approx(math.log2(11.0), abs=1e-12)
        assert pent.c2 == pytest.approx(math.log2(11.0), abs=1e-12)
        assert pent.c_sum == pytest.approx(2.0 * math.log2(11.0), abs=1e-12)

    def test_silent_source_degenerates_to_segment(self):
        pent = mac_region(orthogonal_pair(), 0.0, 10.0)
        assert pent.c2 == 0.0
        assert pent.c1 > 0.0

    def test_parallel_unit_channels_share_one_dimension(self):
        h = np.array([1.0, 0.0], dtype=complex)
        pair = ChannelPair(m=2, h1=h, h2=h.copy(), rho=1.0, seed=None)
        pent = mac_region(pair, 10.0, 10.0)
        assert pent.c_sum == pytest.approx(math.log2(21.0), abs=1e-12)

    def test_individual_bounds(self):
        pair = gen_channels(3, 0.4, seed=5)
        pent = mac_region(pair, 7.0, 11.0)
        assert pent.c1 == pytest.approx(math.log2(1.0 + 11.0 * pair.theta2))
        assert pent.c2 == pytest.approx(math.log2(1.0 + 7.0 * pair.theta1))

    def test_pentagon_shape_invariant(self):
        pair = gen_channels(4, 0.8, seed=2)
        pent = mac_region(pair, 100.0, 100.0)
        assert max(pent.c1, pent.c2) <= pent.c_sum <= pent.c1 + pent.c2
        for r21, r12 in pent.corners():
            assert r21 <= pent.c1 + 1e-12
            assert r12 <= pent.c2 + 1e-12
            assert r21 + r12 <= pent.c_sum + 1e-12

    def test_ray_exit_agrees_with_caps(self):
        pair = gen_channels(4, 0.8, seed=2)
        pent = mac_region(pair, 100.0, 100.0)
        assert pent.ray_exit(RateProfile.of(1.0)) == pytest.approx(pent.c1)
        assert pent.ray_exit(RateProfile.of(0.0)) == pytest.approx(pent.c2)
        assert pent.ray_exit(RateProfile.of(0.5)) == pytest.approx(pent.c_sum)

    def test_negative_power_rejected(self):
        with pytest.raises(InvalidInputError):
            mac_region(orthogonal_pair(), -1.0, 1.0)


class TestBcWsrmax:
    def test_single_link_closed_form(self):
        pair = gen_channels(4, 0.95, seed=21)
        point = bc_wsrmax(pair, 100.0, 1.0, 0.0)
        assert point.rates.r21 == pytest.approx(
            math.log2(1.0 + 100.0 * pair.theta1), abs=1e-8
        )
        point = bc_wsrmax(pair, 100.0, 0.0, 1.0)
        assert point.rates.r12 == pytest.approx(
            math.log2(1.0 + 100.0 * pair.theta2), abs=1e-8
        )

    def test_orthonormal_equal_weights_split_evenly(self):
        point = bc_wsrmax(orthogonal_pair(), 10.0, 1.0, 1.0)
        np.testing.assert_allclose(
            point.S_reduced, 5.0 * np.eye(2), atol=1e-6
        )
        assert point.rates.r21 == pytest.approx(math.log2(6.0), abs=1e-8)
        assert point.rates.r12 == pytest.approx(math.log2(6.0), abs=1e-8)

    def test_covariance_is_feasible_and_consistent(self):
        pair = gen_channels(4, 0.6, seed=8)
        point = bc_wsrmax(pair, 25.0, 0.7, 0.3)
        assert np.trace(point.S_reduced).real <= 25.0 * (1.0 + 1e-8)
        assert np.min(np.linalg.eigvalsh(point.S_reduced)) >= -1e-9
        S = point.full()
        s1 = (pair.h1 @ S @ pair.h1.conj()).real
        s2 = (pair.h2 @ S @ pair.h2.conj()).real
        assert point.rates.r21 == pytest.approx(math.log2(1.0 + s1), abs=1e-9)
        assert point.rates.r12 == pytest.approx(math.log2(1.0 + s2), abs=1e-9)

    def test_off_span_power_is_wasted(self):
        pair = gen_channels(4, 0.6, seed=8)
        point = bc_wsrmax(pair, 25.0, 0.7, 0.3)
        q = np.ones(4, dtype=complex)
        q -= point.basis @ (point.basis.conj().T @ q)
        q /= np.linalg.norm(q)
        S = point.full() + 5.0 * np.outer(q, q.conj())
        assert (pair.h1 @ S @ pair.h1.conj()).real == pytest.approx(
            (pair.h1 @ point.full() @ pair.h1.conj()).real, rel=1e-10
        )

    def test_invalid_inputs_rejected(self):
        pair = gen_channels(2, 0.3, seed=1)
        with pytest.raises(InvalidInputError):
            bc_wsrmax(pair, 0.0, 1.0, 1.0)
        with pytest.raises(InvalidInputError):
            bc_wsrmax(pair, 10.0, 0.0, 0.0)
        with pytest.raises(InvalidInputError):
            bc_wsrmax(pair, 10.0, -1.0, 1.0)


class TestBcBoundary:
    def test_sweep_monotone_and_concave(self):
        pair = gen_channels(4, 0.95, seed=21)
        bc = bc_boundary(pair, 100.0, n_weights=17)
        xs = [p.r21 for p in bc.points]
        ys = [p.r12 for p in bc.points]
        assert all(a <= b + 1e-9 for a, b in zip(xs, xs[1:]))
        assert all(a >= b - 1e-9 for a, b in zip(ys, ys[1:]))
        slopes = [
            (y2 - y1) / (x2 - x1)
            for (x1, y1), (x2, y2) in zip(zip(xs, ys), zip(xs[1:], ys[1:]))
            if x2 - x1 > 1e-9
        ]
        assert all(a >= b - 1e-6 for a, b in zip(slopes, slopes[1:]))

    def test_covariances_feasible(self):
        bc = bc_boundary(gen_channels(3, 0.5, seed=4), 10.0, n_weights=9)
        for S in bc.covariances:
            assert np.trace(S).real <= 10.0 + 1e-8
            assert np.min(np.linalg.eigvalsh(S)) >= -1e-9

    def test_ray_exit_matches_dense_weight_sweep(self):
        pair = gen_channels(4, 0.7, seed=13)
        profile = RateProfile.of(0.35)
        t = bc_ray_exit(pair, 50.0, profile)
        best = 0.0
        for w in np.linspace(0.0, 1.0, 201):
            rates = bc_wsrmax(pair, 50.0, w, 1.0 - w).rates
            best = max(
                best,
                min(rates.r21 / profile.alpha21, rates.r12 / profile.alpha12),
            )
        assert t == pytest.approx(best, abs=1e-6)

    def test_ray_exit_degenerate_profiles(self):
        pair = gen_channels(4, 0.95, seed=21)
        assert bc_ray_exit(pair, 100.0, RateProfile.of(1.0)) == pytest.approx(
            math.log2(1.0 + 100.0 * pair.theta1), abs=1e-8
        )
        assert bc_ray_exit(pair, 100.0, RateProfile.of(0.0)) == pytest.approx(
            math.log2(1.0 + 100.0 * pair.theta2), abs=1e-8
        )


class TestDfRegion:
    def test_single_tau_grid_is_the_equal_split_slice(self):
        pair = gen_channels(4, 0.95, seed=21)
        pent = mac_region(pair, 100.0, 100.0)
        bc = bc_boundary(pair, 100.0, n_weights=33)
        slice_pts = df_tau_slice(pent, bc, 0.5)
        region = df_capacity_region(pair, 100.0, 100.0, 100.0, n_tau=1, n_weights=33)
        got = {(p.rates.r21, p.rates.r12) for p in region.points}
        want = {
            (x, y)
            for x, y in slice_pts
            if not any(
                (a >= x and b > y) or (a > x and b >= y) for a, b in slice_pts
            )
        }
        assert want <= got

    def test_tau_refinement_only_enlarges(self):
        pair = gen_channels(4, 0.8, seed=21)
        coarse = df_capacity_region(pair, 100.0, 100.0, 100.0, n_tau=5, n_weights=17)
        fine = df_capacity_region(pair, 100.0, 100.0, 100.0, n_tau=17, n_weights=17)
        for x in np.linspace(0.0, 3.0, 7):
            assert envelope_value(fine, float(x)) >= envelope_value(
                coarse, float(x)
            ) - 1e-9

    def test_grid_region_approaches_exact_ray_values(self):
        # the grid region is an inner approximation whose ray exits
        # converge to the closed-form time-share optimum
        pair = gen_channels(4, 0.8, seed=21)
        region = df_capacity_region(pair, 100.0, 100.0, 100.0, n_tau=257, n_weights=65)
        for alpha in (0.25, 0.5, 0.75):
            profile = RateProfile.of(alpha)
            t, tau = df_boundary_value(pair, 100.0, 100.0, 100.0, profile)
            assert 0.0 < tau < 1.0
            grid_t = max(
                min(
                    p.rates.r21 / profile.alpha21,
                    p.rates.r12 / profile.alpha12,
                )
                for p in region.points
            )
            assert grid_t <= t + 1e-9
            assert grid_t == pytest.approx(t, abs=0.02)

    def test_equal_split_value_is_contained_and_dominated(self):
        pair = gen_channels(4, 0.95, seed=21)
        pent = mac_region(pair, 100.0, 100.0)
        for alpha in (0.0, 0.25, 0.5, 0.8, 1.0):
            profile = RateProfile.of(alpha)
            t_mac = pent.ray_exit(profile)
            t_bc = bc_ray_exit(pair, 100.0, profile)
            t, _ = df_boundary_value(pair, 100.0, 100.0, 100.0, profile)
            assert t >= 0.5 * min(t_mac, t_bc) - 1e-9
            assert t <= min(t_mac, t_bc) + 1e-9

    def test_half_mac_inside_half_bc_at_figure_settings(self):
        # makes the tau = 1/2 region equal to half the MAC pentagon
        for rho in (0.95, 0.8):
            pair = gen_channels(4, rho, seed=21)
            pent = mac_region(pair, 100.0, 100.0)
            for r21, r12 in pent.corners():
                total = r21 + r12
                if total == 0.0:
                    continue
                profile = RateProfile.of(r21 / total)
                assert bc_ray_exit(pair, 100.0, profile) >= total - 1e-6

    def test_region_ordered(self):
        pair = gen_channels(4, 0.8, seed=21)
        region = df_capacity_region(pair, 100.0, 100.0, 100.0, n_tau=9, n_weights=9)
        r21 = [p.rates.r21 for p in region.points]
        r12 = [p.rates.r12 for p in region.points]
        assert all(a <= b + 1e-12 for a, b in zip(r21, r21[1:]))
        assert all(a >= b - 1e-12 for a, b in zip(r12, r12[1:]))

    def test_rejects_empty_tau_grid(self):
        with pytest.raises(InvalidInputError):
            df_capacity_region(gen_channels(2, 0.5, seed=0), 10.0, 10.0, 10.0, n_tau=0)

    def test_beats_forwarding_at_high_correlation_equal_rates(self):
        # at rho = 0.95 the optimal forwarding sum still lands between the
        # equal-split pentagon and the full time-shared region
        pc = PowerConfig(100.0, 100.0, 100.0)
        pair = gen_channels(4, 0.95, seed=21)
        profile = RateProfile.of(0.5)
        r_af, _ = max_sum_rate(effective(pair), pc, profile)
        t_df, _ = df_boundary_value(pair, 100.0, 100.0, 100.0, profile)
        half_mac = 0.5 * mac_region(pair, 100.0, 100.0).ray_exit(profile)
        assert t_df > r_af > half_mac

    def test_gain_over_forwarding_grows_as_correlation_drops(self):
        pc = PowerConfig(100.0, 100.0, 100.0)
        profile = RateProfile.of(0.5)
        gaps = []
        for rho in (0.95, 0.8):
            pair = gen_channels(4, rho, seed=21)
            r_af, _ = max_sum_rate(effective(pair), pc, profile)
            t_df, _ = df_boundary_value(pair, 100.0, 100.0, 100.0, profile)
            gaps.append(t_df - r_af)
        assert gaps[1] > gaps[0] > 0.0


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(min_value=0, max_value=2**16), budget=st.floats(0.1, 50.0))
def test_projection_is_feasible_and_idempotent(seed, budget):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    S = 0.5 * (X + X.conj().T)
    P = _project_psd_trace(S, budget)
    assert np.min(np.linalg.eigvalsh(P)) >= -1e-12
    assert np.trace(P).real <= budget * (1.0 + 1e-12)
    np.testing.assert_allclose(_project_psd_trace(P, budget), P, atol=1e-10)
