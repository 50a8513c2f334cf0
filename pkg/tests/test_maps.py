"""Tests for the pseudo-classical map: step, fixed points, portraits, area."""

import math

import numpy as np
import pytest

from kickedbec.errors import MapRegularError
from kickedbec.maps import (
    TWO_PI,
    MapParams,
    PhasePoint,
    estimate_island_area,
    find_period1_fixed_point,
    iterate_map,
    map_step,
    map_step_inverse,
    momentum_to_map_coordinate,
    occupancy_grid,
    phase_portrait,
)

# tau=5.97, eta=0.0257, k=1.4: the main parameter set used throughout.
FIG1 = MapParams.from_quantum(k=1.4, tau=5.97, eta=0.0257)

# Frozen values from the closed forms (asin/trace evaluated in double):
FIG1_THETA_STAR = 0.35749367976482016
FIG1_TRACE = 1.58926138024284


def random_params(rng):
    return MapParams(
        k_tilde=rng.uniform(0.0, 3.0),
        eps_sign=int(rng.choice([-1, 1])),
        tau_eta=rng.uniform(-0.5, 0.5),
        tau=rng.uniform(4.0, 8.0),
    )


class TestMapStep:
    def test_free_rotation_only(self):
        m = MapParams(k_tilde=0.0, eps_sign=-1, tau_eta=0.0, tau=5.97)
        p = map_step(PhasePoint(1.0, 0.5), m)
        assert p.theta == pytest.approx(0.5, abs=1e-15)
        assert p.momentum_j == 0.5

    def test_fig1_fixed_point_is_invariant(self):
        p = PhasePoint(FIG1_THETA_STAR, 0.0)
        q = map_step(p, FIG1)
        assert abs(q.theta - p.theta) < 1e-12
        assert abs(q.momentum_j) < 1e-12
        # iterating keeps it pinned
        th, jj = iterate_map(p, FIG1, 1000)
        assert np.max(np.abs(th - FIG1_THETA_STAR)) < 1e-9
        assert np.max(np.abs(jj)) < 1e-9

    def test_inverse_roundtrip(self):
        rng = np.random.default_rng(7)
        for _ in range(1000):
            m = random_params(rng)
            p = PhasePoint(rng.uniform(0, TWO_PI), rng.uniform(-20, 20))
            q = map_step_inverse(map_step(p, m), m)
            assert abs(q.theta - p.theta) < 1e-12
            assert abs(q.momentum_j - p.momentum_j) < 1e-12

    def test_jacobian_determinant_is_one(self):
        # independent check by central finite differences
        rng = np.random.default_rng(11)
        h = 1e-6
        for _ in range(1000):
            m = random_params(rng)
            th = rng.uniform(0.3, TWO_PI - 0.3)
            jj = rng.uniform(-3, 3)

            def step(t, j):
                # avoid the mod-2*pi seam inside the difference stencil
                s = float(m.eps_sign)
                t1 = t + s * j
                return t1, j + m.k_tilde * math.sin(t1 % TWO_PI) + s * m.tau_eta

            t_tp, j_tp = step(th + h, jj)
            t_tm, j_tm = step(th - h, jj)
            t_jp, j_jp = step(th, jj + h)
            t_jm, j_jm = step(th, jj - h)
            a = (t_tp - t_tm) / (2 * h)
            b = (t_jp - t_jm) / (2 * h)
            c = (j_tp - j_tm) / (2 * h)
            d = (j_jp - j_jm) / (2 * h)
            assert abs(a * d - b * c - 1.0) < 1e-6


class TestFixedPoint:
    def test_fig1_closed_form(self):
        fp = find_period1_fixed_point(FIG1)
        assert fp.exists and fp.stable
        assert fp.point.theta == pytest.approx(FIG1_THETA_STAR, abs=1e-12)
        assert fp.point.momentum_j % TWO_PI == pytest.approx(0.0, abs=1e-12)
        assert fp.trace == pytest.approx(FIG1_TRACE, abs=1e-12)

    def test_no_mode_when_gravity_exceeds_kick(self):
        m = MapParams(k_tilde=0.1, eps_sign=-1, tau_eta=0.5, tau=5.97)
        assert not find_period1_fixed_point(m).exists

    def test_elliptic_root_selected_without_gravity(self):
        m = MapParams(k_tilde=0.5, eps_sign=-1, tau_eta=0.0, tau=5.97)
        fp = find_period1_fixed_point(m)
        assert fp.exists and fp.stable
        assert fp.point.theta == pytest.approx(0.0, abs=1e-12)
        assert fp.trace == pytest.approx(1.5, abs=1e-12)

    def test_unstable_at_strong_kick(self):
        m = MapParams(k_tilde=10.0, eps_sign=-1, tau_eta=0.15, tau=5.97)
        fp = find_period1_fixed_point(m)
        assert fp.exists and not fp.stable

    def test_linearized_orbit_stays_bounded(self):
        fp = find_period1_fixed_point(FIG1)
        d0 = 1e-4
        seed = PhasePoint(fp.point.theta + d0, 0.0)
        th, jj = iterate_map(seed, FIG1, 10_000)
        dist = np.hypot(th - fp.point.theta, jj)
        assert np.max(dist) < 10 * d0

    def test_random_valid_fixed_points_are_invariant(self):
        rng = np.random.default_rng(23)
        found = 0
        for _ in range(200):
            m = random_params(rng)
            fp = find_period1_fixed_point(m)
            if not fp.exists:
                continue
            found += 1
            q = map_step(fp.point, m)
            assert abs((q.theta - fp.point.theta + math.pi) % TWO_PI - math.pi) < 1e-12
            assert abs(q.momentum_j - fp.point.momentum_j) < 1e-12
        assert found > 50


class TestMomentumToMapCoordinate:
    def test_fig1_initial_state_lands_next_to_island(self):
        j_map = momentum_to_map_coordinate(n=0, beta=0.5, j=0, m=FIG1)
        assert j_map == pytest.approx(-6.203307153589793, abs=1e-12)
        assert j_map % TWO_PI == pytest.approx(0.07987815358979322, abs=1e-12)

    def test_plain_formula_case(self):
        m = MapParams.from_quantum(k=1.0, tau=TWO_PI + 0.3, eta=0.0)
        j_map = momentum_to_map_coordinate(n=1, beta=0.0, j=0, m=m)
        assert j_map % TWO_PI == pytest.approx((0.3 + math.pi) % TWO_PI, abs=1e-12)

    def test_kinematic_drift_per_kick(self):
        for j in range(5):
            d = momentum_to_map_coordinate(0, 0.25, j + 1, FIG1) - \
                momentum_to_map_coordinate(0, 0.25, j, FIG1)
            assert d == pytest.approx(FIG1.eps_sign * FIG1.tau_eta, abs=1e-12)

    def test_rejects_bad_beta(self):
        with pytest.raises(ValueError):
            momentum_to_map_coordinate(0, 1.0, 0, FIG1)


class TestModeDrift:
    def test_trapped_orbit_gains_momentum_at_drift_rate(self):
        # An orbit trapped on the island keeps J pinned near 0, so in the
        # quantum momentum n = (J - sgn(eps)*(pi + tau*(beta + j*eta + eta/2)))/|eps|
        # it must gain tau*eta/|eps| per kick.
        fp = find_period1_fixed_point(FIG1)
        seed = PhasePoint(fp.point.theta + 0.03, 0.0)
        kicks = 10_000
        th, jj = iterate_map(seed, FIG1, kicks)
        assert np.max(np.abs(jj)) < 1.0  # still trapped
        s = FIG1.eps_sign
        j_idx = np.arange(1, kicks + 1)
        beta = 0.5
        n_of_j = (jj - s * (math.pi + FIG1.tau * (beta + j_idx * FIG1.eta + FIG1.eta / 2))) / FIG1.eps_abs
        drift = (n_of_j[-1] - n_of_j[0]) / (kicks - 1)
        expected = FIG1.tau_eta / FIG1.eps_abs
        assert abs(drift - expected) / expected < 1e-3


class TestPortrait:
    def test_fixed_point_seed_never_moves(self):
        fp = find_period1_fixed_point(FIG1)
        cloud = phase_portrait(FIG1, [fp.point], kicks=100)
        assert np.allclose(cloud.theta, fp.point.theta, atol=1e-9)
        assert np.allclose(cloud.momentum_j, 0.0, atol=1e-9)

    def test_island_seed_traces_bounded_curve(self):
        fp = find_period1_fixed_point(FIG1)
        seed = PhasePoint(fp.point.theta + 0.05, 0.0)
        cloud = phase_portrait(FIG1, [seed], kicks=10_000)
        d = np.hypot(cloud.theta - fp.point.theta,
                     (cloud.momentum_j + math.pi) % TWO_PI - math.pi)
        assert np.max(d) < 0.5

    def test_chaotic_seed_fills_sea_but_not_island(self):
        fp = find_period1_fixed_point(FIG1)
        seed = PhasePoint((fp.point.theta + math.pi) % TWO_PI, math.pi)
        cloud = phase_portrait(FIG1, [seed], kicks=200_000)
        n = 64
        grid = np.zeros((n, n), dtype=bool)
        ci = np.minimum((cloud.theta / TWO_PI * n).astype(int), n - 1)
        cj = np.minimum((cloud.momentum_j / TWO_PI * n).astype(int), n - 1)
        grid[ci, cj] = True
        assert grid.mean() > 0.3
        fi = min(int(fp.point.theta / TWO_PI * n), n - 1)
        fj = 0
        assert not grid[fi, fj]


class TestIslandArea:
    def test_fig1_area_converges(self):
        # The island boundary is resolved like 1/N, so the 2% criterion
        # needs N >= 256 for these parameters.
        est = estimate_island_area(FIG1, grid_resolution=256, kicks=10**6)
        assert est.converged
        assert 0.0 < est.area < TWO_PI**2
        assert est.area_over_hbar == pytest.approx(est.area / FIG1.eps_abs)

    def test_successive_resolutions_agree(self):
        a256 = estimate_island_area(FIG1, grid_resolution=256, kicks=10**6).area
        a512 = estimate_island_area(FIG1, grid_resolution=512, kicks=10**6).area
        assert abs(a256 - a512) / a512 < 0.02

    def test_no_island_reports_zero(self):
        m = MapParams(k_tilde=10.0, eps_sign=-1, tau_eta=0.15, tau=5.97)
        est = estimate_island_area(m, grid_resolution=64, kicks=100_000)
        assert est.area == 0.0 and est.converged

    def test_regular_map_raises(self):
        m = MapParams(k_tilde=1e-4, eps_sign=-1, tau_eta=0.0, tau=5.97)
        with pytest.raises(MapRegularError):
            estimate_island_area(m, grid_resolution=64, kicks=100_000)

    def test_area_grows_with_kick_strength(self):
        # Stronger kick at fixed gravity -> larger island (Fig-1 regime).
        areas = []
        for k in (0.9, 1.4):
            m = MapParams.from_quantum(k=k, tau=5.97, eta=0.0257)
            areas.append(estimate_island_area(m, grid_resolution=128, kicks=10**6).area)
        assert areas[1] > areas[0] > 0

    def test_occupancy_grid_hole_contains_fixed_point(self):
        grid = occupancy_grid(FIG1, grid_resolution=64, kicks=400_000)
        fp = find_period1_fixed_point(FIG1)
        ci = min(int(fp.point.theta / TWO_PI * 64), 63)
        assert not grid[ci, 0]


class TestParamValidation:
    def test_rejects_negative_kick(self):
        with pytest.raises(ValueError):
            MapParams(k_tilde=-0.1, eps_sign=-1, tau_eta=0.0)

    def test_rejects_bad_sign(self):
        with pytest.raises(ValueError):
            MapParams(k_tilde=0.1, eps_sign=0, tau_eta=0.0)

    def test_from_quantum_consistency(self):
        m = MapParams.from_quantum(k=1.4, tau=5.97, eta=0.0257)
        assert m.k_tilde == pytest.approx(1.4 * abs(5.97 - TWO_PI), abs=1e-15)
        assert m.eps_sign == -1
        assert m.tau_eta == pytest.approx(5.97 * 0.0257, abs=1e-15)

    def test_from_quantum_rejects_resonance(self):
        with pytest.raises(ValueError):
            MapParams.from_quantum(k=1.0, tau=TWO_PI, eta=0.01)
