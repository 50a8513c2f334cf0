"""Tests for the quantum engine: kick spectra, resonance, SE channel,
ensemble evolution and its determinism guarantees."""

import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.special import jv

from kickedbec.engine import (
    EnsembleSpec,
    MomentumHistogram,
    QuantumParams,
    RotorState,
    SEModel,
    apply_kick,
    apply_spontaneous_emission,
    evolve_ensemble,
    evolve_one_period,
    free_propagation_phase,
    kinetic_energy,
    sample_beta_ensemble,
    se_probability_from_formula,
    suggest_basis,
)
from kickedbec.errors import BasisOverflowError

TWO_PI = 2 * math.pi

FIG1 = dict(k=1.4, tau=5.97, eta=0.0257)


def plane_wave(q, n=0, beta=0.5):
    amps = np.zeros(q.basis_size, dtype=np.complex128)
    amps[n - q.n_min] = 1.0
    return RotorState(beta=beta, amplitudes=amps)


class TestBetaSampler:
    def test_degenerate_width_gives_center(self):
        q = QuantumParams(**FIG1, n_min=-8, n_max=7)
        states = sample_beta_ensemble(EnsembleSpec(count=1, beta_fwhm=0.0, seed=3), q)
        assert states[0].beta == 0.5
        assert states[0].amplitudes[0 - q.n_min] == 1.0
        assert states[0].norm == 1.0

    def test_sample_statistics(self):
        q = QuantumParams(**FIG1, n_min=-8, n_max=7)
        states = sample_beta_ensemble(EnsembleSpec(count=10_000, seed=12), q)
        betas = np.array([s.beta for s in states])
        assert abs(betas.mean() - 0.5) < 0.002
        fwhm = betas.std(ddof=1) * 2.0 * math.sqrt(2.0 * math.log(2.0))
        assert abs(fwhm - 0.06) < 0.005

    def test_deterministic_for_seed(self):
        q = QuantumParams(**FIG1, n_min=-8, n_max=7)
        a = [s.beta for s in sample_beta_ensemble(EnsembleSpec(count=64, seed=5), q)]
        b = [s.beta for s in sample_beta_ensemble(EnsembleSpec(count=64, seed=5), q)]
        assert a == b

    def test_folded_into_unit_interval(self):
        q = QuantumParams(**FIG1, n_min=-8, n_max=7)
        spec = EnsembleSpec(count=500, beta_center=0.98, beta_fwhm=0.3, seed=1)
        betas = [s.beta for s in sample_beta_ensemble(spec, q)]
        assert all(0.0 <= b < 1.0 for b in betas)


class TestFreePhase:
    def test_direct_evaluation(self):
        q = QuantumParams(**FIG1, n_min=-8, n_max=7)
        # (5.97/2) * (0.5 + 0.0257/2)**2
        assert free_propagation_phase(0, 0.5, 0, q) == pytest.approx(
            0.7851001406625001, abs=1e-15
        )

    def test_no_gravity_no_kick_dependence(self):
        q = QuantumParams(k=1.0, tau=5.97, eta=0.0, n_min=-8, n_max=7)
        assert free_propagation_phase(3, 0.25, 0, q) == free_propagation_phase(3, 0.25, 17, q)

    def test_resonance_phases_are_global(self):
        # tau=2*pi, beta=1/2: phi_n = pi*(n^2+n) + pi/4 and n^2+n is even,
        # so exp(-i*phi_n) is the same for every n.
        q = QuantumParams(k=1.0, tau=TWO_PI, eta=0.0, n_min=-50, n_max=49)
        phases = np.exp(-1j * np.array(
            [free_propagation_phase(n, 0.5, 0, q) for n in range(-50, 50)]
        ))
        assert np.max(np.abs(phases - phases[0])) < 1e-9


class TestKick:
    def test_zero_strength_is_identity(self):
        q = QuantumParams(k=0.0, tau=5.97, eta=0.0, n_min=-16, n_max=15)
        st = plane_wave(q, n=2)
        out = apply_kick(st, 0.0)
        assert np.allclose(out.amplitudes, st.amplitudes, atol=1e-15)

    def test_bessel_weights_against_quadrature(self):
        # independent oracle: c_m = (1/2pi) Int exp(-i k cos t) e^{-i m t} dt
        # for the initial plane wave n=0
        k = 1.4
        q = QuantumParams(k=k, tau=5.97, eta=0.0257, n_min=-32, n_max=31)
        out = apply_kick(plane_wave(q, n=0), k)

        def coeff(m):
            re = quad(lambda t: math.cos(k * math.cos(t) + m * t), 0, TWO_PI)[0]
            im = quad(lambda t: -math.sin(k * math.cos(t) + m * t), 0, TWO_PI)[0]
            return complex(re, im) / TWO_PI

        for m in (-3, -2, -1, 0, 1, 2, 3, 5):
            got = abs(out.amplitudes[m - q.n_min]) ** 2
            assert got == pytest.approx(abs(coeff(m)) ** 2, abs=1e-12)
            assert got == pytest.approx(jv(m, k) ** 2, abs=1e-12)

    def test_norm_preserved(self):
        rng = np.random.default_rng(2)
        q = QuantumParams(k=1.1, tau=5.97, eta=0.0, n_min=-64, n_max=63)
        amps = rng.normal(size=128) + 1j * rng.normal(size=128)
        amps[:16] = amps[-16:] = 0.0  # keep clear of the basis edge
        amps /= np.linalg.norm(amps)
        st = RotorState(beta=0.3, amplitudes=amps)
        out = apply_kick(st, 1.1)
        assert abs(out.norm - 1.0) < 1e-12

    def test_overflow_raises(self):
        q = QuantumParams(k=2.0, tau=5.97, eta=0.0, n_min=-4, n_max=3)
        with pytest.raises(BasisOverflowError):
            apply_kick(plane_wave(q, n=0), 2.0)


class TestOnePeriod:
    def test_resonance_energy_growth(self):
        # tau=2*pi, beta=1/2: after t kicks the state is exp(-i*k*t*cos)
        # up to a global phase, so <n^2>/2 = (k*t)^2/4.
        k, t = 0.8, 50
        lo, hi = suggest_basis(k=k, tau=TWO_PI, eta=0.0, kicks=t)
        q = QuantumParams(k=k, tau=TWO_PI, eta=0.0, n_min=lo, n_max=hi)
        st = plane_wave(q, n=0)
        for _ in range(t):
            st = evolve_one_period(st, q)
        expected = (k * t) ** 2 / 4.0
        assert abs(kinetic_energy(st, q) - expected) / expected < 1e-6
        assert st.kick_index == t

    def test_free_evolution_only_changes_phases(self):
        q = QuantumParams(k=0.0, tau=5.97, eta=0.0, n_min=-8, n_max=7)
        rng = np.random.default_rng(3)
        amps = np.zeros(16, dtype=np.complex128)
        amps[4:12] = rng.normal(size=8) + 1j * rng.normal(size=8)
        amps /= np.linalg.norm(amps)
        st = RotorState(beta=0.2, amplitudes=amps)
        out = evolve_one_period(st, q)
        assert np.allclose(np.abs(out.amplitudes), np.abs(amps), atol=1e-13)


class TestSpontaneousEmission:
    def test_zero_recoil_is_identity(self):
        q = QuantumParams(**FIG1, n_min=-8, n_max=7)
        st = plane_wave(q, n=0, beta=0.5)
        out = apply_spontaneous_emission(st, 0.0)
        assert out.beta == 0.5
        assert np.array_equal(out.amplitudes, st.amplitudes)

    def test_recoil_with_carry(self):
        q = QuantumParams(**FIG1, n_min=-8, n_max=7)
        st = plane_wave(q, n=0, beta=0.5)
        out = apply_spontaneous_emission(st, 0.7)
        assert out.beta == pytest.approx(0.2, abs=1e-15)
        assert abs(out.amplitudes[1 - q.n_min]) == 1.0  # moved to n=1
        assert abs(out.norm - 1.0) < 1e-15

    def test_negative_recoil(self):
        q = QuantumParams(**FIG1, n_min=-8, n_max=7)
        st = plane_wave(q, n=0, beta=0.5)
        out = apply_spontaneous_emission(st, -0.7)
        assert out.beta == pytest.approx(0.8, abs=1e-15)
        assert abs(out.amplitudes[-1 - q.n_min]) == 1.0

    def test_rejects_out_of_range_recoil(self):
        q = QuantumParams(**FIG1, n_min=-8, n_max=7)
        with pytest.raises(ValueError):
            apply_spontaneous_emission(plane_wave(q), 1.5)

    def test_formula_probability(self):
        delta = TWO_PI * 6.8e9
        tau_se = 26e-9
        p = se_probability_from_formula(1.4, delta, tau_se)
        assert p == pytest.approx(1.4 / (tau_se * delta), rel=1e-12)
        assert p == pytest.approx(1.260e-3, abs=2e-6)
        assert se_probability_from_formula(0.0, delta, tau_se) == 0.0
        assert se_probability_from_formula(1.4, 2 * delta, tau_se) == pytest.approx(p / 2)
        with pytest.raises(ValueError):
            se_probability_from_formula(1.0, -1.0, tau_se)

    def test_model_modes(self):
        assert SEModel().probability(1.4) == 0.0
        assert SEModel(enabled=True, mode="fixed", p_per_kick=0.007).probability(1.4) == 0.007
        m = SEModel(enabled=True, mode="formula", detuning=TWO_PI * 6.8e9, lifetime=26e-9)
        assert m.probability(1.4) == pytest.approx(1.260e-3, abs=2e-6)
        with pytest.raises(ValueError):
            SEModel(mode="sometimes")


class TestEvolveEnsemble:
    def small_params(self, kicks=40):
        lo, hi = suggest_basis(**FIG1, kicks=kicks)
        return QuantumParams(**FIG1, n_min=lo, n_max=hi)

    def test_matches_single_rotor_evolution(self):
        kicks = 30
        q = self.small_params(kicks)
        states = sample_beta_ensemble(EnsembleSpec(count=3, seed=9), q)
        res = evolve_ensemble(states, q, kicks=kicks, stride=kicks)
        for st0, fin in zip(states, res.final_states):
            ref = st0
            for _ in range(kicks):
                ref = evolve_one_period(ref, q)
            # ensemble amplitudes carry an extra rotor-global phase
            assert np.allclose(
                np.abs(fin.amplitudes) ** 2, np.abs(ref.amplitudes) ** 2, atol=1e-12
            )

    def test_k_zero_histogram_is_delta_forever(self):
        q = QuantumParams(k=0.0, tau=5.97, eta=0.0257, n_min=-130, n_max=125)
        states = sample_beta_ensemble(EnsembleSpec(count=1, seed=4), q)
        res = evolve_ensemble(states, q, kicks=20, stride=5)
        for h in res.histograms:
            assert h.window_sum(0, 0) == pytest.approx(1.0, abs=1e-12)

    def test_histograms_normalized(self):
        q = self.small_params()
        states = sample_beta_ensemble(EnsembleSpec(count=8, seed=4), q)
        res = evolve_ensemble(states, q, kicks=40, stride=10)
        for h in res.histograms:
            assert h.total() == pytest.approx(1.0, abs=1e-8)

    def test_norm_conserved_long_run(self):
        # no renormalization anywhere: cumulative drift stays tiny over
        # fifty thousand kicks
        q = QuantumParams(k=0.6, tau=5.97, eta=0.0, n_min=-256, n_max=255)
        states = sample_beta_ensemble(EnsembleSpec(count=2, seed=6), q)
        res = evolve_ensemble(states, q, kicks=50_000, stride=50_000)
        assert abs(res.histograms[-1].total() - 1.0) < 1e-8

    def test_workers_do_not_change_bytes(self):
        kicks = 25
        q = self.small_params(kicks)
        se = SEModel(enabled=True, mode="fixed", p_per_kick=0.05)
        states = sample_beta_ensemble(EnsembleSpec(count=150, seed=21), q)
        runs = []
        for workers in (1, 3):
            res = evolve_ensemble(states, q, kicks=kicks, se=se, seed=21,
                                  stride=5, workers=workers)
            runs.append(res)
        for ha, hb in zip(runs[0].histograms, runs[1].histograms):
            assert np.array_equal(ha.p, hb.p)
            assert np.array_equal(ha.n, hb.n)
        for sa, sb in zip(runs[0].final_states, runs[1].final_states):
            assert sa.beta == sb.beta
            assert np.array_equal(sa.amplitudes, sb.amplitudes)

    def test_se_off_equals_p_zero(self):
        kicks = 15
        q = self.small_params(kicks)
        states = sample_beta_ensemble(EnsembleSpec(count=5, seed=2), q)
        a = evolve_ensemble(states, q, kicks=kicks, se=None, seed=2)
        b = evolve_ensemble(states, q, kicks=kicks,
                            se=SEModel(enabled=True, mode="fixed", p_per_kick=0.0), seed=2)
        for ha, hb in zip(a.histograms, b.histograms):
            assert np.array_equal(ha.p, hb.p)

    def test_se_events_shift_quasimomenta(self):
        kicks = 50
        q = self.small_params(kicks)
        se = SEModel(enabled=True, mode="fixed", p_per_kick=0.5)
        states = sample_beta_ensemble(EnsembleSpec(count=10, seed=8), q)
        res = evolve_ensemble(states, q, kicks=kicks, se=se, seed=8)
        changed = sum(
            1 for s0, s1 in zip(states, res.final_states) if s0.beta != s1.beta
        )
        assert changed == 10  # p=0.5 over 50 kicks: an untouched rotor is absurd

    def test_mode_drift_matches_map_prediction(self):
        kicks = 60
        q = self.small_params(kicks)
        states = sample_beta_ensemble(EnsembleSpec(count=64, seed=5), q)
        res = evolve_ensemble(states, q, kicks=kicks, stride=5)
        drift = q.drift_per_kick
        ts, centers = [], []
        for h in res.histograms:
            if h.kick_index >= 20:
                c = round(drift * h.kick_index)
                sel = (h.n >= c - 5) & (h.n <= c + 5)
                w = h.p[sel]
                centers.append(float((h.n[sel] * w).sum() / w.sum()))
                ts.append(h.kick_index)
        slope = np.polyfit(ts, centers, 1)[0]
        assert slope == pytest.approx(drift, rel=0.05)

    def test_overflow_reports_rotor_and_kick(self):
        q = QuantumParams(k=1.4, tau=5.97, eta=0.0257, n_min=-12, n_max=11)
        states = sample_beta_ensemble(EnsembleSpec(count=2, seed=3), q)
        with pytest.raises(BasisOverflowError) as exc:
            evolve_ensemble(states, q, kicks=100, stride=10)
        assert exc.value.kick is not None


class TestHistogram:
    def test_window_sum_clips_to_support(self):
        h = MomentumHistogram(kick_index=0, n=np.arange(-2, 3), p=np.full(5, 0.2))
        assert h.window_sum(-1, 1) == pytest.approx(0.6)
        assert h.window_sum(-10, 10) == pytest.approx(1.0)
        assert h.window_sum(5, 9) == 0.0

    def test_mean(self):
        h = MomentumHistogram(kick_index=0, n=np.array([1, 2, 3]),
                              p=np.array([0.25, 0.5, 0.25]))
        assert h.mean_momentum() == pytest.approx(2.0)


class TestSuggestBasis:
    def test_covers_drift(self):
        lo, hi = suggest_basis(k=1.4, tau=5.97, eta=0.0257, kicks=1000)
        assert lo < -100
        assert hi > 0.4899 * 1000

    def test_resonance_is_ballistic(self):
        lo, hi = suggest_basis(k=0.8, tau=TWO_PI, eta=0.0, kicks=50)
        assert hi >= 0.8 * 50 and lo <= -0.8 * 50
