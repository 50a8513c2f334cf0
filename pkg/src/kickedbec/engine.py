"""Exact quantum evolution of beta-rotor ensembles in a kicked, accelerated
lattice.

Momentum decomposes as p = n + beta with integer n and conserved
quasimomentum beta in [0, 1).  One kick period applies, in this order,

  1. free flight:  c_n *= exp(-i * phi_n(j)),
         phi_n(j) = (tau/2) * (n + beta + eta*(j + 1/2))**2
  2. kick:         psi(theta) *= exp(-i * k * cos(theta))

Gravity enters only through the linear drift of the effective quasimomentum
beta + eta*j (the accelerated-frame gauge); the kick operator is
beta-independent.  eta*(j + 1/2) is the mid-period average of the drift.
n-independent phase terms are dropped throughout: rotors never interfere
with each other, so rotor-global phases are unobservable.

The kick is applied spectrally: transform to the angle grid, multiply by
the unit-modulus kick factor, transform back.  Norm is conserved to
rounding; amplitude reaching the edge of the momentum basis raises
BasisOverflowError rather than silently aliasing.

The ensemble path evolves rotors in fixed-size blocks of 64 so that results
are bitwise independent of how many worker threads execute the blocks, and
maintains the free-flight phase table incrementally (the kick-to-kick phase
ratio exp(-i*tau*eta*n) does not depend on the rotor).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.fft import fft, ifft, next_fast_len

from .errors import BasisOverflowError
from .maps import TWO_PI, MapParams

# Amplitude threshold at the basis edge beyond which spectral wrap-around
# is no longer negligible.
EDGE_TOLERANCE = 1e-12

# Rotors per evolution block; also the histogram reduction granularity.
# Fixed so that thread scheduling cannot change any floating-point result.
_BLOCK = 64

_FFT_WORKERS = 2

# Stream labels for counter-based RNG derivation.
_STREAM_BETA = 1
_STREAM_SE = 2

_GAUSS_FWHM_TO_SIGMA = 2.0 * math.sqrt(2.0 * math.log(2.0))


@dataclass(frozen=True)
class QuantumParams:
    """Quantum kicked-accelerator parameters.

    k      kick strength (dimensionless)
    tau    kick period in radians; eps = tau - 2*pi is the signed detuning
           from the resonance and |eps| the effective Planck constant
    eta    dimensionless gravity
    n_min, n_max   inclusive integer momentum basis bounds
    """

    k: float
    tau: float
    eta: float
    n_min: int
    n_max: int

    def __post_init__(self):
        if not self.k >= 0.0:
            raise ValueError(f"k must be >= 0, got {self.k}")
        if not self.tau > 0.0:
            raise ValueError(f"tau must be > 0, got {self.tau}")
        if self.n_max - self.n_min + 1 < 2:
            raise ValueError("basis must hold at least 2 momentum states")

    @property
    def eps(self) -> float:
        return self.tau - TWO_PI

    @property
    def hbar_eff(self) -> float:
        return abs(self.eps)

    @property
    def basis_size(self) -> int:
        return self.n_max - self.n_min + 1

    @property
    def drift_per_kick(self) -> float:
        """Accelerator-mode drift in momentum states per kick."""
        if self.eps == 0.0:
            return 0.0
        return -float(np.sign(self.eps)) * self.tau * self.eta / self.hbar_eff

    def n_values(self) -> np.ndarray:
        return np.arange(self.n_min, self.n_max + 1, dtype=np.int64)

    def to_map_params(self) -> MapParams:
        return MapParams.from_quantum(k=self.k, tau=self.tau, eta=self.eta)


@dataclass(frozen=True)
class RotorState:
    """One beta-rotor: quasimomentum plus amplitudes over the integer
    momentum basis of the owning QuantumParams (index 0 is n_min)."""

    beta: float
    amplitudes: np.ndarray
    kick_index: int = 0

    def __post_init__(self):
        if not 0.0 <= self.beta < 1.0:
            raise ValueError(f"beta must be in [0, 1), got {self.beta}")
        if self.kick_index < 0:
            raise ValueError("kick_index must be >= 0")

    @property
    def norm(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))


@dataclass(frozen=True)
class EnsembleSpec:
    """Initial ensemble: Gaussian quasimomenta, plane-wave momentum."""

    count: int
    beta_center: float = 0.5
    beta_fwhm: float = 0.06
    initial_n: int = 0
    seed: int = 0

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("count must be >= 1")
        if not 0.0 <= self.beta_fwhm < 1.0:
            raise ValueError("beta_fwhm must be in [0, 1)")


@dataclass(frozen=True)
class SEModel:
    """Spontaneous-emission channel: with probability p per rotor per kick,
    the total momentum is shifted rigidly by a recoil drawn uniformly from
    [-1, 1] (quasimomentum randomization, no amplitude damping).

    mode 'off'      no events
    mode 'fixed'    p = p_per_kick
    mode 'formula'  p = k / (lifetime * detuning)
    """

    enabled: bool = False
    mode: str = "off"
    p_per_kick: float = 0.0
    detuning: float | None = None
    lifetime: float | None = None

    def __post_init__(self):
        if self.mode not in ("off", "fixed", "formula"):
            raise ValueError(f"unknown SE mode {self.mode!r}")
        if not 0.0 <= self.p_per_kick < 1.0:
            raise ValueError("p_per_kick must be in [0, 1)")

    def probability(self, k: float) -> float:
        if not self.enabled or self.mode == "off":
            return 0.0
        if self.mode == "fixed":
            return self.p_per_kick
        return se_probability_from_formula(k, self.detuning, self.lifetime)


@dataclass(frozen=True)
class MomentumHistogram:
    """Ensemble momentum distribution after `kick_index` kicks.

    Probabilities are ensemble means over rotors, indexed by integer n;
    the sub-recoil beta offsets are metadata of the run, not of the bins.
    In the falling frame the lab momentum is n + beta + eta*kick_index.
    """

    kick_index: int
    n: np.ndarray
    p: np.ndarray
    frame: str = "falling"

    def total(self) -> float:
        return float(self.p.sum())

    def window_sum(self, n_lo: int, n_hi: int) -> float:
        lo = max(n_lo, int(self.n[0]))
        hi = min(n_hi, int(self.n[-1]))
        if hi < lo:
            return 0.0
        i0 = lo - int(self.n[0])
        return float(self.p[i0:i0 + hi - lo + 1].sum())

    def mean_momentum(self) -> float:
        return float(np.dot(self.n, self.p) / self.p.sum())


@dataclass(frozen=True)
class EvolveResult:
    histograms: list[MomentumHistogram]
    final_states: list[RotorState]


def se_probability_from_formula(k: float, detuning: float, lifetime: float) -> float:
    """Photon-scattering probability per kick, k / (lifetime * detuning),
    with the detuning in angular frequency units."""
    if detuning is None or lifetime is None:
        raise ValueError("formula mode needs detuning and lifetime")
    if detuning <= 0 or lifetime <= 0:
        raise ValueError("detuning and lifetime must be positive")
    if k < 0:
        raise ValueError("k must be >= 0")
    return k / (lifetime * detuning)


def _rng(seed: int, stream: int, index: int = 0) -> np.random.Generator:
    """Counter-based generator: draws depend only on (seed, stream, index)."""
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(stream, index))
    return np.random.Generator(np.random.Philox(ss))


def sample_beta_ensemble(spec: EnsembleSpec, q: QuantumParams) -> list[RotorState]:
    """Draw quasimomenta from the Gaussian (folded into [0, 1)) and build
    plane-wave rotors at n = initial_n.  Deterministic for a given seed."""
    if not q.n_min <= spec.initial_n <= q.n_max:
        raise ValueError("initial_n outside the momentum basis")
    sigma = spec.beta_fwhm / _GAUSS_FWHM_TO_SIGMA
    gen = _rng(spec.seed, _STREAM_BETA)
    betas = gen.normal(loc=spec.beta_center, scale=sigma, size=spec.count) % 1.0
    base = np.zeros(q.basis_size, dtype=np.complex128)
    base[spec.initial_n - q.n_min] = 1.0
    return [RotorState(beta=float(b), amplitudes=base.copy()) for b in betas]


def free_propagation_phase(n: int, beta: float, j: int, q: QuantumParams) -> float:
    """Phase accumulated by momentum state n during the free flight between
    kick j and kick j+1 (n-independent terms dropped elsewhere, not here)."""
    x = n + beta + q.eta * (j + 0.5)
    return 0.5 * q.tau * x * x


def _pow2_at_least(n: int) -> int:
    m = 1
    while m < n:
        m <<= 1
    return m


def _check_spill(spill_max: float, context: str, rotor=None, kick=None):
    if spill_max > EDGE_TOLERANCE:
        raise BasisOverflowError(
            f"momentum amplitude {spill_max:.3e} at {context}; "
            "the basis (or window margin) is too small for this run",
            rotor=rotor,
            kick=kick,
        )


def apply_kick(state: RotorState, k: float) -> RotorState:
    """Multiply the wavefunction by exp(-i*k*cos(theta)) on a padded
    power-of-two angle grid.  Raises BasisOverflowError if amplitude
    reaches the basis edge afterwards."""
    c = state.amplitudes
    b = c.shape[0]
    m = _pow2_at_least(b)
    theta = TWO_PI * np.arange(m) / m
    kick_factor = np.exp(-1j * k * np.cos(theta))
    padded = np.zeros(m, dtype=np.complex128)
    padded[:b] = c
    out = fft(ifft(padded) * kick_factor)
    spill = np.abs(out[b:]).max(initial=0.0)
    edge = max(abs(out[0]), abs(out[b - 1]))
    _check_spill(max(spill, edge), "basis edge after kick", kick=state.kick_index)
    return replace(state, amplitudes=np.ascontiguousarray(out[:b]))


def evolve_one_period(state: RotorState, q: QuantumParams) -> RotorState:
    """Free flight for the state's current kick index, then the kick."""
    n = q.n_values()
    x = n + state.beta + q.eta * (state.kick_index + 0.5)
    phase = np.exp(-0.5j * q.tau * x * x)
    freed = replace(state, amplitudes=state.amplitudes * phase)
    kicked = apply_kick(freed, q.k)
    return replace(kicked, kick_index=state.kick_index + 1)


def apply_spontaneous_emission(state: RotorState, delta: float) -> RotorState:
    """Shift the rotor's total momentum by the recoil delta in [-1, 1]:
    beta wraps into [0, 1) and the integer carry shifts the amplitude grid."""
    if not -1.0 <= delta <= 1.0:
        raise ValueError("recoil must lie in [-1, 1]")
    shifted = state.beta + delta
    carry = math.floor(shifted)
    new_beta = shifted - carry
    if new_beta >= 1.0:  # guard the carry against rounding at the seam
        new_beta -= 1.0
        carry += 1
    c = state.amplitudes
    if carry == 0:
        return replace(state, beta=new_beta)
    out = np.zeros_like(c)
    if carry > 0:
        dropped = np.abs(c[-carry:]).max(initial=0.0)
        out[carry:] = c[:-carry]
    else:
        dropped = np.abs(c[:-carry]).max(initial=0.0)
        out[:carry] = c[-carry:]
    _check_spill(dropped, "basis edge during recoil shift", kick=state.kick_index)
    return replace(state, beta=new_beta, amplitudes=out)


def kinetic_energy(state: RotorState, q: QuantumParams) -> float:
    """<n^2>/2 over the integer part of the momentum."""
    n = q.n_values().astype(np.float64)
    return float(0.5 * np.sum(n * n * np.abs(state.amplitudes) ** 2))


# ---------------------------------------------------------------------------
# Ensemble fast path


def _spectral_margin(k: float) -> int:
    return math.ceil(k + 10.0 * max(k, 1e-6) ** (1.0 / 3.0))


def _diffusion_margin(k: float, tau_eta: float, j: int) -> int:
    # 1e-12 amplitude contour of the chaotic bulk on the side opposite the
    # mode drift.  Two observed regimes: ~6 sigma of classical momentum
    # diffusion (sigma = k_tilde*sqrt(j/2)/|eps| = k*sqrt(j/2)) and, for
    # stronger gravity, a linear front moving at ~1.05*tau*eta states per
    # kick.  Cover both with headroom.
    j = max(j, 0)
    return math.ceil(8.0 * k * math.sqrt(j) + 1.3 * abs(tau_eta) * j)


def suggest_basis(
    k: float,
    tau: float,
    eta: float,
    kicks: int,
    initial_n: int = 0,
) -> tuple[int, int]:
    """Static basis bounds for a run: initial support plus the accumulated
    mode drift, the diffusive spread of the bulk, and spectral margins,
    padded to an FFT-fast total size."""
    eps = tau - TWO_PI
    drift = 0.0 if eps == 0.0 else -float(np.sign(eps)) * tau * eta / abs(eps)
    spectral = _spectral_margin(k)
    diff = _diffusion_margin(k, tau * eta, kicks) + 120 + 3 * spectral
    if eps == 0.0:
        # ballistic spread at the resonance
        diff = math.ceil(1.5 * k * kicks) + 40 + 3 * spectral
    ahead = 100 + 3 * spectral + math.ceil(0.02 * kicks)
    lo = initial_n - (diff if drift >= 0 else ahead) + min(0, math.floor(drift * kicks))
    hi = initial_n + (ahead if drift >= 0 else diff) + max(0, math.ceil(drift * kicks))
    size = next_fast_len(hi - lo + 1)
    if drift >= 0:
        hi = lo + size - 1
    else:
        lo = hi - size + 1
    return lo, hi


@dataclass
class _Window:
    """Active momentum sub-range [lo, hi] of the static basis."""

    lo: int
    hi: int

    @property
    def size(self) -> int:
        return self.hi - self.lo + 1


class _WindowSchedule:
    """Deterministic window growth, a pure function of the kick index.

    The active window starts around the initial support and expands with
    the predicted mode drift plus fixed margins.  It never depends on the
    evolving state, so every evolution block follows the same grid sizes
    and worker scheduling cannot perturb results.
    """

    def __init__(self, q: QuantumParams, init_lo: int, init_hi: int):
        self.q = q
        self.drift = q.drift_per_kick
        self.margin = 80 + 3 * _spectral_margin(q.k)
        self.init_lo = init_lo
        self.init_hi = init_hi
        self.full = q.eps == 0.0  # ballistic at the resonance: no windowing

    def needed(self, j: int) -> tuple[int, int]:
        if self.full:
            return self.q.n_min, self.q.n_max
        diff = _diffusion_margin(self.q.k, self.q.tau * self.q.eta, j)
        ahead = self.margin + math.ceil(0.02 * j)
        if self.drift >= 0:
            lo = self.init_lo - self.margin - diff
            hi = self.init_hi + ahead + math.ceil(self.drift * j)
        else:
            lo = self.init_lo - ahead + math.floor(self.drift * j)
            hi = self.init_hi + self.margin + diff
        return max(lo, self.q.n_min), min(hi, self.q.n_max)

    def window(self, j: int, current: _Window | None) -> _Window:
        lo, hi = self.needed(j)
        if current is not None and current.lo <= lo and hi <= current.hi:
            return current
        if current is not None:
            lo = min(lo, current.lo)
            hi = max(hi, current.hi)
        size = next_fast_len(hi - lo + 1)
        # distribute the fast-length padding along the drift direction first
        if self.drift >= 0:
            hi = lo + size - 1
            if hi > self.q.n_max:
                lo = max(self.q.n_min, lo - (hi - self.q.n_max))
                hi = self.q.n_max
        else:
            lo = hi - size + 1
            if lo < self.q.n_min:
                hi = min(self.q.n_max, hi + (self.q.n_min - lo))
                lo = self.q.n_min
        return _Window(lo, hi)


class _Block:
    """Up to 64 rotors evolved together on the shared window schedule."""

    def __init__(
        self,
        q: QuantumParams,
        betas: np.ndarray,
        amps: np.ndarray,
        win: _Window,
        j0: int,
        row_offset: int = 0,
    ):
        self.q = q
        self.beta = betas.copy()
        self.win = win
        self.amps = amps  # (rows, win.size) complex128; column a <-> n = lo + a
        self.j = j0
        self.row_offset = row_offset
        self.kick_factor = self._kick_vector(win.size)
        self.phase = self._exact_phase(self.j)
        self.ratio = self._phase_ratio()

    def _n_row(self) -> np.ndarray:
        return np.arange(self.win.lo, self.win.hi + 1, dtype=np.float64)

    def _kick_vector(self, m: int) -> np.ndarray:
        theta = TWO_PI * np.arange(m) / m
        return np.exp(-1j * self.q.k * np.cos(theta))

    def _exact_phase(self, j: int) -> np.ndarray:
        x = self._n_row()[None, :] + self.beta[:, None] + self.q.eta * (j + 0.5)
        return np.exp(-0.5j * self.q.tau * x * x)

    def _exact_phase_row(self, r: int, j: int) -> np.ndarray:
        x = self._n_row() + self.beta[r] + self.q.eta * (j + 0.5)
        return np.exp(-0.5j * self.q.tau * x * x)

    def _phase_ratio(self) -> np.ndarray:
        # phase(j+1)/phase(j) up to an unobservable rotor-global factor
        return np.exp(-1j * self.q.tau * self.q.eta * self._n_row())

    def grow(self, win: _Window):
        old = self.win
        off = old.lo - win.lo
        amps = np.zeros((self.amps.shape[0], win.size), dtype=np.complex128)
        amps[:, off:off + old.size] = self.amps
        self.amps = amps
        self.win = win
        self.kick_factor = self._kick_vector(win.size)
        self.phase = self._exact_phase(self.j)
        self.ratio = self._phase_ratio()

    def step(self, se_p: float, se_draws: np.ndarray | None):
        """One kick period for the whole block, then the SE channel."""
        self.amps *= self.phase
        psi = ifft(self.amps, axis=1, workers=_FFT_WORKERS, overwrite_x=True)
        psi *= self.kick_factor
        self.amps = fft(psi, axis=1, workers=_FFT_WORKERS, overwrite_x=True)

        edge = max(
            float(np.abs(self.amps[:, 0]).max()),
            float(np.abs(self.amps[:, -1]).max()),
        )
        if edge > EDGE_TOLERANCE:
            col = np.abs(self.amps[:, [0, -1]]).max(axis=1)
            _check_spill(
                edge, "window edge",
                rotor=self.row_offset + int(col.argmax()), kick=self.j + 1,
            )

        self.j += 1
        self.phase *= self.ratio

        if se_p > 0.0 and se_draws is not None:
            u, d = se_draws
            events = np.nonzero(u < se_p)[0]
            for r in events:
                self._recoil(int(r), float(d[r]))

    def _recoil(self, r: int, delta: float):
        shifted = self.beta[r] + delta
        carry = math.floor(shifted)
        new_beta = shifted - carry
        if new_beta >= 1.0:
            new_beta -= 1.0
            carry += 1
        self.beta[r] = new_beta
        if carry != 0:
            row = self.amps[r]
            out = np.zeros_like(row)
            if carry > 0:
                dropped = float(np.abs(row[-carry:]).max(initial=0.0))
                out[carry:] = row[:-carry]
            else:
                dropped = float(np.abs(row[:-carry]).max(initial=0.0))
                out[:carry] = row[-carry:]
            _check_spill(dropped, "window edge during recoil", rotor=r, kick=self.j)
            self.amps[r] = out
        # the free-flight phase table depends on beta
        self.phase[r] = self._exact_phase_row(r, self.j)

    def prob_sum(self) -> np.ndarray:
        return np.sum(np.abs(self.amps) ** 2, axis=0)


def _sample_kicks(j0: int, kicks: int, stride: int) -> list[int]:
    out = [j0]
    for j in range(j0 + 1, j0 + kicks + 1):
        if (j - j0) % stride == 0 or j == j0 + kicks:
            out.append(j)
    return sorted(set(out))


def _initial_support(states: list[RotorState], q: QuantumParams) -> tuple[int, int]:
    lo, hi = q.n_max, q.n_min
    for s in states:
        nz = np.nonzero(np.abs(s.amplitudes) > 1e-14)[0]
        if nz.size:
            lo = min(lo, q.n_min + int(nz[0]))
            hi = max(hi, q.n_min + int(nz[-1]))
    if lo > hi:
        raise ValueError("all input states are empty")
    return lo, hi


def evolve_ensemble(
    states: list[RotorState],
    q: QuantumParams,
    kicks: int,
    se: SEModel | None = None,
    seed: int = 0,
    stride: int = 1,
    workers: int = 1,
) -> EvolveResult:
    """Evolve every rotor independently for `kicks` periods, applying the
    spontaneous-emission channel after each kick with its per-kick
    probability, and aggregate momentum histograms every `stride` kicks
    (plus the initial and final kick).

    Deterministic for a fixed seed regardless of `workers`: rotors are
    processed in fixed 64-rotor blocks whose arithmetic does not depend on
    thread scheduling, recoil draws are keyed by (seed, kick, rotor), and
    histograms are reduced in fixed rotor order.

    Returned final-state amplitudes are defined up to a rotor-global phase
    (unobservable; rotors do not interfere).
    """
    if kicks < 0:
        raise ValueError("kicks must be >= 0")
    if stride < 1:
        raise ValueError("stride must be >= 1")
    if not states:
        raise ValueError("need at least one rotor")
    j0 = states[0].kick_index
    if any(s.kick_index != j0 for s in states):
        raise ValueError("all rotors must share the same kick index")
    for s in states:
        if s.amplitudes.shape[0] != q.basis_size:
            raise ValueError("state amplitudes do not match the basis")

    se = se or SEModel()
    se_p = se.probability(q.k)
    n_rotors = len(states)
    init_lo, init_hi = _initial_support(states, q)
    schedule = _WindowSchedule(q, init_lo, init_hi)
    samples = _sample_kicks(j0, kicks, stride)

    win0 = schedule.window(j0, None)
    lo_n = max(q.n_min, win0.lo)
    hi_n = min(q.n_max, win0.hi)
    src = slice(lo_n - q.n_min, hi_n - q.n_min + 1)
    dst = slice(lo_n - win0.lo, lo_n - win0.lo + (hi_n - lo_n + 1))
    blocks: list[_Block] = []
    for start in range(0, n_rotors, _BLOCK):
        rows = states[start:start + _BLOCK]
        amps = np.zeros((len(rows), win0.size), dtype=np.complex128)
        for i, s in enumerate(rows):
            outside = max(
                np.abs(s.amplitudes[:src.start]).max(initial=0.0),
                np.abs(s.amplitudes[src.stop:]).max(initial=0.0),
            )
            _check_spill(outside, "initial window", rotor=start + i, kick=j0)
            amps[i, dst] = s.amplitudes[src]
        betas = np.array([s.beta for s in rows])
        blocks.append(_Block(q, betas, amps, win0, j0, row_offset=start))

    # recoil draws for kick j, all rotors: shape (2, n_rotors); blocks slice
    # their own columns so scheduling cannot change the mapping
    def se_block(j: int) -> np.ndarray | None:
        if se_p <= 0.0:
            return None
        gen = _rng(seed, _STREAM_SE, j)
        u = gen.random(n_rotors)
        d = gen.uniform(-1.0, 1.0, n_rotors)
        return np.stack([u, d])

    sample_set = set(samples)
    partials: dict[int, list[np.ndarray | None]] = {
        t: [None] * len(blocks) for t in samples
    }
    windows: dict[int, _Window] = {}

    def run_block(idx: int):
        blk = blocks[idx]
        start = idx * _BLOCK
        if blk.j in sample_set:
            partials[blk.j][idx] = blk.prob_sum()
        for j in range(j0, j0 + kicks):
            win = schedule.window(j + 1, blk.win)
            if win is not blk.win:
                blk.grow(win)
            draws = se_block(j)
            if draws is not None:
                draws = draws[:, start:start + blk.amps.shape[0]]
            blk.step(se_p, draws)
            if blk.j in sample_set:
                partials[blk.j][idx] = blk.prob_sum()

    if workers <= 1 or len(blocks) == 1:
        for i in range(len(blocks)):
            run_block(i)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(run_block, i) for i in range(len(blocks))]
            for f in futures:
                f.result()  # re-raise BasisOverflow from workers

    # replay the schedule once to know the window active at each sample
    win = win0
    for j in range(j0, j0 + kicks + 1):
        if j > j0:
            win = schedule.window(j, win)
        if j in sample_set:
            windows[j] = win

    histograms = []
    for t in samples:
        win = windows[t]
        total = None
        for part in partials[t]:
            if part.shape[0] != win.size:
                raise AssertionError("block window diverged from schedule")
            total = part if total is None else total + part
        histograms.append(
            MomentumHistogram(
                kick_index=t,
                n=np.arange(win.lo, win.hi + 1, dtype=np.int64),
                p=total / n_rotors,
            )
        )

    final_states = []
    for idx, blk in enumerate(blocks):
        off = blk.win.lo - q.n_min
        for i in range(blk.amps.shape[0]):
            full = np.zeros(q.basis_size, dtype=np.complex128)
            full[off:off + blk.win.size] = blk.amps[i]
            final_states.append(
                RotorState(
                    beta=float(blk.beta[i]),
                    amplitudes=full,
                    kick_index=blk.j,
                )
            )
    return EvolveResult(histograms=histograms, final_states=final_states)
