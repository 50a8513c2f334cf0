"""Pseudo-classical map of the gravity-kicked rotor near a quantum resonance.

For kick periods tau close to 2*pi the quantum dynamics reduces to an
area-preserving map on the cylinder (theta, J), with eps = tau - 2*pi playing
the role of an effective Planck constant.  One step of the map is

    theta' = theta + sgn(eps) * J        (mod 2*pi)
    J'     = J + k_tilde * sin(theta') + sgn(eps) * tau * eta

i.e. a free rotation by the current momentum followed by a kick evaluated at
the post-rotation angle plus a constant gravity drift.  This ordering is the
one under which the period-1 fixed point satisfies

    sin(theta*) = -sgn(eps) * tau_eta / k_tilde,   J* = 0  (mod 2*pi)

and the Jacobian determinant is exactly 1.  Other sample instants within the
period relabel the section but leave island areas and stability unchanged.

J is stored unreduced: accelerator-mode transport lives in the unbounded
momentum, and reduction mod 2*pi happens only when building portraits or
occupancy grids.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import MapRegularError

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class MapParams:
    """Parameters of the pseudo-classical map.

    k_tilde   dimensionless kick strength, k * |eps| when derived from the
              quantum parameters
    eps_sign  sign of eps = tau - 2*pi, +1 or -1
    tau_eta   gravity drift per kick (tau * eta)
    tau       kick period in radians, kept for bookkeeping and unit bridges
    eta       dimensionless gravity
    """

    k_tilde: float
    eps_sign: int
    tau_eta: float
    tau: float = TWO_PI
    eta: float = 0.0

    def __post_init__(self):
        if not self.k_tilde >= 0.0:
            raise ValueError(f"k_tilde must be >= 0, got {self.k_tilde}")
        if self.eps_sign not in (-1, 1):
            raise ValueError(f"eps_sign must be +1 or -1, got {self.eps_sign}")
        if not self.tau > 0.0:
            raise ValueError(f"tau must be > 0, got {self.tau}")

    @property
    def eps_abs(self) -> float:
        """|eps| implied by the stored kick period."""
        return abs(self.tau - TWO_PI)

    @classmethod
    def from_quantum(cls, k: float, tau: float, eta: float) -> "MapParams":
        """Build map parameters from quantum (k, tau, eta).

        Requires tau != 2*pi; exactly at the resonance the map limit does
        not exist.
        """
        eps = tau - TWO_PI
        if eps == 0.0:
            raise ValueError("tau = 2*pi: no pseudo-classical limit (eps = 0)")
        return cls(
            k_tilde=k * abs(eps),
            eps_sign=1 if eps > 0 else -1,
            tau_eta=tau * eta,
            tau=tau,
            eta=eta,
        )


@dataclass(frozen=True)
class PhasePoint:
    """A point (theta, J) of the map; theta normalized to [0, 2*pi)."""

    theta: float
    momentum_j: float


@dataclass(frozen=True)
class FixedPointResult:
    exists: bool
    point: PhasePoint | None = None
    trace: float | None = None
    stable: bool = False


@dataclass(frozen=True)
class AreaEstimate:
    """Area of the main stable island, from chaotic-sea occupancy grids."""

    area: float
    grid_resolution: int
    kicks_used: int
    converged: bool
    area_over_hbar: float


@dataclass(frozen=True)
class Portrait:
    """Point cloud (seed_id, theta, J mod 2*pi) for phase-space rendering."""

    seed_id: np.ndarray
    theta: np.ndarray
    momentum_j: np.ndarray


def map_step(p: PhasePoint, m: MapParams) -> PhasePoint:
    """Advance one kick period; total function, J left unreduced."""
    s = float(m.eps_sign)
    theta = (p.theta + s * p.momentum_j) % TWO_PI
    j_new = p.momentum_j + m.k_tilde * math.sin(theta) + s * m.tau_eta
    return PhasePoint(theta=theta, momentum_j=j_new)


def map_step_inverse(p: PhasePoint, m: MapParams) -> PhasePoint:
    """Algebraic inverse of :func:`map_step`."""
    s = float(m.eps_sign)
    j_old = p.momentum_j - m.k_tilde * math.sin(p.theta) - s * m.tau_eta
    theta = (p.theta - s * j_old) % TWO_PI
    return PhasePoint(theta=theta, momentum_j=j_old)


def find_period1_fixed_point(m: MapParams) -> FixedPointResult:
    """Locate the period-1 fixed point at J = 0 (mod 2*pi).

    Both roots of sin(theta*) = -sgn(eps)*tau_eta/k_tilde are evaluated and
    the elliptic one (|trace| < 2, trace = 2 + sgn(eps)*k_tilde*cos(theta*))
    is returned; ties prefer the smaller theta for determinism.  When
    |tau_eta| > k_tilde gravity overwhelms the kick and no period-1 mode
    exists.
    """
    if m.k_tilde == 0.0:
        # sin(theta*) would need tau_eta == 0 and any theta is then neutral.
        return FixedPointResult(exists=False)
    sin_value = -m.eps_sign * m.tau_eta / m.k_tilde
    if abs(sin_value) > 1.0:
        return FixedPointResult(exists=False)
    roots = [math.asin(sin_value) % TWO_PI, (math.pi - math.asin(sin_value)) % TWO_PI]
    roots.sort()
    best = None
    for theta in roots:
        trace = 2.0 + m.eps_sign * m.k_tilde * math.cos(theta)
        if best is None or abs(trace) < abs(best[1]) - 1e-15:
            best = (theta, trace)
    theta, trace = best
    return FixedPointResult(
        exists=True,
        point=PhasePoint(theta=theta, momentum_j=0.0),
        trace=trace,
        stable=abs(trace) < 2.0,
    )


def momentum_to_map_coordinate(n: int, beta: float, j: int, m: MapParams) -> float:
    """Map momentum J of the quantum state (n, beta) at kick j.

        J = n*|eps| + sgn(eps) * [pi + tau*(beta + j*eta + eta/2)]

    Gravity drifts quasimomentum by eta per kick, hence the j*eta term; the
    eta/2 is the mid-period average of the drift.  Used to place initial
    quantum states on the map section and to predict mode-window centers.
    """
    if not 0.0 <= beta < 1.0:
        raise ValueError(f"beta must be in [0, 1), got {beta}")
    return n * m.eps_abs + m.eps_sign * (
        math.pi + m.tau * (beta + j * m.eta + 0.5 * m.eta)
    )


@njit(cache=True)
def _iterate(theta, j, sgn, k_tilde, tau_eta, nkicks, out_theta, out_j):
    for i in range(nkicks):
        theta = (theta + sgn * j) % TWO_PI
        j = j + k_tilde * math.sin(theta) + sgn * tau_eta
        out_theta[i] = theta
        out_j[i] = j
    return theta, j


def iterate_map(p: PhasePoint, m: MapParams, kicks: int) -> tuple[np.ndarray, np.ndarray]:
    """Iterate the map, returning the post-step (theta, J) samples."""
    out_theta = np.empty(kicks)
    out_j = np.empty(kicks)
    _iterate(
        p.theta, p.momentum_j, float(m.eps_sign), m.k_tilde, m.tau_eta,
        kicks, out_theta, out_j,
    )
    return out_theta, out_j


def phase_portrait(m: MapParams, seeds: list[PhasePoint], kicks: int) -> Portrait:
    """Iterate every seed and collect (seed_id, theta, J mod 2*pi) samples."""
    if kicks < 1:
        raise ValueError("kicks must be >= 1")
    ids = []
    thetas = []
    moms = []
    for i, seed in enumerate(seeds):
        th, jj = iterate_map(seed, m, kicks)
        ids.append(np.full(kicks, i, dtype=np.int64))
        thetas.append(th)
        moms.append(jj % TWO_PI)
    return Portrait(
        seed_id=np.concatenate(ids),
        theta=np.concatenate(thetas),
        momentum_j=np.concatenate(moms),
    )


@njit(cache=True)
def _fill_occupancy(theta0, j0, sgn, k_tilde, tau_eta, nkicks, grid, n_cells):
    """Iterate one trajectory, marking visited torus cells on `grid`."""
    theta, j = theta0, j0
    for _ in range(nkicks):
        theta = (theta + sgn * j) % TWO_PI
        j = j + k_tilde * math.sin(theta) + sgn * tau_eta
        jm = j % TWO_PI
        ci = int(theta * n_cells / TWO_PI)
        cj = int(jm * n_cells / TWO_PI)
        if ci >= n_cells:
            ci = n_cells - 1
        if cj >= n_cells:
            cj = n_cells - 1
        grid[ci, cj] = True


@njit(cache=True)
def _island_component_size(visited, start_i, start_j):
    """Count the 4-connected unvisited component containing (start_i, start_j).

    Both axes wrap (torus geometry).  Returns 0 when the start cell itself
    was visited by a chaotic trajectory.
    """
    n = visited.shape[0]
    if visited[start_i, start_j]:
        return 0
    seen = np.zeros_like(visited)
    stack = np.empty((n * n, 2), dtype=np.int64)
    stack[0, 0] = start_i
    stack[0, 1] = start_j
    seen[start_i, start_j] = True
    top = 1
    count = 0
    while top > 0:
        top -= 1
        ci = stack[top, 0]
        cj = stack[top, 1]
        count += 1
        for k in range(4):
            if k == 0:
                ni, nj = (ci + 1) % n, cj
            elif k == 1:
                ni, nj = (ci - 1) % n, cj
            elif k == 2:
                ni, nj = ci, (cj + 1) % n
            else:
                ni, nj = ci, (cj - 1) % n
            if not visited[ni, nj] and not seen[ni, nj]:
                seen[ni, nj] = True
                stack[top, 0] = ni
                stack[top, 1] = nj
                top += 1
    return count


# Each cell of the finer comparison grid should be hit ~this many times by a
# trajectory covering the sea uniformly, otherwise statistical holes connect
# to the island and inflate it.
_COVERAGE_PER_CELL = 20

# Occupied fraction below which the seeds are assumed to be stuck on 1D
# invariant curves rather than exploring a 2D chaotic region.
_REGULAR_FRACTION = 0.05


def _cell_of(theta: float, j_mod: float, n_cells: int) -> tuple[int, int]:
    ci = min(int(theta * n_cells / TWO_PI), n_cells - 1)
    cj = min(int(j_mod * n_cells / TWO_PI), n_cells - 1)
    return ci, cj


def _island_area_from_grid(visited: np.ndarray, fp_theta: float, fp_j: float) -> float:
    n = visited.shape[0]
    ci, cj = _cell_of(fp_theta, fp_j % TWO_PI, n)
    count = _island_component_size(visited, ci, cj)
    return TWO_PI * TWO_PI * count / (n * n)


def estimate_island_area(
    m: MapParams,
    grid_resolution: int = 512,
    kicks: int = 1_000_000,
    seeds: int = 8,
) -> AreaEstimate:
    """Estimate the area of the main stable island by chaotic-sea coverage.

    Chaotic trajectories started opposite the island fill an occupancy grid
    over the torus [0, 2*pi) x [0, 2*pi) (J reduced mod 2*pi).  The island
    area is the cell area times the size of the connected unvisited
    component containing the stable fixed point, flood-filled with
    4-neighbor wrap-around connectivity.  The same trajectories are binned
    at resolutions N and 2N; `converged` requires the two areas to agree
    within 2%.

    The kick budget is raised, if necessary, so that the finer grid's sea
    cells are each visited ~20 times on average; `kicks_used` reports the
    actual number.  Without this, sampling holes in the sea connect to the
    island and bias the estimate upward at high resolution.

    Returns area 0 (converged) when no stable period-1 fixed point exists.

    Raises MapRegularError when the seeds fail to explore a 2D region,
    which would leave the island area undefined.
    """
    if grid_resolution < 64:
        raise ValueError("grid_resolution must be >= 64")
    if seeds < 1:
        raise ValueError("seeds must be >= 1")
    fp = find_period1_fixed_point(m)
    if not fp.exists or not fp.stable:
        return AreaEstimate(
            area=0.0,
            grid_resolution=grid_resolution,
            kicks_used=0,
            converged=True,
            area_over_hbar=0.0,
        )

    n = grid_resolution
    n_fine = 2 * n
    total_kicks = max(int(kicks), _COVERAGE_PER_CELL * n_fine * n_fine)
    per_seed = -(-total_kicks // seeds)  # ceil division
    coarse = np.zeros((n, n), dtype=np.bool_)
    fine = np.zeros((n_fine, n_fine), dtype=np.bool_)

    # Deterministic seed fan: opposite side of the island in theta, half a
    # torus away in J, with small fixed offsets against sticking.
    theta_star = fp.point.theta
    for i in range(seeds):
        theta0 = (theta_star + math.pi + 0.01 * i) % TWO_PI
        j0 = math.pi
        _fill_occupancy(
            theta0, j0, float(m.eps_sign), m.k_tilde, m.tau_eta,
            per_seed, fine, n_fine,
        )
    # Coarse grid by OR-reduction of 2x2 blocks of the fine grid: a coarse
    # cell is visited iff any of its children was.
    coarse = fine.reshape(n, 2, n, 2).any(axis=(1, 3))

    if fine.mean() < _REGULAR_FRACTION:
        raise MapRegularError(
            "chaotic seeds covered {:.2%} of the torus; map looks regular".format(
                fine.mean()
            )
        )

    area_coarse = _island_area_from_grid(coarse, theta_star, fp.point.momentum_j)
    area_fine = _island_area_from_grid(fine, theta_star, fp.point.momentum_j)
    if area_fine > 0.0:
        converged = abs(area_coarse - area_fine) / area_fine < 0.02
    else:
        converged = area_coarse == 0.0

    eps_abs = m.eps_abs
    return AreaEstimate(
        area=area_coarse,
        grid_resolution=n,
        kicks_used=seeds * per_seed,
        converged=converged,
        area_over_hbar=area_coarse / eps_abs if eps_abs > 0 else math.inf,
    )


def occupancy_grid(
    m: MapParams,
    grid_resolution: int,
    kicks: int,
    seeds: int = 8,
) -> np.ndarray:
    """Visited-cell grid used by the area estimator, for export/diagnostics."""
    fp = find_period1_fixed_point(m)
    theta_ref = fp.point.theta if fp.exists else 0.0
    grid = np.zeros((grid_resolution, grid_resolution), dtype=np.bool_)
    per_seed = -(-kicks // seeds)
    for i in range(seeds):
        theta0 = (theta_ref + math.pi + 0.01 * i) % TWO_PI
        _fill_occupancy(
            theta0, math.pi, float(m.eps_sign), m.k_tilde, m.tau_eta,
            per_seed, grid, grid_resolution,
        )
    return grid
