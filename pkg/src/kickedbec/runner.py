"""Turns run configurations into CSV/JSON artifacts on disk.

Every run directory gets a manifest (config echo, seed, version, artifact
list, completion flag).  Wall-clock timings go to a separate timings.json
so that all data artifacts are byte-identical for identical (config, seed),
which is the reproducibility contract tests rely on.

Sweeps execute one sub-run per parameter point, each in its own
subdirectory; completed points are recognized by their manifest and
skipped on rerun, and the rates table is assembled by a single writer
after all points have finished.
"""

from __future__ import annotations

import json
import math
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (
    DEFAULT_WINDOW_WIDTH,
    SurvivalSeries,
    fit_decay_rate,
    fit_scaling,
    mode_window,
    select_t0,
    survival_probability,
)
from .config import RunConfig
from .engine import (
    EnsembleSpec,
    MomentumHistogram,
    QuantumParams,
    SEModel,
    evolve_ensemble,
    sample_beta_ensemble,
    suggest_basis,
)
from .errors import ConfigError, FitError, InsufficientDataError
from .maps import (
    TWO_PI,
    MapParams,
    PhasePoint,
    estimate_island_area,
    find_period1_fixed_point,
    momentum_to_map_coordinate,
    occupancy_grid,
    phase_portrait,
)
from .units import UnitContext, convert_units

HISTOGRAM_PROB_FLOOR = 1e-15  # bins below this are omitted from CSV

_STREAM_POINT = 7  # seed-derivation stream for sweep points


@dataclass(frozen=True)
class RunArtifacts:
    out_dir: Path
    files: list[str]
    summary: dict


# ---------------------------------------------------------------------------
# deterministic writers


def _fmt(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="\n", encoding="utf-8") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _json_safe(obj):
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, np.ndarray):
        return [_json_safe(v) for v in obj]
    return obj


def write_json(path: Path, doc: dict) -> None:
    with open(path, "w", newline="\n", encoding="utf-8") as fh:
        json.dump(_json_safe(doc), fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_json(path: Path) -> dict:
    return json.loads(Path(path).read_text())


class Manifest:
    """Run manifest: written incomplete up front, completed at the end."""

    def __init__(self, out_dir: Path, config: dict, seed: int):
        self.path = out_dir / "manifest.json"
        self.doc = {
            "config": config,
            "seed": seed,
            "version": __version__,
            "artifacts": [],
            "complete": False,
        }
        write_json(self.path, self.doc)

    def add(self, *names: str):
        self.doc["artifacts"].extend(names)

    def finish(self, **extra):
        self.doc.update(extra)
        self.doc["complete"] = True
        write_json(self.path, self.doc)

    def fail(self, error: str):
        self.doc["error"] = error
        self.doc["complete"] = False
        write_json(self.path, self.doc)


def _write_timings(out_dir: Path, seconds: float):
    # deliberately outside the manifest: timings differ run to run
    write_json(out_dir / "timings.json", {"wall_time_s": seconds})


# ---------------------------------------------------------------------------
# mode implementations


def _quantum_params(cfg: RunConfig, kicks: int | None = None) -> QuantumParams:
    qc = dict(cfg.section("quantum"))
    if "n_min" not in qc or "n_max" not in qc:
        if kicks is None:
            raise ConfigError("quantum.n_min/n_max required when no kick count "
                              "is available for automatic sizing")
        initial_n = cfg.section("ensemble").get("initial_n", 0)
        lo, hi = suggest_basis(k=qc["k"], tau=qc["tau"], eta=qc["eta"],
                               kicks=kicks, initial_n=initial_n)
        qc.setdefault("n_min", lo)
        qc.setdefault("n_max", hi)
    return QuantumParams(**qc)


def _se_model(cfg_se: dict) -> SEModel:
    return SEModel(**cfg_se) if cfg_se else SEModel()


def _map_params(cfg: RunConfig) -> MapParams:
    qc = cfg.section("quantum")
    return MapParams.from_quantum(k=qc["k"], tau=qc["tau"], eta=qc["eta"])


def run_portrait(cfg: RunConfig, out: Path, seed: int, manifest: Manifest) -> dict:
    m = _map_params(cfg)
    mp = cfg.section("map")
    kicks = mp.get("portrait_kicks", 400)
    n_seeds = mp.get("portrait_seeds", 24)
    fp = find_period1_fixed_point(m)
    # seeds spread across the section: a momentum column through the island
    # plus a short angular fan around it
    seeds = [PhasePoint(theta=(fp.point.theta if fp.exists else 0.0),
                        momentum_j=(-math.pi + TWO_PI * i / n_seeds))
             for i in range(n_seeds)]
    cloud = phase_portrait(m, seeds, kicks)
    write_csv(out / "portrait.csv", ["theta", "J", "seed_id"],
              zip(cloud.theta, cloud.momentum_j, cloud.seed_id))

    ens = cfg.section("ensemble")
    beta_center = ens.get("beta_center", 0.5)
    beta_fwhm = ens.get("beta_fwhm", 0.06)
    initial_n = ens.get("initial_n", 0)
    j0 = momentum_to_map_coordinate(initial_n, beta_center, 0, m) % TWO_PI
    meta = {
        "eps_abs": m.eps_abs,
        "eps_sign": m.eps_sign,
        "k_tilde": m.k_tilde,
        "tau_eta": m.tau_eta,
        "fixed_point": _fp_doc(fp),
        "initial_state": {
            "beta_center": beta_center,
            "beta_fwhm": beta_fwhm,
            "initial_n": initial_n,
            "J_center": j0,
            "J_halfwidth": m.tau * beta_fwhm / 2.0,
        },
        "planck_cell_area": m.eps_abs,
    }
    write_json(out / "portrait_meta.json", meta)
    manifest.add("portrait.csv", "portrait_meta.json")
    return {"points": int(cloud.theta.size), "fixed_point_exists": fp.exists}


def _fp_doc(fp) -> dict:
    if not fp.exists:
        return {"exists": False}
    return {
        "exists": True,
        "theta": fp.point.theta,
        "J": fp.point.momentum_j,
        "trace": fp.trace,
        "stable": fp.stable,
    }


def run_area(cfg: RunConfig, out: Path, seed: int, manifest: Manifest) -> dict:
    m = _map_params(cfg)
    mp = cfg.section("map")
    n = mp.get("grid_resolution", 512)
    kicks = mp.get("area_kicks", 10**6)
    n_seeds = mp.get("seeds", 8)
    est = estimate_island_area(m, grid_resolution=n, kicks=kicks, seeds=n_seeds)
    entry = {
        "area": est.area,
        "grid_resolution": est.grid_resolution,
        "kicks_used": est.kicks_used,
        "converged": est.converged,
        "area_over_hbar": est.area_over_hbar,
        "eps_abs": m.eps_abs,
        "k_tilde": m.k_tilde,
        "eps_sign": m.eps_sign,
        "tau_eta": m.tau_eta,
        "fixed_point": _fp_doc(find_period1_fixed_point(m)),
    }
    append_area_entry(out / "area.json", entry)
    manifest.add("area.json")
    if mp.get("write_occupancy", True):
        grid = occupancy_grid(m, grid_resolution=min(n, 256), kicks=kicks,
                              seeds=n_seeds)
        rows = (
            (i, j, int(grid[i, j]))
            for i in range(grid.shape[0])
            for j in range(grid.shape[1])
        )
        write_csv(out / "occupancy.csv", ["cell_i", "cell_j", "visited"], rows)
        manifest.add("occupancy.csv")
    return entry


def append_area_entry(path: Path, entry: dict) -> None:
    doc = {"areas": []}
    if path.exists():
        doc = read_json(path)
    doc["areas"].append(_json_safe(entry))
    write_json(path, doc)


def write_histograms_csv(path: Path, histograms: list[MomentumHistogram]):
    def rows():
        for h in histograms:
            for n, p in zip(h.n, h.p):
                if p >= HISTOGRAM_PROB_FLOOR:
                    yield (h.kick_index, n, p)

    write_csv(path, ["t", "n", "prob"], rows())


def run_evolve(cfg: RunConfig, out: Path, seed: int, workers: int,
               manifest: Manifest) -> dict:
    kicks = cfg.raw["kicks"]
    stride = cfg.raw.get("stride", 1)
    q = _quantum_params(cfg, kicks=kicks)
    ens_cfg = dict(cfg.section("ensemble"))
    ens_cfg.setdefault("seed", seed)
    spec = EnsembleSpec(**ens_cfg)
    se = _se_model(dict(cfg.section("se")))
    states = sample_beta_ensemble(spec, q)
    result = evolve_ensemble(states, q, kicks=kicks, se=se, seed=seed,
                             stride=stride, workers=workers)
    write_histograms_csv(out / "histograms.csv", result.histograms)
    manifest.add("histograms.csv")

    summary = {
        "kicks": kicks,
        "rotors": spec.count,
        "p_se": se.probability(q.k),
        "basis": [q.n_min, q.n_max],
    }
    win_cfg = cfg.section("window")
    try:
        series, fit = analyze_survival(result.histograms, q, win_cfg,
                                       initial_n=spec.initial_n)
    except (ValueError, InsufficientDataError) as exc:
        summary["survival"] = f"skipped: {exc}"
        return summary
    write_csv(out / "survival.csv", ["t", "p"], zip(series.t, series.p))
    manifest.add("survival.csv")
    if fit is not None:
        write_json(out / "decay.json", decay_doc(series, fit))
        manifest.add("decay.json")
        summary["gamma"] = fit.gamma
        summary["gamma_err"] = fit.gamma_err
    summary["t0"] = series.t0
    return summary


def analyze_survival(histograms, q, win_cfg, initial_n=0):
    """Window series, t0 selection and the decay fit for one run."""
    width = win_cfg.get("width", DEFAULT_WINDOW_WIDTH)
    t0_setting = win_cfg.get("t0", "auto")
    if t0_setting == "auto":
        t0 = select_t0(histograms, q, width, initial_n,
                       win_cfg.get("separation_sigmas", 3.0))
    else:
        t0 = int(t0_setting)
    windows = {
        h.kick_index: mode_window(h.kick_index, q, width, initial_n)
        for h in histograms
        if h.kick_index >= t0
    }
    series = survival_probability(histograms, windows, t0)
    t_start = win_cfg.get("fit_t_start", t0)
    t_end = win_cfg.get("fit_t_end", int(series.t[-1]))
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            fit = fit_decay_rate(series, (t_start, t_end))
    except InsufficientDataError as exc:
        raise FitError(f"decay fit failed: {exc}") from exc
    return series, fit


def decay_doc(series: SurvivalSeries, fit) -> dict:
    return {
        "gamma": fit.gamma,
        "gamma_err": fit.gamma_err,
        "fit_window": list(fit.fit_window),
        "r_squared": fit.r_squared,
        "log_intercept": fit.log_intercept,
        "t0": series.t0,
        "n_points": fit.n_points,
    }


# ---------------------------------------------------------------------------
# sweeps


@dataclass(frozen=True)
class SweepPoint:
    index: int
    k: float
    tau: float
    eta: float
    p_se: float
    map_params: MapParams
    kicks: int
    rotors: int
    stride: int

    @property
    def run_id(self) -> str:
        return f"point_{self.index:03d}"

    @property
    def eps_abs(self) -> float:
        return abs(self.tau - TWO_PI)


DESK_KICKS = 2500
DESK_ROTORS = 512
PAPER_KICKS = 50_000
PAPER_ROTORS = 10_000


def build_sweep_points(cfg: RunConfig, paper_scale: bool = False) -> list[SweepPoint]:
    sweep = cfg.section("sweep")
    kicks = sweep.get("kicks", DESK_KICKS)
    rotors = sweep.get("rotors", DESK_ROTORS)
    stride = sweep.get("stride", 5)
    if paper_scale:
        kicks, rotors = PAPER_KICKS, PAPER_ROTORS
        warnings.warn(
            "paper-scale sweep requested: this is orders of magnitude "
            "slower than the desk-scale defaults", stacklevel=2,
        )
    points = []
    if sweep["family"] == "fixed-tau":
        tau = sweep["tau"]
        for i, pt in enumerate(sweep["points"]):
            p_se = pt.get("p_se", sweep.get("p_se_per_k", 0.0) * pt["k"])
            points.append(SweepPoint(
                index=i, k=pt["k"], tau=tau, eta=pt["eta"], p_se=p_se,
                map_params=MapParams.from_quantum(pt["k"], tau, pt["eta"]),
                kicks=kicks, rotors=rotors, stride=stride,
            ))
    else:
        k_tilde = sweep["k_tilde"]
        eta = sweep["eta"]
        sign = sweep.get("eps_sign", -1)
        # one shared map for the whole family: the classical structure is
        # fixed by (k_tilde, eta); the drift per kick is 2*pi*eta to leading
        # order in eps, making the family share a single phase space
        shared = MapParams(k_tilde=k_tilde, eps_sign=sign,
                           tau_eta=TWO_PI * eta, tau=TWO_PI, eta=eta)
        for i, eps_abs in enumerate(sweep["eps_values"]):
            k = k_tilde / eps_abs
            tau = TWO_PI + sign * eps_abs
            p_se = sweep.get("p_se_per_k", 0.0) * k
            points.append(SweepPoint(
                index=i, k=k, tau=tau, eta=eta, p_se=p_se,
                map_params=shared, kicks=kicks, rotors=rotors, stride=stride,
            ))
        assert all(p.map_params is shared for p in points)
    return points


def _sweep_point_seed(master_seed: int, index: int) -> int:
    ss = np.random.SeedSequence(entropy=master_seed,
                                spawn_key=(_STREAM_POINT, index))
    return int(ss.generate_state(1, dtype=np.uint64)[0] % (2**63))


def run_sweep_point(point: SweepPoint, out_dir: Path, master_seed: int,
                    area: dict, win_cfg: dict, write_hists: bool) -> dict:
    """One sweep point: evolve, survival, decay fit, artifacts.

    Returns the rates-table row; the point directory gets survival.csv,
    decay.json and a manifest usable for resumption.
    """
    point_dir = out_dir / point.run_id
    manifest_path = point_dir / "manifest.json"
    if manifest_path.exists():
        doc = read_json(manifest_path)
        if doc.get("complete"):
            return doc["row"]

    point_dir.mkdir(parents=True, exist_ok=True)
    seed = _sweep_point_seed(master_seed, point.index)
    point_cfg = {
        "k": point.k, "tau": point.tau, "eta": point.eta,
        "p_se": point.p_se, "kicks": point.kicks, "rotors": point.rotors,
    }
    manifest = Manifest(point_dir, point_cfg, seed)
    t_start = time.perf_counter()
    try:
        lo, hi = suggest_basis(k=point.k, tau=point.tau, eta=point.eta,
                               kicks=point.kicks)
        q = QuantumParams(k=point.k, tau=point.tau, eta=point.eta,
                          n_min=lo, n_max=hi)
        spec = EnsembleSpec(count=point.rotors, seed=seed)
        se = SEModel(enabled=point.p_se > 0, mode="fixed",
                     p_per_kick=point.p_se)
        states = sample_beta_ensemble(spec, q)
        result = evolve_ensemble(states, q, kicks=point.kicks, se=se,
                                 seed=seed, stride=point.stride, workers=1)
        if write_hists:
            write_histograms_csv(point_dir / "histograms.csv", result.histograms)
            manifest.add("histograms.csv")
        series, fit = analyze_survival(result.histograms, q, win_cfg)
        write_csv(point_dir / "survival.csv", ["t", "p"],
                  zip(series.t, series.p))
        write_json(point_dir / "decay.json", decay_doc(series, fit))
        manifest.add("survival.csv", "decay.json")
        row = {
            "run_id": point.run_id,
            "k": point.k,
            "tau": point.tau,
            "eta": point.eta,
            "p_se": point.p_se,
            "A": area["area"],
            "eps_abs": point.eps_abs,
            "A_over_hbar": area["area"] / point.eps_abs,
            "gamma": fit.gamma,
            "gamma_err": fit.gamma_err,
        }
        manifest.finish(row=row)
        _write_timings(point_dir, time.perf_counter() - t_start)
        return row
    except Exception as exc:  # recorded, sweep continues
        manifest.fail(f"{type(exc).__name__}: {exc}")
        _write_timings(point_dir, time.perf_counter() - t_start)
        return {"run_id": point.run_id, "error": str(exc)}


def _point_task(args):
    return run_sweep_point(*args)


RATES_COLUMNS = ["run_id", "k", "tau", "eta", "p_se", "A", "eps_abs",
                 "A_over_hbar", "gamma", "gamma_err"]


def run_sweep(cfg: RunConfig, out: Path, seed: int, workers: int,
              manifest: Manifest, paper_scale: bool = False) -> dict:
    sweep = cfg.section("sweep")
    points = build_sweep_points(cfg, paper_scale)
    mp = cfg.section("map")
    grid = mp.get("grid_resolution", 512)
    area_kicks = mp.get("area_kicks", 10**6)

    # island areas: one per distinct MapParams (a fixed-classical family
    # shares a single object, hence a single area by construction)
    areas: dict[int, dict] = {}
    for p in points:
        key = id(p.map_params)
        if key not in areas:
            est = estimate_island_area(p.map_params, grid_resolution=grid,
                                       kicks=area_kicks)
            entry = {
                "area": est.area,
                "grid_resolution": est.grid_resolution,
                "kicks_used": est.kicks_used,
                "converged": est.converged,
                "k_tilde": p.map_params.k_tilde,
                "tau_eta": p.map_params.tau_eta,
                "eps_sign": p.map_params.eps_sign,
                "fixed_point": _fp_doc(find_period1_fixed_point(p.map_params)),
            }
            append_area_entry(out / "area.json", entry)
            areas[key] = entry
    manifest.add("area.json")

    win_cfg = cfg.section("window")
    write_hists = sweep.get("write_histograms", False)
    tasks = [
        (p, out, seed, areas[id(p.map_params)], win_cfg, write_hists)
        for p in points
    ]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_point_task, tasks))
    else:
        rows = [run_sweep_point(*t) for t in tasks]

    good = [r for r in rows if "error" not in r]
    failed = [r for r in rows if "error" in r]
    write_csv(out / "rates.csv", RATES_COLUMNS,
              ([r[c] for c in RATES_COLUMNS] for r in good))
    manifest.add("rates.csv")

    summary = {"points": len(points), "failed": len(failed)}
    if len(good) >= 3:
        fit = fit_scaling([(r["A_over_hbar"], r["gamma"]) for r in good])
        scaling = {
            "slope": fit.slope,
            "intercept": fit.intercept,
            "slope_err": fit.slope_err,
            "intercept_err": fit.intercept_err,
            "n_points": fit.n_points,
            "points": [
                {k: r[k] for k in
                 ("run_id", "A_over_hbar", "gamma", "gamma_err", "p_se")}
                for r in good
            ],
        }
        write_json(out / "scaling.json", scaling)
        manifest.add("scaling.json")
        summary["slope"] = fit.slope
    else:
        warnings.warn("fewer than 3 successful points: no scaling fit",
                      stacklevel=2)
    if failed:
        summary["errors"] = {r["run_id"]: r["error"] for r in failed}
    return summary


# ---------------------------------------------------------------------------
# fit / convert-units modes


def run_fit(cfg: RunConfig, out: Path, manifest: Manifest) -> dict:
    fit_cfg = cfg.section("fit")
    if "survival_csv" in fit_cfg:
        data = np.loadtxt(fit_cfg["survival_csv"], delimiter=",", skiprows=1)
        series = SurvivalSeries(t=data[:, 0].astype(np.int64), p=data[:, 1],
                                t0=int(data[0, 0]))
        window = (fit_cfg.get("t_start", int(series.t[0])),
                  fit_cfg.get("t_end", int(series.t[-1])))
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                fit = fit_decay_rate(series, window)
        except InsufficientDataError as exc:
            raise FitError(str(exc)) from exc
        write_json(out / "decay.json", decay_doc(series, fit))
        manifest.add("decay.json")
        return {"gamma": fit.gamma, "gamma_err": fit.gamma_err}
    rows = np.genfromtxt(fit_cfg["rates_csv"], delimiter=",", names=True,
                         dtype=None, encoding="utf-8")
    rows = np.atleast_1d(rows)
    try:
        fit = fit_scaling([(float(r["A_over_hbar"]), float(r["gamma"]))
                           for r in rows])
    except InsufficientDataError as exc:
        raise FitError(str(exc)) from exc
    doc = {
        "slope": fit.slope, "intercept": fit.intercept,
        "slope_err": fit.slope_err, "intercept_err": fit.intercept_err,
        "n_points": fit.n_points,
        "points": [
            {"run_id": str(r["run_id"]), "A_over_hbar": float(r["A_over_hbar"]),
             "gamma": float(r["gamma"]), "gamma_err": float(r["gamma_err"]),
             "p_se": float(r["p_se"])}
            for r in rows
        ],
    }
    write_json(out / "scaling.json", doc)
    manifest.add("scaling.json")
    return {"slope": fit.slope}


def run_convert_units(cfg: RunConfig, out: Path, manifest: Manifest) -> dict:
    u = UnitContext(**cfg.section("units"))
    res = convert_units(u)
    doc = {
        "tau": res.tau,
        "eta": res.eta,
        "half_talbot_time_s": res.half_talbot_time,
        "grating_vector_per_m": res.grating_vector,
    }
    write_json(out / "units.json", doc)
    manifest.add("units.json")
    return doc


# ---------------------------------------------------------------------------
# entry point


def run(cfg: RunConfig, out_dir: str | Path, seed: int | None = None,
        workers: int | None = None, paper_scale: bool = False) -> RunArtifacts:
    """Execute a validated config; artifacts land in out_dir.

    seed/workers arguments override the config when given.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    seed = cfg.raw.get("seed", 0) if seed is None else seed
    workers = cfg.raw.get("workers", 1) if workers is None else workers
    manifest = Manifest(out, cfg.raw, seed)
    t_start = time.perf_counter()
    try:
        if cfg.mode == "portrait":
            summary = run_portrait(cfg, out, seed, manifest)
        elif cfg.mode == "area":
            summary = run_area(cfg, out, seed, manifest)
        elif cfg.mode == "evolve":
            summary = run_evolve(cfg, out, seed, workers, manifest)
        elif cfg.mode == "sweep":
            summary = run_sweep(cfg, out, seed, workers, manifest,
                                paper_scale)
        elif cfg.mode == "fit":
            summary = run_fit(cfg, out, manifest)
        elif cfg.mode == "convert-units":
            summary = run_convert_units(cfg, out, manifest)
        else:  # unreachable: config validation guards the mode set
            raise ConfigError(f"unknown mode {cfg.mode!r}")
    except Exception as exc:
        manifest.fail(f"{type(exc).__name__}: {exc}")
        _write_timings(out, time.perf_counter() - t_start)
        raise
    manifest.finish(summary=_json_safe(summary))
    _write_timings(out, time.perf_counter() - t_start)
    return RunArtifacts(out_dir=out, files=list(manifest.doc["artifacts"]),
                        summary=summary)
