"""Command-line front door: figure scenarios, sweeps, Monte Carlo, analytics.

Subcommands:
  simulate    run one preset/override scenario, write trajectory CSV/JSON
  sweep       grid of (G, t0) -> minimal squeezed variance
  montecarlo  jittered-schedule error statistics
  wigner      marginal Wigner field of a simulated state
  analytic    closed-form quantities as JSON
  figure      named end-to-end scenario bundles (fig2/fig3/fig4ab/fig4cd/fig5)

All outputs are CSV (schema-versioned header) or JSON.  Identical invocations
with identical seeds produce byte-identical files.  On failure a
machine-readable error JSON goes to stdout and the exit code is nonzero.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from pathlib import Path

import numpy as np

from .analytics import (
    classify_regime,
    effective_model,
    effective_sigma,
    intracavity_photons,
    squeezing_limit,
    steady_state_variances,
)
from .dynamics import run_schedule, squeezing_report
from .errors import SqueezeSimError, UnstableRegime
from .meanfield import ParametricSpec, parametric_simulation, smoothed_envelope
from .moments import MomentVector, integrate_moments, moments_to_cov
from .params import (
    GaussianState,
    PRESET_NAMES,
    SystemParams,
    load_preset,
    params_to_dict,
    thermal_initial_state,
    validate_params,
)
from .schedule import four_pulse_schedule, freeze_schedule, perturb_schedule, schedule_to_text

GT0_VALIDITY = 0.3

SWEEP_COLUMNS = ("G", "t0", "sigma", "regime", "min_var_num", "t_min",
                 "min_var_analytic", "gt0_valid")
MC_EVENT_COLUMNS = ("event", "seed", "min_var_YM", "t_min")
HIST_COLUMNS = ("bin_left", "bin_right", "count")


@dataclasses.dataclass(frozen=True)
class SweepResult:
    """Grid of minimal squeezed variances over (G, t0) at fixed phi."""

    phi: float
    G_values: np.ndarray
    t0_values: np.ndarray
    rows: np.ndarray  # one row per cell, SWEEP_COLUMNS order (regime coded)

    def to_csv(self, path) -> None:
        header = "# squeeze-sim schema v1\n" + ",".join(SWEEP_COLUMNS)
        np.savetxt(path, self.rows, delimiter=",", header=header, comments="",
                   fmt="%.9g")


@dataclasses.dataclass(frozen=True)
class MonteCarloResult:
    """Per-event minima of one jittered-schedule study."""

    kind: str
    sigma_frac: float
    seed: int
    event_minima: np.ndarray
    event_seeds: np.ndarray
    event_times: np.ndarray

    @property
    def mean(self) -> float:
        return float(self.event_minima.mean())

    @property
    def std(self) -> float:
        return float(self.event_minima.std())

    @property
    def n_events(self) -> int:
        return len(self.event_minima)

    def events_csv(self, path) -> None:
        rows = np.column_stack([
            np.arange(self.n_events, dtype=float), self.event_seeds.astype(float),
            self.event_minima, self.event_times,
        ])
        header = "# squeeze-sim schema v1\n" + ",".join(MC_EVENT_COLUMNS)
        np.savetxt(path, rows, delimiter=",", header=header, comments="", fmt="%.12g")

    def histogram_csv(self, path, bins: int = 30) -> None:
        counts, edges = np.histogram(self.event_minima, bins=bins)
        rows = np.column_stack([edges[:-1], edges[1:], counts.astype(float)])
        header = "# squeeze-sim schema v1\n" + ",".join(HIST_COLUMNS)
        np.savetxt(path, rows, delimiter=",", header=header, comments="", fmt="%.9g")

    def summary(self) -> dict:
        return {
            "kind": self.kind,
            "sigma_frac": self.sigma_frac,
            "seed": self.seed,
            "n_events": self.n_events,
            "mean_min_var_YM": self.mean,
            "std_min_var_YM": self.std,
        }


_REGIME_CODE = {"Stable": 0.0, "Threshold": 1.0, "Unstable": 2.0}


def _search_schedule(params: SystemParams):
    """Four-pulse schedule reaching 1.5*t_s (first minimum plus margin)."""
    model = effective_model(params)
    n_periods = max(1, math.ceil(1.5 * model.t_s / (4.0 * params.t0)))
    return four_pulse_schedule(params.phi, params.t0, n_periods)


def simulate_minimum(params: SystemParams) -> tuple[float, float]:
    """(min var_YM, argmin time) of the pulsed run over [0, 1.5 t_s]."""
    schedule = _search_schedule(params)
    traj = run_schedule(thermal_initial_state(0.0, params.n_th), params, schedule)
    return traj.min_var_YM()


def sweep_min_variance(
    G_values,
    t0_values,
    phi: float,
    base_params: SystemParams,
) -> SweepResult:
    G_values = np.asarray(G_values, dtype=float)
    t0_values = np.asarray(t0_values, dtype=float)
    if len(G_values) == 0 or len(t0_values) == 0:
        raise ValueError("sweep ranges must be non-empty")
    rows = np.empty((len(G_values) * len(t0_values), len(SWEEP_COLUMNS)))
    i = 0
    for G in G_values:
        for t0 in t0_values:
            p = base_params.with_overrides(G=float(G), t0=float(t0), phi=phi)
            sigma = effective_sigma(p.G, p.t0, p.phi)
            regime = classify_regime(sigma, p.omega_m)
            valid = 1.0 if abs(G * t0) < GT0_VALIDITY else 0.0
            if regime == "Stable":
                vmin, tmin = simulate_minimum(p)
                analytic = squeezing_limit(sigma, p.omega_m, p.n_th)
            else:
                vmin, tmin, analytic = math.nan, math.nan, math.nan
            rows[i] = (G, t0, sigma, _REGIME_CODE[regime], vmin, tmin, analytic, valid)
            i += 1
    return SweepResult(phi=phi, G_values=G_values, t0_values=t0_values, rows=rows)


def montecarlo_errors(
    kind: str,
    sigma_frac: float,
    n_events: int,
    seed: int,
    base_params: SystemParams,
) -> MonteCarloResult:
    if kind not in ("angles", "intervals"):
        raise ValueError(f"kind must be 'angles' or 'intervals', got {kind!r}")
    if n_events < 1:
        raise ValueError(f"n_events must be >= 1, got {n_events}")
    base = _search_schedule(base_params)
    init = thermal_initial_state(0.0, base_params.n_th)
    angle_frac = sigma_frac if kind == "angles" else 0.0
    interval_frac = sigma_frac if kind == "intervals" else 0.0
    minima = np.empty(n_events)
    times = np.empty(n_events)
    seeds = np.empty(n_events, dtype=np.uint64)
    for i in range(n_events):
        ev_seed = int(np.random.SeedSequence([seed, i]).generate_state(1)[0])
        seeds[i] = ev_seed
        sch = perturb_schedule(base, angle_frac, interval_frac, ev_seed)
        traj = run_schedule(init, base_params, sch)
        minima[i], times[i] = traj.min_var_YM()
    return MonteCarloResult(kind=kind, sigma_frac=sigma_frac, seed=seed,
                            event_minima=minima, event_seeds=seeds,
                            event_times=times)


# ---------------------------------------------------------------------------
# figure bundles


def _write_manifest(outdir: Path, name: str, params_list, derived: dict,
                    files: list[str]) -> Path:
    manifest = {
        "schema": "squeeze-sim schema v1",
        "figure": name,
        "params": [params_to_dict(p) for p in params_list],
        "derived": derived,
        "files": sorted(files),
    }
    path = outdir / "manifest.json"
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
    return path


def _model_dict(params: SystemParams) -> dict:
    m = effective_model(params)
    return {
        "sigma": m.sigma,
        "regime": m.regime,
        "omega_s": m.omega_s,
        "epsilon": m.epsilon,
        "omega_s_prime": m.omega_s_prime,
        "t_s": m.t_s,
        "t_prime": m.t_prime,
        "mu": [m.mu.real, m.mu.imag],
    }


def _wigner_files(state: GaussianState, tag: str, outdir: Path) -> list[str]:
    from .wigner import wigner_marginal

    files = []
    for sub, stem in (("optical", f"wigner_optical_{tag}"), ("mechanical", f"wigner_mech_{tag}")):
        field = wigner_marginal(state, sub)
        field.to_csv(outdir / f"{stem}.csv")
        field.to_json(outdir / f"{stem}.json")
        files += [f"{stem}.csv", f"{stem}.json"]
    return files


def _figure_fig2(outdir: Path) -> list[str]:
    p = load_preset("fig2")
    schedule = _search_schedule(p)
    init = thermal_initial_state(0.0, p.n_th)
    traj = run_schedule(init, p, schedule)
    traj.to_csv(outdir / "trajectory.csv")
    traj.to_json(outdir / "trajectory.json")
    files = ["trajectory.csv", "trajectory.json"]
    files += _wigner_files(init, "t0", outdir)
    vmin, tmin = traj.min_var_YM()
    # replay to the argmin so the exported state is exactly the sampled one
    n_int = max(1, int(round(tmin / p.t0)))
    state_min = _state_at_index(init, p, schedule, n_int)
    files += _wigner_files(state_min, "tmin", outdir)
    derived = {"model": _model_dict(p), "min_var_YM": vmin, "t_min": tmin}
    _write_manifest(outdir, "fig2", [p], derived, files)
    return files + ["manifest.json"]


def _state_at_index(init, params, schedule, sample_index):
    """State after the sample_index-th free interval of a schedule."""
    from .schedule import PulseSchedule

    count = 0
    events = []
    for ev in schedule.events:
        events.append(ev)
        if ev.kind == "free":
            count += 1
            if count == sample_index:
                break
    sub = PulseSchedule(tuple(events), total_time=events[-1].start_time + events[-1].duration)
    return run_schedule(init, params, sub).final_state


def _figure_fig3(outdir: Path) -> list[str]:
    files = []
    derived = {}
    params_list = []
    for tag, preset in (("neg", "fig3_neg"), ("pos", "fig3_pos")):
        p = load_preset(preset)
        params_list.append(p)
        sch = freeze_schedule(p)
        traj = run_schedule(thermal_initial_state(0.0, p.n_th), p, sch)
        traj.to_csv(outdir / f"trajectory_{tag}.csv")
        traj.to_json(outdir / f"trajectory_{tag}.json")
        files += [f"trajectory_{tag}.csv", f"trajectory_{tag}.json"]
        post = traj.var_YM[traj.t >= sch.switch_time - 1e-12]
        derived[tag] = {
            "model": _model_dict(p),
            "switch_time": sch.switch_time,
            "post_switch_mean_var_YM": float(post.mean()),
            "post_switch_drift": float(np.ptp(post) / post.mean()),
        }
    _write_manifest(outdir, "fig3", params_list, derived, files)
    return files + ["manifest.json"]


def _figure_fig4ab(outdir: Path, n_grid: int = 21) -> list[str]:
    base = load_preset("fig4")
    G_vals = np.linspace(1.0, 60.0, n_grid)
    t0_vals = np.geomspace(0.001, 0.1, n_grid)
    files = []
    derived = {}
    for tag, phi in (("a", math.pi / 2), ("b", -math.pi / 2)):
        res = sweep_min_variance(G_vals, t0_vals, phi, base)
        res.to_csv(outdir / f"sweep_{tag}.csv")
        files.append(f"sweep_{tag}.csv")
        derived[tag] = {"phi": phi, "n_cells": int(len(res.rows))}
    _write_manifest(outdir, "fig4ab", [base], derived, files)
    return files + ["manifest.json"]


def _figure_fig4cd(outdir: Path, n_events: int = 400, seed: int = 12345) -> list[str]:
    base = load_preset("fig4")
    files = []
    derived = {}
    for tag, kind in (("c", "angles"), ("d", "intervals")):
        res = montecarlo_errors(kind, 0.1, n_events, seed, base)
        res.events_csv(outdir / f"montecarlo_{tag}.csv")
        res.histogram_csv(outdir / f"montecarlo_{tag}_hist.csv")
        files += [f"montecarlo_{tag}.csv", f"montecarlo_{tag}_hist.csv"]
        derived[tag] = res.summary()
    _write_manifest(outdir, "fig4cd", [base], derived, files)
    return files + ["manifest.json"]


def _figure_fig5(outdir: Path, t_end: float = 120.0) -> list[str]:
    t0, g, gamma = 0.005, 1.0, 0.004
    G_target = math.sqrt(8.0)
    Omega0 = G_target / (0.45 * g * t0)
    omega_s = math.sqrt(1.0 + 2.0 * G_target**2 * t0)
    spec = ParametricSpec(Omega0=Omega0, omega_s_target=omega_s)
    files = []
    derived = {"Omega0": Omega0, "omega_s_target": omega_s, "G_target": G_target}
    params_list = []
    for nm in (0.0, 50.0):
        p = SystemParams(G=0.0, g=g, t0=t0, phi=math.pi / 2, gamma=gamma, n_m=nm)
        params_list.append(p)
        res = parametric_simulation(p, spec, t_end=t_end)
        stem = f"meanfield_nm{int(nm)}"
        res.to_csv(outdir / f"{stem}.csv")
        files.append(f"{stem}.csv")
        ts, vs = smoothed_envelope(res, math.pi / omega_s)
        np.savetxt(outdir / f"{stem}_envelope.csv",
                   np.column_stack([ts, vs]), delimiter=",",
                   header="# squeeze-sim schema v1\nt,var_YM_smoothed",
                   comments="", fmt="%.9g")
        files.append(f"{stem}_envelope.csv")
        derived[f"nm{int(nm)}"] = {
            "G_fit": res.G_fit,
            "omega_s_fit": res.omega_s_fit,
            "fit_constant": res.fit_constant,
        }
    _write_manifest(outdir, "fig5", params_list, derived, files)
    return files + ["manifest.json"]


_FIGURES = {
    "fig2": _figure_fig2,
    "fig3": _figure_fig3,
    "fig4ab": _figure_fig4ab,
    "fig4cd": _figure_fig4cd,
    "fig5": _figure_fig5,
}


def run_figure(name: str, outdir) -> list[str]:
    """Execute a named scenario bundle; returns the list of files written."""
    if name not in _FIGURES:
        raise ValueError(f"unknown figure {name!r}; available: {', '.join(sorted(_FIGURES))}")
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    return _FIGURES[name](outdir)


# ---------------------------------------------------------------------------
# argument plumbing


def _parse_overrides(pairs) -> dict:
    out = {}
    for pair in pairs or []:
        if "=" not in pair:
            raise ValueError(f"override must be key=value, got {pair!r}")
        k, v = pair.split("=", 1)
        out[k] = float(v)
    return out


def _resolve_params(args) -> SystemParams:
    p = load_preset(args.preset) if args.preset else SystemParams()
    overrides = _parse_overrides(getattr(args, "override", None))
    if overrides:
        p = p.with_overrides(**overrides)
    p, warnings = validate_params(p)
    for w in warnings:
        print(f"warning: {w}", file=sys.stderr)
    return p


def _parse_range(text: str) -> np.ndarray:
    """lo:hi:n inclusive linear range."""
    lo, hi, n = text.split(":")
    return np.linspace(float(lo), float(hi), int(n))


def _cmd_simulate(args) -> int:
    p = _resolve_params(args)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    if args.freeze:
        schedule = freeze_schedule(p)
    elif args.periods is not None:
        schedule = four_pulse_schedule(p.phi, p.t0, args.periods)
    else:
        schedule = _search_schedule(p)
    init = thermal_initial_state(0.0, p.n_th)
    traj = run_schedule(init, p, schedule)
    traj.to_csv(outdir / "trajectory.csv")
    traj.to_json(outdir / "trajectory.json")
    files = ["trajectory.csv", "trajectory.json"]
    derived = {"model": _model_dict(p)}
    vmin, tmin = traj.min_var_YM()
    derived["min_var_YM"] = vmin
    derived["t_min"] = tmin
    if schedule.switch_time is not None:
        derived["switch_time"] = schedule.switch_time
    if args.dump_schedule:
        (outdir / "schedule.txt").write_text(schedule_to_text(schedule))
        files.append("schedule.txt")
    if args.oracle_check:
        times, samples = integrate_moments(
            MomentVector.thermal(0.0, p.n_th), p, schedule)
        dev = 0.0
        for t, mom in zip(times, samples):
            i = int(np.argmin(np.abs(traj.t - t)))
            V = moments_to_cov(mom)
            for a, b in ((traj.var_XM[i], V[2, 2]), (traj.var_PM[i], V[3, 3])):
                dev = max(dev, abs(a - b) / max(abs(b), 1.0))
        derived["oracle_max_rel_dev"] = dev
    _write_manifest(outdir, "simulate", [p], derived, files)
    print(json.dumps({"out": str(outdir), "files": sorted(files + ["manifest.json"]),
                      "min_var_YM": vmin, "t_min": tmin}))
    return 0


def _cmd_sweep(args) -> int:
    base = load_preset(args.preset) if args.preset else SystemParams()
    res = sweep_min_variance(_parse_range(args.G), _parse_range(args.t0),
                             args.phi, base)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    res.to_csv(outdir / "sweep.csv")
    print(json.dumps({"out": str(outdir), "files": ["sweep.csv"],
                      "n_cells": int(len(res.rows))}))
    return 0


def _cmd_montecarlo(args) -> int:
    base = load_preset(args.preset) if args.preset else load_preset("fig4")
    res = montecarlo_errors(args.kind, args.sigma_frac, args.events, args.seed, base)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    res.events_csv(outdir / "montecarlo.csv")
    res.histogram_csv(outdir / "montecarlo_hist.csv")
    with open(outdir / "montecarlo_summary.json", "w") as fh:
        json.dump(res.summary(), fh, indent=2, sort_keys=True)
    print(json.dumps(res.summary()))
    return 0


def _cmd_wigner(args) -> int:
    from .wigner import wigner_marginal

    p = _resolve_params(args)
    n_int = max(1, int(round(args.at / p.t0)))
    n_periods = max(1, math.ceil(n_int / 4.0))
    schedule = four_pulse_schedule(p.phi, p.t0, n_periods)
    init = thermal_initial_state(0.0, p.n_th)
    state = _state_at_index(init, p, schedule, n_int)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    files = []
    subsystems = ["optical", "mechanical"] if args.subsystem == "both" else [args.subsystem]
    for sub in subsystems:
        field = wigner_marginal(state, sub)
        stem = f"wigner_{sub}"
        field.to_csv(outdir / f"{stem}.csv")
        field.to_json(outdir / f"{stem}.json")
        files += [f"{stem}.csv", f"{stem}.json"]
    print(json.dumps({"out": str(outdir), "files": sorted(files),
                      "t": n_int * p.t0}))
    return 0


def _cmd_analytic(args) -> int:
    p = _resolve_params(args)
    sigma = effective_sigma(p.G, p.t0, p.phi)
    quantity = args.quantity
    if quantity == "effective_model":
        out = _model_dict(p)
    elif quantity == "sigma":
        out = {"sigma": sigma}
    elif quantity == "squeezing_limit":
        out = {"squeezing_limit": squeezing_limit(sigma, p.omega_m, p.n_th)}
    elif quantity == "steady_state":
        vx, vp = steady_state_variances(sigma, p.omega_m, p.gamma, p.n_m)
        out = {"var_XM": vx, "var_PM": vp}
    elif quantity == "intracavity_photons":
        out = {
            "photons": intracavity_photons(
                args.power_W, args.freq_Hz, args.kappa_Hz, args.delta_Hz,
                convention=args.convention)
        }
    else:
        raise ValueError(f"unknown quantity {quantity!r}")
    print(json.dumps(out))
    return 0


def _cmd_figure(args) -> int:
    files = run_figure(args.name, args.out)
    print(json.dumps({"figure": args.name, "out": str(args.out),
                      "files": sorted(files)}))
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="squeeze-sim",
                                 description="pulsed optomechanical squeezing toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    def add_params_args(sp):
        sp.add_argument("--preset", choices=PRESET_NAMES, default=None)
        sp.add_argument("--override", action="append", metavar="KEY=VALUE")

    sp = sub.add_parser("simulate", help="run one scenario")
    add_params_args(sp)
    sp.add_argument("--out", required=True)
    sp.add_argument("--periods", type=int, default=None,
                    help="number of four-pulse periods (default: reach 1.5 t_s)")
    sp.add_argument("--freeze", action="store_true",
                    help="use the squeeze-then-freeze schedule")
    sp.add_argument("--oracle-check", action="store_true")
    sp.add_argument("--dump-schedule", action="store_true")
    sp.set_defaults(func=_cmd_simulate)

    sp = sub.add_parser("sweep", help="(G, t0) minimal-variance grid")
    sp.add_argument("--preset", choices=PRESET_NAMES, default=None)
    sp.add_argument("--phi", type=float, required=True)
    sp.add_argument("--G", required=True, metavar="LO:HI:N")
    sp.add_argument("--t0", required=True, metavar="LO:HI:N")
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=_cmd_sweep)

    sp = sub.add_parser("montecarlo", help="jittered-schedule statistics")
    sp.add_argument("--preset", choices=PRESET_NAMES, default=None)
    sp.add_argument("--kind", choices=("angles", "intervals"), required=True)
    sp.add_argument("--sigma-frac", type=float, default=0.1)
    sp.add_argument("--events", type=int, default=400)
    sp.add_argument("--seed", type=int, default=12345)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=_cmd_montecarlo)

    sp = sub.add_parser("wigner", help="marginal Wigner field at a given time")
    add_params_args(sp)
    sp.add_argument("--at", type=float, required=True, metavar="TIME")
    sp.add_argument("--subsystem", choices=("optical", "mechanical", "both"),
                    default="both")
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=_cmd_wigner)

    sp = sub.add_parser("analytic", help="closed-form quantities as JSON")
    add_params_args(sp)
    sp.add_argument("--quantity", required=True,
                    choices=("effective_model", "sigma", "squeezing_limit",
                             "steady_state", "intracavity_photons"))
    sp.add_argument("--power-W", type=float, default=None)
    sp.add_argument("--freq-Hz", type=float, default=None)
    sp.add_argument("--kappa-Hz", type=float, default=None)
    sp.add_argument("--delta-Hz", type=float, default=None)
    sp.add_argument("--convention", choices=("cyclic", "angular"), default="cyclic")
    sp.set_defaults(func=_cmd_analytic)

    sp = sub.add_parser("figure", help="named scenario bundle")
    sp.add_argument("name", choices=sorted(_FIGURES))
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=_cmd_figure)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (SqueezeSimError, ValueError, OSError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}))
        return 1


if __name__ == "__main__":
    sys.exit(main())
