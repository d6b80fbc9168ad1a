"""Smoke and negative tests on hand-built golden bundles.

The fixtures below mirror the writer's file layout and schema exactly
(versioned header line, column-name line, manifest keys) with tiny grids,
so the rendering contract is exercised without running any simulation.
"""

import json
import math

import numpy as np
import pytest

from squeeze_plots import (
    FigureRecipe,
    MissingColumn,
    SchemaMismatch,
    read_manifest,
    read_table,
    render,
)

SCHEMA = "# squeeze-sim schema v1"

TRAJECTORY_COLUMNS = (
    "t", "var_XL", "var_PL", "var_XM", "var_PM", "var_YM", "theta",
    "cov_XMPM", "det_mech", "cross_norm",
    "mean_XL", "mean_PL", "mean_XM", "mean_PM",
)


def write_csv(path, columns, rows):
    header = SCHEMA + "\n" + ",".join(columns)
    np.savetxt(path, np.asarray(rows, dtype=float), delimiter=",",
               header=header, comments="", fmt="%.9g")


def write_manifest(outdir, figure, derived, files):
    manifest = {
        "schema": "squeeze-sim schema v1",
        "figure": figure,
        "params": [],
        "derived": derived,
        "files": sorted(files),
    }
    (outdir / "manifest.json").write_text(json.dumps(manifest, indent=2))
    return outdir / "manifest.json"


def write_trajectory(path, t_end=2.0, n=40):
    t = np.linspace(0.0, t_end, n)
    var_ym = 1.0 - 0.8 * np.sin(math.pi * t / t_end / 2.0) ** 2
    rows = np.zeros((n, len(TRAJECTORY_COLUMNS)))
    rows[:, 0] = t
    rows[:, 1] = rows[:, 2] = 1.0
    rows[:, 3] = var_ym
    rows[:, 4] = 1.0 / var_ym
    rows[:, 5] = var_ym
    rows[:, 8] = 1.0
    write_csv(path, TRAJECTORY_COLUMNS, rows)


def write_wigner(outdir, stem, nx=7, ny=6):
    x = np.linspace(-3.0, 3.0, nx)
    y = np.linspace(-3.0, 3.0, ny)
    X, Y = np.meshgrid(x, y)
    values = np.exp(-0.5 * (X**2 + Y**2)) / (2.0 * np.pi)
    write_csv(outdir / f"{stem}.csv",
              ("x", "y", "value"),
              np.column_stack([X.ravel(), Y.ravel(), values.ravel()]))
    meta = {
        "schema": "squeeze-sim schema v1",
        "subsystem": "mechanical",
        "x": {"min": float(x[0]), "max": float(x[-1]), "n": nx},
        "y": {"min": float(y[0]), "max": float(y[-1]), "n": ny},
    }
    (outdir / f"{stem}.json").write_text(json.dumps(meta))
    return [f"{stem}.csv", f"{stem}.json"]


@pytest.fixture
def fig2_bundle(tmp_path):
    write_trajectory(tmp_path / "trajectory.csv")
    files = ["trajectory.csv"]
    for stem in ("wigner_optical_t0", "wigner_mech_t0",
                 "wigner_optical_tmin", "wigner_mech_tmin"):
        files += write_wigner(tmp_path, stem)
    return write_manifest(tmp_path, "fig2",
                          {"min_var_YM": 0.2, "t_min": 1.5}, files)


@pytest.fixture
def fig3_bundle(tmp_path):
    derived = {}
    files = []
    for tag in ("neg", "pos"):
        write_trajectory(tmp_path / f"trajectory_{tag}.csv", t_end=40.0, n=200)
        files.append(f"trajectory_{tag}.csv")
        derived[tag] = {"switch_time": 1.3, "post_switch_drift": 0.005}
    return write_manifest(tmp_path, "fig3", derived, files)


@pytest.fixture
def fig4ab_bundle(tmp_path):
    G = np.linspace(5.0, 30.0, 4)
    t0 = np.geomspace(0.002, 0.05, 3)
    files = []
    for tag, sign in (("a", 1.0), ("b", -1.0)):
        rows = []
        for g in G:
            for tt in t0:
                sigma = sign * 0.5 * g**2 * tt
                stable = sigma > -0.25
                analytic = 1.0 / (1.0 + 4.0 * sigma) if stable else np.nan
                num = analytic * 1.05 if stable else np.nan
                rows.append((g, tt, sigma, 0.0 if stable else 2.0,
                             num, 1.0, analytic, 1.0))
        write_csv(tmp_path / f"sweep_{tag}.csv",
                  ("G", "t0", "sigma", "regime", "min_var_num", "t_min",
                   "min_var_analytic", "gt0_valid"), rows)
        files.append(f"sweep_{tag}.csv")
    return write_manifest(tmp_path, "fig4ab", {"a": {}, "b": {}}, files)


@pytest.fixture
def fig4cd_bundle(tmp_path):
    rng = np.random.default_rng(0)
    files = []
    derived = {}
    for tag in ("c", "d"):
        minima = 0.074 + 0.003 * rng.standard_normal(50)
        counts, edges = np.histogram(minima, bins=8)
        write_csv(tmp_path / f"montecarlo_{tag}.csv",
                  ("event", "seed", "min_var_YM", "t_min"),
                  np.column_stack([np.arange(50.0), np.arange(50.0),
                                   minima, np.full(50, 1.0)]))
        write_csv(tmp_path / f"montecarlo_{tag}_hist.csv",
                  ("bin_left", "bin_right", "count"),
                  np.column_stack([edges[:-1], edges[1:], counts.astype(float)]))
        files += [f"montecarlo_{tag}.csv", f"montecarlo_{tag}_hist.csv"]
        derived[tag] = {"mean_min_var_YM": float(minima.mean())}
    return write_manifest(tmp_path, "fig4cd", derived, files)


@pytest.fixture
def fig5_bundle(tmp_path):
    t = np.linspace(0.0, 60.0, 400)
    files = []
    derived = {}
    for tag, v0 in (("nm0", 1.0), ("nm50", 101.0)):
        var = 0.6 + (v0 - 0.6) * np.exp(-0.05 * t) * (1.0 + 0.05 * np.sin(8.0 * t))
        rows = np.zeros((len(t), 7))
        rows[:, 0] = t
        rows[:, 5] = 1.0
        rows[:, 6] = var
        write_csv(tmp_path / f"meanfield_{tag}.csv",
                  ("t", "re_alpha", "im_alpha", "re_beta", "im_beta",
                   "n_photon", "var_YM"), rows)
        write_csv(tmp_path / f"meanfield_{tag}_envelope.csv",
                  ("t", "var_YM_smoothed"),
                  np.column_stack([t, 0.6 + (v0 - 0.6) * np.exp(-0.05 * t)]))
        files += [f"meanfield_{tag}.csv", f"meanfield_{tag}_envelope.csv"]
        derived[tag] = {"G_fit": 2.8, "omega_s_fit": 1.04, "fit_constant": 0.44}
    return write_manifest(tmp_path, "fig5", derived, files)


@pytest.mark.parametrize("bundle", ["fig2_bundle", "fig3_bundle", "fig4ab_bundle",
                                    "fig4cd_bundle", "fig5_bundle"])
def test_render_smoke(bundle, tmp_path, request):
    manifest = request.getfixturevalue(bundle)
    out = tmp_path / "out" / f"{bundle}.png"
    result = render(FigureRecipe(manifest, out))
    assert result == out
    assert out.stat().st_size > 0


def test_render_deterministic(fig3_bundle, tmp_path):
    a = render(FigureRecipe(fig3_bundle, tmp_path / "a.png"))
    b = render(FigureRecipe(fig3_bundle, tmp_path / "b.png"))
    assert a.read_bytes() == b.read_bytes()


def test_corrupted_header_rejected(fig3_bundle):
    path = fig3_bundle.parent / "trajectory_neg.csv"
    lines = path.read_text().splitlines()
    lines[0] = "# some other schema"
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises(SchemaMismatch):
        render(FigureRecipe(fig3_bundle, fig3_bundle.parent / "out.png"))


def test_missing_column_rejected(fig3_bundle):
    path = fig3_bundle.parent / "trajectory_pos.csv"
    table = read_table(path)
    kept = [c for c in TRAJECTORY_COLUMNS if c != "var_YM"]
    write_csv(path, kept, np.column_stack([table[c] for c in kept]))
    with pytest.raises(MissingColumn):
        render(FigureRecipe(fig3_bundle, fig3_bundle.parent / "out.png"))


def test_missing_referenced_file_rejected(fig4cd_bundle):
    (fig4cd_bundle.parent / "montecarlo_c_hist.csv").unlink()
    with pytest.raises(SchemaMismatch):
        read_manifest(fig4cd_bundle)


def test_bad_manifest_schema_rejected(tmp_path):
    path = tmp_path / "manifest.json"
    path.write_text(json.dumps({"schema": "v0", "figure": "fig3",
                                "files": [], "derived": {}}))
    with pytest.raises(SchemaMismatch):
        read_manifest(path)


def test_unknown_figure_rejected(tmp_path):
    manifest = write_manifest(tmp_path, "fig9", {}, [])
    with pytest.raises(ValueError):
        render(FigureRecipe(manifest, tmp_path / "out.png"))


def test_ragged_csv_rejected(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text(SCHEMA + "\nt,var_YM\n0.0,1.0,2.0\n0.1,0.9,1.8\n")
    with pytest.raises(SchemaMismatch):
        read_table(path, required=("t", "var_YM"))


def test_cli_exit_codes(fig3_bundle, tmp_path, capsys):
    from squeeze_plots.render import main

    out = tmp_path / "cli.png"
    assert main([str(fig3_bundle), "--out", str(out)]) == 0
    assert out.exists()
    assert main([str(tmp_path / "nope.json"), "--out", str(out)]) == 1
    err = capsys.readouterr().err.strip().splitlines()[-1]
    assert json.loads(err)["error"] in ("SchemaMismatch", "OSError", "FileNotFoundError")
