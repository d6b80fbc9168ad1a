"""Figure renderers for squeeze-sim output bundles.

One renderer per bundle kind (fig2/fig3/fig4ab/fig4cd/fig5), dispatched on
the manifest's "figure" field.  Renderers only restyle numbers already in
the CSV/JSON inputs -- no physics is recomputed here.  Time axes are in
units of the mechanical period (omega_m t); quadratures use the vacuum
variance = 1 convention, so the 3 dB level sits at variance 0.5.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .io import MissingColumn, SchemaMismatch, read_manifest, read_table, read_wigner

DPI = 150
THREE_DB = 0.5  # squeezed variance at the 3 dB limit (vacuum variance 1)


@dataclass(frozen=True)
class FigureRecipe:
    """What to render: an input manifest and an output image path."""

    manifest_path: Path
    out_path: Path
    dpi: int = DPI

    def __post_init__(self):
        object.__setattr__(self, "manifest_path", Path(self.manifest_path))
        object.__setattr__(self, "out_path", Path(self.out_path))


def _heatmap(ax, csv_path, title):
    x, y, values = read_wigner(csv_path)
    im = ax.pcolormesh(x, y, values, shading="auto", cmap="magma", rasterized=True)
    ax.set_title(title, fontsize=9)
    ax.set_xlabel("X")
    ax.set_ylabel("P")
    ax.set_aspect("equal")
    return im


def _render_fig2(indir: Path, manifest: dict, fig):
    traj = read_table(indir / "trajectory.csv",
                      required=("t", "var_XM", "var_PM", "var_YM"))
    gs = fig.add_gridspec(2, 4, height_ratios=(1.2, 1.0))
    ax = fig.add_subplot(gs[0, :])
    ax.semilogy(traj["t"], traj["var_XM"], label=r"$\delta X_M^2$", lw=0.8)
    ax.semilogy(traj["t"], traj["var_PM"], label=r"$\delta P_M^2$", lw=0.8)
    ax.semilogy(traj["t"], traj["var_YM"], label=r"$\delta Y_M^2$", lw=1.2, color="k")
    t_min = manifest["derived"].get("t_min")
    if t_min is not None:
        ax.axvline(t_min, color="gray", ls="--", lw=0.8)
    ax.set_xlabel(r"$\omega_m t$")
    ax.set_ylabel("quadrature variance")
    ax.legend(loc="upper left", fontsize=8)
    panels = (("wigner_optical_t0.csv", "optical, t = 0"),
              ("wigner_mech_t0.csv", "mechanical, t = 0"),
              ("wigner_optical_tmin.csv", "optical, t = t_min"),
              ("wigner_mech_tmin.csv", "mechanical, t = t_min"))
    for i, (name, title) in enumerate(panels):
        _heatmap(fig.add_subplot(gs[1, i]), indir / name, title)


def _render_fig3(indir: Path, manifest: dict, fig):
    axes = fig.subplots(2, 1, sharex=False)
    for ax, tag, label in zip(axes, ("neg", "pos"),
                              (r"$\varphi = -\pi/2$", r"$\varphi = +\pi/2$")):
        traj = read_table(indir / f"trajectory_{tag}.csv", required=("t", "var_YM"))
        ax.plot(traj["t"], traj["var_YM"], lw=0.9, color="k")
        switch = manifest["derived"][tag]["switch_time"]
        ax.axvline(switch, color="C3", ls="--", lw=0.9, label="switch")
        ax.axhline(THREE_DB, color="gray", ls=":", lw=0.8, label="3 dB")
        ax.set_ylabel(r"$\delta Y_M^2$")
        ax.set_title(label, fontsize=9)
        ax.legend(loc="upper right", fontsize=8)
    axes[-1].set_xlabel(r"$\omega_m t$")


def _sweep_grid(table):
    G = np.unique(table["G"])
    t0 = np.unique(table["t0"])
    shape = (len(G), len(t0))
    num = table["min_var_num"].reshape(shape)
    analytic = table["min_var_analytic"].reshape(shape)
    return G, t0, num, analytic


def _render_fig4ab(indir: Path, manifest: dict, fig):
    axes = fig.subplots(1, 2)
    for ax, tag in zip(axes, ("a", "b")):
        table = read_table(indir / f"sweep_{tag}.csv",
                           required=("G", "t0", "min_var_num", "min_var_analytic"))
        G, t0, num, analytic = _sweep_grid(table)
        im = ax.pcolormesh(t0, G, num, shading="auto", cmap="viridis")
        fig.colorbar(im, ax=ax, label=r"min $\delta Y_M^2$")
        finite = np.isfinite(analytic)
        if finite.any() and analytic[finite].min() < THREE_DB < analytic[finite].max():
            ax.contour(t0, G, analytic, levels=[THREE_DB], colors="w", linewidths=1.2)
        ax.set_xscale("log")
        ax.set_xlabel(r"$\omega_m t_0$")
        ax.set_ylabel(r"$G / \omega_m$")
        ax.set_title(f"panel {tag}", fontsize=9)


def _render_fig4cd(indir: Path, manifest: dict, fig):
    axes = fig.subplots(1, 2, sharey=True)
    for ax, tag, label in zip(axes, ("c", "d"), ("angle errors", "interval errors")):
        hist = read_table(indir / f"montecarlo_{tag}_hist.csv",
                          required=("bin_left", "bin_right", "count"))
        widths = hist["bin_right"] - hist["bin_left"]
        ax.bar(hist["bin_left"], hist["count"], width=widths, align="edge",
               color="C0", edgecolor="none")
        mean = manifest["derived"][tag]["mean_min_var_YM"]
        ax.axvline(mean, color="C3", lw=1.2, label=f"mean = {mean:.4f}")
        ax.set_xlabel(r"min $\delta Y_M^2$")
        ax.set_title(label, fontsize=9)
        ax.legend(fontsize=8)
    axes[0].set_ylabel("events")


def _render_fig5(indir: Path, manifest: dict, fig):
    tags = sorted(k for k in manifest["derived"] if k.startswith("nm"))
    axes = fig.subplots(len(tags), 1, sharex=True, squeeze=False)[:, 0]
    for ax, tag in zip(axes, tags):
        raw = read_table(indir / f"meanfield_{tag}.csv", required=("t", "var_YM"))
        env = read_table(indir / f"meanfield_{tag}_envelope.csv",
                         required=("t", "var_YM_smoothed"))
        ax.semilogy(raw["t"], raw["var_YM"], lw=0.5, alpha=0.5, label="simulated")
        ax.semilogy(env["t"], env["var_YM_smoothed"], lw=1.2, color="C3",
                    label="smoothed envelope")
        fit = manifest["derived"][tag]["fit_constant"]
        ax.set_ylabel(r"$\delta Y_M^2$")
        ax.set_title(f"n_m = {tag[2:]}, fit constant = {fit:.3f}", fontsize=9)
        ax.legend(fontsize=8)
    axes[-1].set_xlabel(r"$\omega_m t$")


_RENDERERS = {
    "fig2": (_render_fig2, (9.0, 6.5)),
    "fig3": (_render_fig3, (7.0, 5.0)),
    "fig4ab": (_render_fig4ab, (9.0, 4.0)),
    "fig4cd": (_render_fig4cd, (8.0, 3.5)),
    "fig5": (_render_fig5, (7.0, 5.5)),
}


def render(recipe: FigureRecipe) -> Path:
    """Render one manifest bundle to an image file; returns the output path."""
    manifest = read_manifest(recipe.manifest_path)
    name = manifest["figure"]
    if name not in _RENDERERS:
        raise ValueError(
            f"no renderer for figure {name!r}; available: {', '.join(sorted(_RENDERERS))}")
    renderer, size = _RENDERERS[name]
    fig = plt.figure(figsize=size)
    try:
        renderer(recipe.manifest_path.parent, manifest, fig)
        fig.tight_layout()
        recipe.out_path.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(recipe.out_path, dpi=recipe.dpi,
                    metadata={"Software": "squeeze-plots"})
    finally:
        plt.close(fig)
    return recipe.out_path


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="squeeze-plots",
                                 description="render a squeeze-sim output bundle")
    ap.add_argument("manifest", help="path to manifest.json")
    ap.add_argument("--out", required=True, help="output image path (.png/.svg)")
    ap.add_argument("--dpi", type=int, default=DPI)
    args = ap.parse_args(argv)
    try:
        out = render(FigureRecipe(args.manifest, args.out, dpi=args.dpi))
    except (SchemaMismatch, MissingColumn, ValueError, OSError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}),
              file=sys.stderr)
        return 1
    print(json.dumps({"out": str(out)}))
    return 0


if __name__ == "__main__":
    sys.exit(main())
