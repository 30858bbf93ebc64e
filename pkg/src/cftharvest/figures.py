"""Named figure presets: reproducible data bundles with optional rendering.

Every preset writes a data CSV, overlay-curve CSVs where the figure carries
analytic lines, and a metadata JSON describing exactly what was computed.
Rendering to PNG (Agg backend) rides alongside and can be switched off —
the CSV/JSON bundle is the authoritative output, the PNG a convenience view.

Axis ranges follow the source plots (dimension up to 4, separations and
delays up to 20 in switching-width units) and are preset metadata, not
contracts; resolutions default to desk-scale runtimes.
"""
from __future__ import annotations

import dataclasses
import json
import math
import pathlib
import time

from . import asymptotics
from .elements import ProtocolParams
from .precision import DEFAULT_PRECISION, PrecisionConfig
from .sweeps import (
    AxisSpec,
    SweepSpec,
    csv_lines,
    format_cell,
    header_for,
    run_grid,
)

_DELTA_AXIS = (0.1, 4.0)       # conformal-dimension plot range
_LBAR_AXIS = (0.3, 20.0)       # separation range, avoiding the coincidence limit
_DBAR_AXIS = (0.0, 20.0)       # delay range
_HEATMAP_STEPS = 48            # default per-axis resolution for 2-D presets
_CURVE_STEPS = 201             # default resolution for 1-D presets
_SLICE_DELTAS = AxisSpec("delta_dim", 0.5, 2.0, 4)   # cross-section dimensions
_SLICE_STEPS = 61


@dataclasses.dataclass(frozen=True)
class FigurePreset:
    """One reproducible figure: grid spec(s), overlays and render style."""

    fig_id: str
    title: str
    kind: str                      # "curve" | "heatmap" | "panels" | "slices"
    specs: tuple[SweepSpec, ...]   # one sweep per data file
    display: tuple[str, ...]       # quantity (columns) driving the render
    overlays: tuple[str, ...] = () # overlay-curve names understood by _overlay
    log_color: bool = True


def _fixed(**kw) -> ProtocolParams:
    base = {"delta_dim": 1.0, "t_omega": 10.0, "lbar": 10.0, "dbar": 0.0}
    base.update(kw)
    return ProtocolParams(**base)


def _heat(fig_id, title, quantity, vs, display=None, overlays=(), steps=None,
          log_color=True, extra=()):
    """A single-panel heatmap over (delta_dim, lbar) or (delta_dim, dbar)."""
    n = steps or _HEATMAP_STEPS
    if vs == "lbar":
        axis2 = AxisSpec("lbar", *_LBAR_AXIS, n)
        fixed = _fixed(dbar=0.0)
    else:
        axis2 = AxisSpec("dbar", *_DBAR_AXIS, n)
        fixed = _fixed(lbar=10.0)
    spec = SweepSpec(
        fixed=fixed,
        axis1=AxisSpec("delta_dim", *_DELTA_AXIS, n),
        axis2=axis2,
        quantities=(quantity, *extra),
    )
    return FigurePreset(fig_id, title, "heatmap", (spec,),
                        display or (quantity,), overlays, log_color)


def build_preset(fig_id: str, resolution: int | None = None) -> FigurePreset:
    n = resolution
    if fig_id == "fig2":
        spec = SweepSpec(
            fixed=_fixed(),
            axis1=AxisSpec("delta_dim", *_DELTA_AXIS, n or _CURVE_STEPS),
            # degenerate second axis: the quantity is gap-and-dimension only
            axis2=AxisSpec("t_omega", 10.0, 10.0 + 1e-9, 2),
            quantities=("laa", "laa_asym1"),
        )
        return FigurePreset("fig2", "Self-excitation response vs dimension",
                            "curve", (spec,), ("laa", "laa_asym1"),
                            ("laa_leading",), True)
    if fig_id == "fig3L":
        return _heat("fig3L", "|exchange element| over dimension and separation",
                     "lab", "lbar", steps=n)
    if fig_id == "fig3R":
        return _heat("fig3R", "|exchange element| over dimension and delay",
                     "lab", "dbar", steps=n)
    if fig_id == "fig4L":
        return _heat("fig4L", "|pair amplitude| over dimension and separation",
                     "m", "lbar", steps=n)
    if fig_id == "fig4R":
        return _heat("fig4R", "|pair amplitude| over dimension and delay",
                     "m", "dbar", steps=n)
    if fig_id == "fig5L":
        return _heat("fig5L", "Negativity over dimension and separation",
                     "negativity", "lbar", steps=n,
                     overlays=("neg_boundary_L", "best_dimension"))
    if fig_id == "fig5R":
        return _heat("fig5R", "Negativity over dimension and delay",
                     "negativity", "dbar", steps=n,
                     overlays=("neg_boundary_delay",))
    if fig_id == "fig6L":
        return _heat("fig6L", "Mutual information over dimension and separation",
                     "mutual_info", "lbar", steps=n)
    if fig_id == "fig6R":
        return _heat("fig6R", "Mutual information over dimension and delay",
                     "mutual_info", "dbar", steps=n)
    if fig_id in ("fig7", "fig8"):
        vs = "lbar" if fig_id == "fig7" else "dbar"
        base = _heat(fig_id, "Split amplitudes and negativities", "m_plus", vs,
                     steps=n, extra=("m_minus", "n_plus", "n_minus"))
        overlays = ("split_plus_boundary", "split_minus_boundary") if fig_id == "fig8" else ()
        return dataclasses.replace(
            base, kind="panels", title=base.title + (
                " vs separation" if vs == "lbar" else " vs delay"),
            display=("m_plus", "m_minus", "n_plus", "n_minus"), overlays=overlays)
    if fig_id == "fig9L":
        return _heat("fig9L", "Communication fraction of negativity vs separation",
                     "comm_ratio", "lbar", steps=n, log_color=False)
    if fig_id == "fig9R":
        return _heat("fig9R", "Communication fraction of negativity vs delay",
                     "comm_ratio", "dbar", steps=n, log_color=False)
    if fig_id == "appxC-crosssections":
        m = n or _SLICE_STEPS
        sep = SweepSpec(
            fixed=_fixed(dbar=0.0),
            axis1=_SLICE_DELTAS,
            axis2=AxisSpec("lbar", 0.5, 20.0, m),
            quantities=("lab", "m", "negativity", "mutual_info",
                        "m_plus", "m_minus", "n_plus", "n_minus",
                        "lab_asym1", "m_far1", "negativity_far1",
                        "negativity_far2", "mi_full", "mi_bigl",
                        "m_plus_sl", "m_minus_sl", "n_plus_sl", "n_minus_sl"),
        )
        delay = SweepSpec(
            fixed=_fixed(lbar=10.0),
            axis1=_SLICE_DELTAS,
            axis2=AxisSpec("dbar", 0.0, 20.0, m),
            quantities=("lab", "m", "negativity", "mutual_info",
                        "m_plus", "m_minus", "n_plus", "n_minus",
                        "lab_asym1", "m_far1", "m_near_lc2",
                        "negativity_far1", "negativity_far2", "negativity_near_lc",
                        "mi_full", "mi_bigl",
                        "m_plus_sl", "m_plus_tl", "m_endpoint",
                        "m_minus_sl", "m_minus_tl",
                        "n_plus_sl", "n_plus_tl", "n_minus_tl"),
        )
        return FigurePreset(
            "appxC-crosssections",
            "Numeric cross-sections against closed-form asymptotics",
            "slices", (sep, delay),
            ("lab", "m", "negativity", "mutual_info",
             "m_plus", "m_minus", "n_plus", "n_minus"),
        )
    raise KeyError(f"unknown figure preset {fig_id!r}")


PRESET_IDS = ("fig2", "fig3L", "fig3R", "fig4L", "fig4R", "fig5L", "fig5R",
              "fig6L", "fig6R", "fig7", "fig8", "fig9L", "fig9R",
              "appxC-crosssections")


# ---------------------------------------------------------------------------
# overlay curves
# ---------------------------------------------------------------------------


def _overlay(name: str, preset: FigurePreset) -> tuple[list[str], list[str]]:
    """Compute one overlay curve; returns (column names, CSV value rows)."""
    spec = preset.specs[0]
    params = spec.fixed
    deltas = [0.1 + 0.02 * i for i in range(196)]
    if name == "laa_leading":
        rows = []
        for dd in deltas:
            p = dataclasses.replace(params, delta_dim=dd)
            v, _ = asymptotics.laa_asym(p, 1)
            rows.append([dd, v.mantissa_at(-p.t_omega ** 2 / 2).real])
        return ["delta_dim", "laa_asym1"], rows
    if name == "neg_boundary_L":
        vals = asymptotics.boundary_curves("N_vs_L", params, deltas)
        return ["delta_dim", "lbar_boundary"], [[d, v] for d, v in zip(deltas, vals)]
    if name == "neg_boundary_delay":
        vals = asymptotics.boundary_curves("N_vs_delta", params, deltas)
        return ["delta_dim", "dbar_boundary"], [[d, v] for d, v in zip(deltas, vals)]
    if name == "best_dimension":
        rows = []
        w = params.t_omega
        n = 120
        for i in range(1, n):
            lb = 1.0 + (w - 1.0 - 1e-6) * i / n
            rows.append([lb, asymptotics.delta_max(lb, w)])
        return ["lbar", "delta_max"], rows
    if name == "split_plus_boundary":
        vals = asymptotics.boundary_curves("Nplus_TL", params, deltas)
        return ["delta_dim", "dbar_boundary"], [[d, v] for d, v in zip(deltas, vals)]
    if name == "split_minus_boundary":
        vals = asymptotics.boundary_curves("Nminus_TL", params, deltas)
        return ["delta_dim", "dbar_boundary"], [[d, v] for d, v in zip(deltas, vals)]
    raise KeyError(f"unknown overlay {name!r}")


# ---------------------------------------------------------------------------
# execution
# ---------------------------------------------------------------------------


def _write_csv(path: pathlib.Path, header: list[str], rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(format_cell(float(v)) for v in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="")


def _data_filename(preset: FigurePreset, idx: int) -> str:
    if len(preset.specs) == 1:
        return f"{preset.fig_id}.csv"
    tag = ("separation", "delay")[idx] if len(preset.specs) == 2 else str(idx)
    return f"{preset.fig_id}_{tag}.csv"


def run_figure(fig_id: str, out_dir, threads: int = 1,
               resolution: int | None = None, render: bool = True,
               cfg: PrecisionConfig = DEFAULT_PRECISION,
               scaling: str = "unscaled") -> dict:
    """Compute one preset's bundle into out_dir; returns the metadata dict."""
    preset = build_preset(fig_id, resolution)
    out = pathlib.Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.monotonic()

    all_warnings: list[str] = []
    grids = []
    data_files = []
    for idx, spec in enumerate(preset.specs):
        spec = dataclasses.replace(spec, scaling=scaling)
        points, rows, warnings = run_grid(spec, threads, cfg)
        all_warnings.extend(warnings)
        grids.append((spec, points, rows))
        fname = _data_filename(preset, idx)
        (out / fname).write_text(
            "\n".join(csv_lines(spec, points, rows)) + "\n",
            encoding="utf-8", newline="")
        data_files.append(fname)

    overlay_files = []
    for name in preset.overlays:
        cols, rows = _overlay(name, preset)
        fname = f"{preset.fig_id}_overlay_{name}.csv"
        _write_csv(out / fname, cols, rows)
        overlay_files.append(fname)

    png_file = None
    if render:
        png_file = f"{preset.fig_id}.png"
        _render(preset, grids, out, png_file)

    meta = {
        "preset": preset.fig_id,
        "title": preset.title,
        "kind": preset.kind,
        "scaling": scaling,
        "data_files": data_files,
        "overlay_files": overlay_files,
        "png": png_file,
        "sweeps": [json.loads(spec.to_json()) for spec, _, _ in grids],
        "notes": [
            "values are per lambda_bar^2; 'unscaled' divides out exp(-t_omega^2/2)",
            "grid points on |dbar| = lbar are shifted off the cone by half a step",
        ],
        "warnings": all_warnings,
        "runtime_s": round(time.monotonic() - t0, 2),
    }
    (out / f"{preset.fig_id}.json").write_text(
        json.dumps(meta, indent=2) + "\n", encoding="utf-8")
    return meta


# ---------------------------------------------------------------------------
# rendering
# ---------------------------------------------------------------------------


def _style():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams.update({
        "font.size": 9,
        "axes.labelsize": 9,
        "axes.titlesize": 9,
        "legend.fontsize": 7,
        "figure.dpi": 130,
    })
    return plt


_AXIS_LABELS = {"delta_dim": "dimension", "lbar": "separation / T",
                "dbar": "delay / T", "t_omega": "gap * T"}


def _columns(spec: SweepSpec) -> dict[str, int]:
    return {name: i for i, name in enumerate(header_for(spec)[2:])}


def _panel_grid(spec, points, rows, column):
    import numpy as np

    n1, n2 = spec.axis1.steps, spec.axis2.steps
    z = np.array([r[column] for r in rows], dtype=float).reshape(n1, n2)
    x = np.array(spec.axis1.values())
    y = np.array(spec.axis2.values())
    return x, y, z


def _draw_heat(plt, ax, spec, x, y, z, log_color, label):
    import numpy as np
    from matplotlib.colors import LogNorm

    zm = np.ma.masked_invalid(z.T)
    if log_color:
        zm = np.ma.masked_less_equal(zm, 0.0)
        norm = LogNorm(vmin=max(zm.min(), zm.max() * 1e-12), vmax=zm.max()) \
            if zm.count() else None
        pc = ax.pcolormesh(x, y, zm, norm=norm, shading="auto")
    else:
        pc = ax.pcolormesh(x, y, zm, vmin=0.0, vmax=1.0, shading="auto")
    plt.colorbar(pc, ax=ax, label=label)
    ax.set_xlabel(_AXIS_LABELS[spec.axis1.name])
    ax.set_ylabel(_AXIS_LABELS[spec.axis2.name])


def _overlay_rows(preset, name):
    cols, rows = _overlay(name, preset)
    return cols, rows


def _render(preset: FigurePreset, grids, out: pathlib.Path, png_file: str) -> None:
    plt = _style()
    spec, points, rows = grids[0]
    cols = _columns(spec)

    if preset.kind == "curve":
        fig, ax = plt.subplots(figsize=(4.2, 3.0))
        xs = spec.axis1.values()
        # rows iterate axis1-major with a 2-point degenerate axis2: stride 2
        ys = [rows[2 * i][cols[preset.display[0] + "_abs"]] for i in range(len(xs))]
        ov = [rows[2 * i][cols[preset.display[1]]] for i in range(len(xs))]
        ax.semilogy(xs, ys, "k-", label="closed form")
        ax.semilogy(xs, ov, "r--", label="leading order")
        ax.set_xlabel(_AXIS_LABELS[spec.axis1.name])
        ax.set_ylabel("response (suppression removed)")
        ax.legend()
    elif preset.kind in ("heatmap", "panels"):
        names = preset.display
        ncols = 2 if len(names) > 1 else 1
        nrows = -(-len(names) // ncols)
        fig, axes = plt.subplots(nrows, ncols,
                                 figsize=(4.6 * ncols, 3.4 * nrows),
                                 squeeze=False)
        for k, qname in enumerate(names):
            ax = axes[k // ncols][k % ncols]
            column = cols.get(qname + "_abs", cols.get(qname))
            x, y, z = _panel_grid(spec, points, rows, column)
            _draw_heat(plt, ax, spec, x, y, z, preset.log_color, qname)
            ax.set_title(qname)
            for oname in preset.overlays:
                # split-negativity boundaries belong on their own panel only
                if oname.startswith("split_plus") and qname != "n_plus":
                    continue
                if oname.startswith("split_minus") and qname != "n_minus":
                    continue
                ocols, orows = _overlay_rows(preset, oname)
                ox = [r[0] for r in orows]
                oy = [r[1] for r in orows]
                if ocols[0] != spec.axis1.name:
                    ox, oy = oy, ox
                ax.plot(ox, oy, lw=1.1,
                        color="w" if preset.log_color else "k",
                        ls="--" if "boundary" in oname else "-")
            ax.set_xlim(spec.axis1.lo, spec.axis1.hi)
            ax.set_ylim(spec.axis2.lo, spec.axis2.hi)
    else:  # slices
        nq = len(preset.display)
        fig, axes = plt.subplots(nq, len(grids),
                                 figsize=(4.6 * len(grids), 2.2 * nq),
                                 squeeze=False)
        for gi, (gspec, gpoints, grows) in enumerate(grids):
            gcols = _columns(gspec)
            xs = gspec.axis2.values()
            n2 = gspec.axis2.steps
            for qi, qname in enumerate(preset.display):
                ax = axes[qi][gi]
                column = gcols.get(qname + "_abs", gcols.get(qname))
                for s in range(gspec.axis1.steps):
                    ys = [grows[s * n2 + j][column] for j in range(n2)]
                    ax.semilogy(xs, [abs(v) if v == v else math.nan for v in ys],
                                lw=0.9)
                ax.set_ylabel(qname)
                if qi == nq - 1:
                    ax.set_xlabel(_AXIS_LABELS[gspec.axis2.name])
    fig.suptitle(preset.title)
    fig.tight_layout()
    fig.savefig(out / png_file)
    plt.close(fig)
