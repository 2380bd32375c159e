"""Figure construction from quapidyn CSV tables.

Everything here uses the matplotlib object API (``Figure`` without
pyplot), so rendering works on headless machines with no display and
never touches global backend state.  Output bytes are deterministic for
a given matplotlib version: file metadata that would embed timestamps is
pinned, and SVG ids are derived from a fixed hash salt.

Series from different files are drawn each on their own time samples.
Nothing is interpolated onto a common grid; a mismatch between grids is
visible in the figure rather than silently hidden.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from cycler import cycler
from matplotlib import rc_context
from matplotlib.figure import Figure

from .csvio import SchemaError, Table, read_overlay, read_table

# Bump when any style dict changes, so regenerated gallery output is
# distinguishable from output of an older tool version.
STYLE_VERSION = "1"

_METADATA = {
    "png": {"Software": f"quapiplot/{STYLE_VERSION}"},
    # Passing Date=None suppresses the <dc:date> element entirely.
    "svg": {"Date": None, "Creator": f"quapiplot/{STYLE_VERSION}"},
}

STYLES: dict[str, dict] = {
    "default": {
        "figure.dpi": 110,
        "font.size": 10.0,
        "lines.linewidth": 1.6,
        "axes.grid": True,
        "grid.alpha": 0.3,
        "legend.frameon": False,
        "svg.hashsalt": "quapiplot",
    },
    "monochrome": {
        "figure.dpi": 110,
        "font.size": 10.0,
        "lines.linewidth": 1.4,
        "axes.grid": True,
        "grid.alpha": 0.25,
        "legend.frameon": False,
        "svg.hashsalt": "quapiplot",
        "axes.prop_cycle": cycler(
            color=["0.0", "0.35", "0.55", "0.7"],
            linestyle=["-", "--", "-.", ":"],
        ),
    },
}


def _style(name: str) -> dict:
    try:
        return STYLES[name]
    except KeyError:
        known = ", ".join(sorted(STYLES))
        raise ValueError(f"unknown style '{name}'; available styles: {known}") from None


@dataclass(frozen=True)
class OverlaySpec:
    """External data points drawn on top of computed curves.

    The file must hold two columns, time and value; ``scale`` multiplies
    the values before drawing (external data usually arrives in
    arbitrary units).  Points are drawn at their own sample times.
    """

    path: Path
    scale: float = 1.0
    label: str = "experiment"

    def __post_init__(self):
        object.__setattr__(self, "path", Path(self.path))
        if not np.isfinite(self.scale) or self.scale == 0.0:
            raise ValueError("overlay scale must be finite and nonzero")


@dataclass(frozen=True)
class PlotJob:
    """One figure: a set of (file, column) series drawn on shared axes.

    The pairing rule mirrors numpy broadcasting: one input fans out
    across many columns, many inputs share one column, or both tuples
    have equal length and pair elementwise.
    """

    inputs: tuple
    columns: tuple
    output: Path
    labels: tuple = ()
    title: str = ""
    ylabel: str = ""
    overlay: OverlaySpec | None = None

    def __post_init__(self):
        object.__setattr__(self, "inputs", tuple(Path(p) for p in self.inputs))
        object.__setattr__(self, "columns", tuple(self.columns))
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "output", Path(self.output))
        if not self.inputs:
            raise ValueError("PlotJob needs at least one input file")
        if not self.columns:
            raise ValueError("PlotJob needs at least one column")
        n_in, n_col = len(self.inputs), len(self.columns)
        if n_in != n_col and 1 not in (n_in, n_col):
            raise ValueError(
                f"cannot pair {n_in} inputs with {n_col} columns; "
                "lengths must match or one side must be 1"
            )
        if self.labels and len(self.labels) != self.n_series:
            raise ValueError(
                f"got {len(self.labels)} labels for {self.n_series} series"
            )

    @property
    def n_series(self) -> int:
        return max(len(self.inputs), len(self.columns))

    def series(self) -> list[tuple[Path, str]]:
        n = self.n_series
        ins = self.inputs * n if len(self.inputs) == 1 else self.inputs
        cols = self.columns * n if len(self.columns) == 1 else self.columns
        return list(zip(ins, cols))


def _series_label(job: PlotJob, index: int, path: Path, column: str) -> str:
    if job.labels:
        return job.labels[index]
    if len(job.inputs) == 1 and len(job.columns) > 1:
        return column
    if len(job.columns) == 1 and len(job.inputs) > 1:
        return path.stem
    return f"{path.stem}: {column}"


def _draw(ax, job: PlotJob, tables: dict[Path, Table]) -> None:
    for i, (path, column) in enumerate(job.series()):
        table = tables[path]
        ax.plot(table.times, table.require(column),
                label=_series_label(job, i, path, column))
    if job.overlay is not None:
        t, v = read_overlay(job.overlay.path)
        ax.scatter(t, v * job.overlay.scale, s=14.0, zorder=3,
                   facecolors="none", edgecolors="0.2",
                   label=job.overlay.label)
    ax.set_xlabel("t (fs)")
    if job.ylabel:
        ax.set_ylabel(job.ylabel)
    if job.title:
        ax.set_title(job.title)
    if job.n_series > 1 or job.overlay is not None:
        ax.legend()


def _load_tables(job: PlotJob) -> dict[Path, Table]:
    return {path: read_table(path) for path in dict.fromkeys(job.inputs)}


def build_figure(job: PlotJob, style: str = "default") -> Figure:
    """Build the figure for one job without writing anything to disk."""
    with rc_context(_style(style)):
        fig = Figure(figsize=(6.4, 4.0), layout="constrained")
        _draw(fig.add_subplot(), job, _load_tables(job))
    return fig


def build_grid_figure(jobs: list[PlotJob], style: str = "default") -> Figure:
    """Stack several jobs as vertically aligned panels with a shared x axis."""
    if not jobs:
        raise ValueError("need at least one panel")
    tables = {}
    for job in jobs:
        tables.update(_load_tables(job))
    with rc_context(_style(style)):
        fig = Figure(figsize=(6.4, 2.8 * len(jobs)), layout="constrained")
        axes = fig.subplots(len(jobs), 1, sharex=True, squeeze=False)[:, 0]
        for ax, job in zip(axes, jobs):
            _draw(ax, job, tables)
    return fig


def _save(fig: Figure, output: Path) -> Path:
    output = Path(output)
    fmt = output.suffix.lstrip(".").lower()
    if fmt not in _METADATA:
        known = ", ".join(sorted(_METADATA))
        raise ValueError(f"unsupported output format '{fmt}'; use one of: {known}")
    output.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(output, format=fmt, metadata=_METADATA[fmt])
    return output


def render(job: PlotJob, style: str = "default") -> Path:
    """Render one job to ``job.output`` (PNG or SVG, by file suffix)."""
    return _save(build_figure(job, style), job.output)


def render_grid(jobs: list[PlotJob], output: Path, style: str = "default") -> Path:
    return _save(build_grid_figure(jobs, style), Path(output))


# --- gallery -----------------------------------------------------------

_ABS = "abs_rho_HB"
_COHERENCE_LABEL = "|rho_HB|"


def _job(out_dir: Path, name: str, fmt: str, inputs, columns,
         labels=(), title="", ylabel="", overlay=None) -> PlotJob:
    return PlotJob(inputs=tuple(inputs), columns=tuple(columns),
                   output=out_dir / f"{name}.{fmt}", labels=tuple(labels),
                   title=title, ylabel=ylabel, overlay=overlay)


def gallery(preset_dir: Path | str, out_dir: Path | str, style: str = "default",
            fmt: str = "png", overlay: OverlaySpec | None = None,
            ) -> tuple[dict[str, Path], list[str]]:
    """Render every figure the preset CSV files support.

    Returns ``(rendered, skipped)``: a mapping of figure name to written
    file, and the names of CSV files that were skipped because they do
    not carry a time axis (for example the scalar estimate table).

    Composite figures are built whenever all of their member files are
    present; on top of those, every time-series CSV also gets a plain
    single-file figure showing all of its columns.  The optional
    ``overlay`` is drawn onto the reference-coherence panel.
    """
    preset_dir = Path(preset_dir)
    out_dir = Path(out_dir)
    if not preset_dir.is_dir():
        raise FileNotFoundError(f"preset directory not found: {preset_dir}")

    csvs = sorted(preset_dir.glob("*.csv"))
    if not csvs:
        raise FileNotFoundError(f"no CSV files in {preset_dir}")

    usable: dict[str, Path] = {}
    skipped: list[str] = []
    for path in csvs:
        header = path.read_text(encoding="utf-8").splitlines()[0] if path.stat().st_size else ""
        first = header.split(",")[0].strip()
        if first == "t_fs":
            usable[path.stem] = path
        else:
            skipped.append(path.name)

    rendered: dict[str, Path] = {}

    def have(*names: str) -> bool:
        return all(n in usable for n in names)

    def paths(*names: str) -> tuple[Path, ...]:
        return tuple(usable[n] for n in names)

    if have("fig1"):
        rendered["fig1_response"] = render(_job(
            out_dir, "fig1_response", fmt, paths("fig1"),
            ("re_C_cm-2", "im_C_cm-2"),
            labels=("Re C(t)", "Im C(t)"),
            title="Bath correlation function (ohmic, 77 K)",
            ylabel="C(t) (cm^-2)"), style)

    if have("fig2a", "fig2b"):
        top = _job(out_dir, "_", fmt, paths("fig2a"), (_ABS,),
                   labels=("77 K",), title="Driven coherence decay",
                   ylabel=_COHERENCE_LABEL, overlay=overlay)
        bottom = _job(out_dir, "_", fmt, paths("fig2b"), (_ABS,),
                      labels=("180 K",), ylabel=_COHERENCE_LABEL)
        rendered["fig2_coherence"] = render_grid(
            [top, bottom], out_dir / f"fig2_coherence.{fmt}", style)

    if have("fig2a", "fig3a_subohmic", "fig3a_superohmic"):
        rendered["fig3a_spectral_families"] = render(_job(
            out_dir, "fig3a_spectral_families", fmt,
            paths("fig3a_subohmic", "fig2a", "fig3a_superohmic"),
            (_ABS,), labels=("sub-ohmic s=0.5", "ohmic s=1", "super-ohmic s=2"),
            title="Coherence decay across spectral families",
            ylabel=_COHERENCE_LABEL), style)

    if have("fig2a", "fig3b_markov"):
        rendered["fig3b_memory_contrast"] = render(_job(
            out_dir, "fig3b_memory_contrast", fmt,
            paths("fig2a", "fig3b_markov"), (_ABS,),
            labels=("full memory", "memoryless"),
            title="Memoryless baseline vs full propagation",
            ylabel=_COHERENCE_LABEL), style)

    sweeps = {
        "fig4_splitting_sweep": ("fig4_splitting", "Bare splitting sweep"),
        "fig5_coupling_sweep": ("fig5_J0", "Static coupling sweep"),
        "fig6_drive_sweep": ("fig6_kappa", "Drive amplitude sweep"),
    }
    for fig_name, (prefix, title) in sweeps.items():
        members = sorted(n for n in usable if n.startswith(prefix))
        if len(members) >= 2:
            rendered[fig_name] = render(_job(
                out_dir, fig_name, fmt, paths(*members), (_ABS,),
                title=title, ylabel=_COHERENCE_LABEL), style)

    for name, path in usable.items():
        table = read_table(path)
        fig_name = f"series_{name}"
        rendered[fig_name] = render(_job(
            out_dir, fig_name, fmt, (path,), tuple(table.columns),
            title=name), style)

    return rendered, skipped
