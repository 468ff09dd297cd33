"""Render the four figure families from spinpump CSV files.

Families:

    sweep               pumping rates vs the sweep parameter with the
                        three quantization guide lines (0 and +-q read
                        from the CSV's rate_quantum column)
    fidelity-waterfall  one fidelity trace per sweep point, offset
                        vertically for readability
    tau-lines           fidelity traces per noise correlation time
    htraj-3d            the effective-field trajectory in 3-d

Rendering is deterministic: fixed figure size, fixed dpi, Agg backend,
no timestamps in the output, so the same inputs give identical bytes
on one platform.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
import numpy as np  # noqa: E402

FAMILIES = ("sweep", "fidelity-waterfall", "tau-lines", "htraj-3d")

_FIGSIZE = (6.4, 4.4)
_DPI = 150


class SchemaError(ValueError):
    """Input file does not look like the documented CSV schema."""


@dataclass(frozen=True)
class FigureSpec:
    """What to draw: input file, family, output path and tunables."""

    family: str
    input_path: Path
    output_path: Path
    offset: float = 1.1
    xlim: Optional[tuple[float, float]] = None
    ylim: Optional[tuple[float, float]] = None

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise SchemaError(f"unknown figure family {self.family!r}")


def read_csv(path) -> tuple[list[str], np.ndarray]:
    """Parse a spinpump CSV: '#' comments, one header row, float rows."""
    names: list[str] | None = None
    rows: list[list[float]] = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if names is None:
                names = [tok.strip() for tok in line.split(",")]
                continue
            rows.append([float(tok) for tok in line.split(",")])
    if names is None or not rows:
        raise SchemaError(f"{path}: no data rows")
    data = np.asarray(rows)
    if data.shape[1] != len(names):
        raise SchemaError(f"{path}: ragged rows")
    return names, data


def _require_columns(names: list[str], needed: list[str], path) -> dict[str, int]:
    missing = [c for c in needed if c not in names]
    if missing:
        raise SchemaError(
            f"{path}: missing columns {missing}; found {names}"
        )
    return {c: names.index(c) for c in names}


def _fig_sweep(spec: FigureSpec):
    names, data = read_csv(spec.input_path)
    cols = _require_columns(
        names, ["p1", "p1_stderr", "p2", "p2_stderr", "rate_quantum"], spec.input_path
    )
    x = data[:, 0]
    q = float(data[0, cols["rate_quantum"]])
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    for guide in (-q, 0.0, q):
        ax.axhline(guide, color="0.6", linestyle="--", linewidth=0.9, zorder=1)
    ax.errorbar(
        x, data[:, cols["p1"]], yerr=data[:, cols["p1_stderr"]],
        marker="o", linestyle="-", capsize=2.5, label="tone 1", zorder=3,
    )
    ax.errorbar(
        x, data[:, cols["p2"]], yerr=data[:, cols["p2_stderr"]],
        marker="s", linestyle="-", capsize=2.5, label="tone 2", zorder=3,
    )
    ax.set_xlabel(names[0])
    ax.set_ylabel("pumping rate [rad/s$^2$]")
    ax.legend(frameon=False)
    return fig, ax


def _fidelity_columns(names, path):
    cols = [c for c in names if c.startswith("fid_")]
    if names[0] != "t_us" or not cols:
        raise SchemaError(
            f"{path}: expected t_us plus fid_* columns; found {names}"
        )
    return cols


def _fig_waterfall(spec: FigureSpec):
    names, data = read_csv(spec.input_path)
    cols = _fidelity_columns(names, spec.input_path)
    t = data[:, 0]
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    for i, name in enumerate(cols):
        shift = -spec.offset * i
        y = data[:, names.index(name)] + shift
        ax.plot(t, y, linewidth=1.0)
        ax.annotate(
            name.split("_", 2)[-1], (t[-1], y[-1]),
            textcoords="offset points", xytext=(4, 0), fontsize=8,
        )
    ax.set_xlabel("t [$\\mu$s]")
    ax.set_ylabel(f"fidelity (offset {spec.offset:g} per trace)")
    ax.set_yticks([])
    return fig, ax


def _fig_tau_lines(spec: FigureSpec):
    names, data = read_csv(spec.input_path)
    cols = _fidelity_columns(names, spec.input_path)
    t = data[:, 0]
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    for name in cols:
        label = name.split("_", 2)[-1] + " s"
        ax.plot(t, data[:, names.index(name)], linewidth=1.0, label=label)
    ax.set_xlabel("t [$\\mu$s]")
    ax.set_ylabel("fidelity")
    ax.legend(frameon=False, title="correlation time")
    return fig, ax


def _fig_htraj(spec: FigureSpec):
    names, data = read_csv(spec.input_path)
    _require_columns(names, ["t", "hx", "hy", "hz"], spec.input_path)
    fig = plt.figure(figsize=_FIGSIZE)
    ax = fig.add_subplot(projection="3d")
    ax.plot(
        data[:, names.index("hx")],
        data[:, names.index("hy")],
        data[:, names.index("hz")],
        linewidth=0.6,
    )
    ax.scatter([0.0], [0.0], [0.0], color="k", marker="o", s=18)
    ax.set_xlabel("$h_x$ [rad/s]")
    ax.set_ylabel("$h_y$ [rad/s]")
    ax.set_zlabel("$h_z$ [rad/s]")
    return fig, ax


_BUILDERS = {
    "sweep": _fig_sweep,
    "fidelity-waterfall": _fig_waterfall,
    "tau-lines": _fig_tau_lines,
    "htraj-3d": _fig_htraj,
}


def build_figure(spec: FigureSpec):
    """Build (figure, axes) for a spec without writing anything."""
    fig, ax = _BUILDERS[spec.family](spec)
    if spec.xlim is not None:
        ax.set_xlim(*spec.xlim)
    if spec.ylim is not None:
        ax.set_ylim(*spec.ylim)
    fig.tight_layout()
    return fig, ax


def render(spec: FigureSpec) -> Path:
    """Render the figure to spec.output_path; nothing is written on error."""
    fig, _ = build_figure(spec)
    out = Path(spec.output_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    try:
        fig.savefig(out, dpi=_DPI, metadata={"Software": "spinpump-figures"})
    finally:
        plt.close(fig)
    return out
