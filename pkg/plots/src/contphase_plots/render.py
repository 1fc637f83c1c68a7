"""
Figure rendering for contphase CSV sweep tables.

Pure consumer of the CSV contract: parses the normative columns, draws, and
writes an image.  Nothing is recomputed and the input file is never written.

Figure kinds
------------
transmission-compare
    Exact transmission phase (solid) against the adiabatic geometric phase
    (dashed) over the wavenumber sweep, with the discrete-spectrum band
    |k| < k1 shaded (k1 taken from the '# k1:' metadata comment).

solid-angle-sweep
    Solid angle of the circuit family versus the cone angle (left axis),
    with the numeric and closed-form circuit phases (right axis).
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

__all__ = ["PlotJob", "RenderError", "render", "read_table", "FIGURE_KINDS"]

FIGURE_KINDS = ("transmission-compare", "solid-angle-sweep")

_REQUIRED = {
    "transmission-compare": ("k", "gamma_geo_closed", "gamma_geo_numeric",
                             "delta0_rad", "delta_exact_rad", "abs_diff",
                             "est_error"),
    "solid-angle-sweep": ("theta", "omega_solid", "gamma_geo_numeric",
                          "gamma_geo_closed", "abs_diff"),
}


class RenderError(ValueError):
    """The input table cannot be rendered (missing column, no rows, ...)."""


@dataclass(frozen=True)
class PlotJob:
    input_csv: str
    kind: str
    output_image: str

    def __post_init__(self):
        if self.kind not in FIGURE_KINDS:
            raise RenderError(f"unknown figure kind {self.kind!r}; "
                              f"expected one of {FIGURE_KINDS}")


def read_table(path: str) -> tuple[dict, dict[str, list[float]]]:
    """Parse a contphase CSV: ('# key: value' metadata, column -> values)."""
    meta: dict[str, str] = {}
    with open(path, "rb") as fh:
        raw = fh.read()
    lines = []
    for line in io.StringIO(raw.decode("utf-8")):
        line = line.rstrip("\n")
        if line.startswith("#"):
            body = line.lstrip("# ")
            if ":" in body:
                key, _, value = body.partition(":")
                meta[key.strip()] = value.strip()
            continue
        if line:
            lines.append(line)
    if not lines:
        raise RenderError("input CSV has no header row")
    reader = csv.reader(lines)
    header = next(reader)
    columns: dict[str, list[float]] = {name: [] for name in header}
    for row in reader:
        for name, cell in zip(header, row):
            columns[name].append(float(cell))
    return meta, columns


def _require_columns(columns: dict, kind: str) -> None:
    for name in _REQUIRED[kind]:
        if name not in columns:
            raise RenderError(f"missing column {name!r} required by {kind}")
    n = len(columns[_REQUIRED[kind][0]])
    if n == 0:
        raise RenderError("input CSV has no data rows")


def _render_transmission(meta: dict, columns: dict, out: str) -> None:
    k = columns["k"]
    fig, ax = plt.subplots(figsize=(6.4, 4.4))
    ax.plot(k, columns["delta_exact_rad"], "-", color="tab:blue",
            label="exact transmission phase")
    ax.plot(k, columns["delta0_rad"], "--", color="tab:red",
            label="adiabatic geometric phase")
    if "k1" in meta:
        k1 = float(meta["k1"])
        lo = min(-k1, min(k) - 0.0)
        ax.axvspan(-k1, k1, color="0.85", zorder=0)
        ax.text(0.0, 0.04, "discrete spectrum", ha="center", va="bottom",
                transform=ax.get_xaxis_transform(), fontsize=9, color="0.35")
        ax.set_xlim(lo, max(k))
    ax.set_xlabel("k")
    ax.set_ylabel("phase (radians)")
    ax.legend(frameon=False)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(out, dpi=150)
    plt.close(fig)


def _render_solid_angle(meta: dict, columns: dict, out: str) -> None:
    theta = columns["theta"]
    fig, ax = plt.subplots(figsize=(6.4, 4.4))
    ax.plot(theta, columns["omega_solid"], "-o", color="tab:blue",
            label="solid angle")
    ax.set_xlabel("cone angle theta (radians)")
    ax.set_ylabel("solid angle (steradians)", color="tab:blue")
    ax2 = ax.twinx()
    ax2.plot(theta, columns["gamma_geo_numeric"], "-", color="tab:red",
             label="circuit phase (numeric)")
    ax2.plot(theta, columns["gamma_geo_closed"], "--", color="tab:orange",
             label="circuit phase (closed form)")
    ax2.set_ylabel("phase (radians)", color="tab:red")
    lines, labels = ax.get_legend_handles_labels()
    lines2, labels2 = ax2.get_legend_handles_labels()
    ax.legend(lines + lines2, labels + labels2, frameon=False,
              loc="center left")
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(out, dpi=150)
    plt.close(fig)


def render(job: PlotJob) -> str:
    """Render the job; returns the output path.  No file is written when the
    input is rejected."""
    meta, columns = read_table(job.input_csv)
    _require_columns(columns, job.kind)
    if job.kind == "transmission-compare":
        _render_transmission(meta, columns, job.output_image)
    else:
        _render_solid_angle(meta, columns, job.output_image)
    return job.output_image
