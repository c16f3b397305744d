"""Comparison panels rendered from evolution-run CSV files.

Five panel kinds, each overlaying one or more labelled runs:

* state_error     -- clipped error bound and actual Bures distance
* energy          -- prepared and exact energies, shaded by +/- zeta when present
* grad_error      -- gradient-error norm
* energy_variance -- variance of the Hamiltonian in the prepared state
* fidelity        -- actual fidelity with both fidelity lower bounds

Only the public CSV schema is consumed; there is no code dependency on
the simulation package.  Output is a vector image (suffix selects the
backend format).  Rendering is deterministic: SOURCE_DATE_EPOCH is pinned
so PDF/SVG metadata does not embed wall-clock timestamps.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass
from pathlib import Path

os.environ.setdefault("SOURCE_DATE_EPOCH", "0")

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "figure-gen"
import matplotlib.pyplot as plt

PANEL_KINDS = ("state_error", "energy", "grad_error", "energy_variance", "fidelity")

_REQUIRED = {
    "state_error": ("t", "epsilon_clipped", "bures_actual"),
    "energy": ("t", "energy_prepared", "energy_exact", "zeta"),
    "grad_error": ("t", "e_norm"),
    "energy_variance": ("t", "variance_prepared"),
    "fidelity": ("t", "fidelity_actual", "fidelity_bound_rigorous", "fidelity_bound_paper"),
}


class PanelError(ValueError):
    """Bad panel request: unknown kind, unreadable CSV, missing column."""


@dataclass(frozen=True)
class PanelSpec:
    panel: str
    inputs: tuple[tuple[str, str], ...]  # (csv path, label)
    out: str

    def __post_init__(self):
        if self.panel not in PANEL_KINDS:
            raise PanelError(f"unknown panel kind {self.panel!r}; expected one of {PANEL_KINDS}")
        if not self.inputs:
            raise PanelError("at least one input CSV is required")


def load_columns(path: str, required: tuple[str, ...]) -> dict[str, list[float | None]]:
    """Read the needed columns; empty fields become None."""
    try:
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            header = reader.fieldnames or []
            missing = [c for c in required if c not in header]
            if missing:
                raise PanelError(f"{path}: missing required columns {missing}")
            rows = list(reader)
    except OSError as exc:
        raise PanelError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise PanelError(f"{path}: no data rows")
    out: dict[str, list[float | None]] = {c: [] for c in required}
    for row in rows:
        for c in required:
            value = row[c]
            out[c].append(float(value) if value != "" else None)
    return out


def _series(data, column):
    return [v for v in data[column]], data["t"]


def _plot_runs(ax, spec, column_styles):
    """column_styles: list of (column, line style kwargs, legend suffix)."""
    for path, label in spec.inputs:
        data = load_columns(path, _REQUIRED[spec.panel])
        t = data["t"]
        marker = "o" if len(t) == 1 else None
        for column, style, suffix in column_styles:
            values = data[column]
            name = f"{label} {suffix}".strip()
            ax.plot(t, values, marker=marker, label=name, **style)
    ax.set_xlabel("t")
    ax.legend(fontsize=8)


def render(spec: PanelSpec) -> Path:
    """Render one panel to ``spec.out``; returns the written path."""
    fig, ax = plt.subplots(figsize=(5.0, 3.4), constrained_layout=True)
    try:
        if spec.panel == "state_error":
            _plot_runs(
                ax,
                spec,
                [
                    ("epsilon_clipped", {"linestyle": "-"}, "bound"),
                    ("bures_actual", {"linestyle": "--"}, "actual"),
                ],
            )
            ax.set_ylabel("Bures distance")
            ax.set_title("state error: bound vs actual")
        elif spec.panel == "energy":
            for path, label in spec.inputs:
                data = load_columns(path, _REQUIRED["energy"])
                t = data["t"]
                marker = "o" if len(t) == 1 else None
                prepared = data["energy_prepared"]
                ax.plot(t, prepared, marker=marker, label=f"{label} prepared")
                ax.plot(t, data["energy_exact"], marker=marker, linestyle="--", label=f"{label} exact")
                if all(z is not None for z in data["zeta"]):
                    low = [e - z for e, z in zip(prepared, data["zeta"])]
                    high = [e + z for e, z in zip(prepared, data["zeta"])]
                    ax.fill_between(t, low, high, alpha=0.2, label=f"{label} ± zeta")
            ax.set_xlabel("t")
            ax.set_ylabel("energy")
            ax.set_title("energies with bound band")
            ax.legend(fontsize=8)
        elif spec.panel == "grad_error":
            _plot_runs(ax, spec, [("e_norm", {"linestyle": "-"}, "")])
            ax.set_ylabel("gradient-error norm")
            ax.set_title("gradient errors")
        elif spec.panel == "energy_variance":
            _plot_runs(ax, spec, [("variance_prepared", {"linestyle": "-"}, "")])
            ax.set_ylabel("Var(H)")
            ax.set_title("energy variance")
        else:  # fidelity
            _plot_runs(
                ax,
                spec,
                [
                    ("fidelity_actual", {"linestyle": "-"}, "actual"),
                    ("fidelity_bound_rigorous", {"linestyle": "--"}, "bound"),
                    ("fidelity_bound_paper", {"linestyle": ":"}, "bound (first order)"),
                ],
            )
            ax.set_ylabel("fidelity")
            ax.set_title("fidelity vs bound")
        out = Path(spec.out)
        fig.savefig(out, metadata={"CreationDate": None} if out.suffix == ".pdf" else None)
        return out
    finally:
        plt.close(fig)
