"""Panel rendering from schema CSVs, including a live run of the simulator CLI."""

import csv
import shutil
import subprocess
import sys
from pathlib import Path

import pytest

from figure_gen import PANEL_KINDS, PanelError, PanelSpec, load_columns, render

COLUMNS = (
    ["t"]
    + [f"omega_{i}" for i in range(8)]
    + [
        "e_norm",
        "epsilon",
        "epsilon_clipped",
        "zeta",
        "chi",
        "energy_prepared",
        "energy_exact",
        "variance_prepared",
        "bures_actual",
        "fidelity_actual",
        "fidelity_bound_rigorous",
        "fidelity_bound_paper",
        "step_size",
        "fq_condition",
    ]
)


def write_fixture_csv(path: Path, n_rows=5, imag=True):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(COLUMNS)
        for k in range(n_rows):
            t = k / max(n_rows - 1, 1)
            row = {c: 0.0 for c in COLUMNS}
            row.update(
                t=t,
                e_norm=0.1 * t,
                epsilon=0.2 * t,
                epsilon_clipped=min(0.2 * t, 2**0.5),
                zeta=0.05 * t if imag else "",
                chi=1.0 - 0.01 * t if imag else "",
                energy_prepared=1.0 - 0.5 * t,
                energy_exact=1.0 - 0.52 * t,
                variance_prepared=0.5 * (1 - t),
                bures_actual=0.15 * t,
                fidelity_actual=1.0 - 0.01 * t,
                fidelity_bound_rigorous=1.0 - 0.02 * t,
                fidelity_bound_paper=1.0 - 0.01 * t,
                step_size=0.0 if k == 0 else 1.0 / n_rows,
                fq_condition=10.0,
            )
            writer.writerow(row[c] for c in COLUMNS)


@pytest.fixture()
def fixture_csv(tmp_path):
    path = tmp_path / "run.csv"
    write_fixture_csv(path)
    return path


def test_all_panel_kinds_render(fixture_csv, tmp_path):
    for kind in PANEL_KINDS:
        out = tmp_path / f"{kind}.pdf"
        result = render(PanelSpec(kind, ((str(fixture_csv), "run"),), str(out)))
        assert result.exists() and result.stat().st_size > 0


def test_two_csv_comparison(fixture_csv, tmp_path):
    other = tmp_path / "other.csv"
    write_fixture_csv(other, n_rows=9)
    out = tmp_path / "cmp.svg"
    render(
        PanelSpec(
            "state_error",
            ((str(fixture_csv), "euler"), (str(other), "rk54")),
            str(out),
        )
    )
    assert out.exists()


def test_single_row_does_not_crash(tmp_path):
    path = tmp_path / "one.csv"
    write_fixture_csv(path, n_rows=1)
    out = tmp_path / "one.pdf"
    render(PanelSpec("state_error", ((str(path), "point"),), str(out)))
    assert out.exists()


def test_missing_column_named_error(tmp_path):
    path = tmp_path / "bad.csv"
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "e_norm"])
        writer.writerow([0.0, 0.0])
    with pytest.raises(PanelError, match="bures_actual"):
        render(PanelSpec("state_error", ((str(path), "x"),), str(tmp_path / "o.pdf")))


def test_empty_csv_rejected(tmp_path):
    path = tmp_path / "empty.csv"
    with open(path, "w", newline="") as fh:
        csv.writer(fh).writerow(COLUMNS)
    with pytest.raises(PanelError, match="no data rows"):
        render(PanelSpec("grad_error", ((str(path), "x"),), str(tmp_path / "o.pdf")))


def test_unknown_panel_rejected(fixture_csv, tmp_path):
    with pytest.raises(PanelError):
        PanelSpec("spectrum", ((str(fixture_csv), "x"),), str(tmp_path / "o.pdf"))


def test_render_deterministic(fixture_csv, tmp_path):
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    render(PanelSpec("fidelity", ((str(fixture_csv), "run"),), str(a)))
    render(PanelSpec("fidelity", ((str(fixture_csv), "run"),), str(b)))
    assert a.read_bytes() == b.read_bytes()


def test_cli_roundtrip(fixture_csv, tmp_path):
    from figure_gen.cli import main

    out = tmp_path / "cli.pdf"
    code = main(
        ["--panel", "energy", "--csv", f"{fixture_csv}:demo", "--out", str(out)]
    )
    assert code == 0 and out.exists()


def test_cli_error_exit(tmp_path):
    from figure_gen.cli import main

    code = main(
        ["--panel", "energy", "--csv", str(tmp_path / "missing.csv"), "--out", str(tmp_path / "o.pdf")]
    )
    assert code == 1


def _run_simulator_cli(args):
    """Drive the simulator through its public CLI (no code dependency)."""
    exe = shutil.which("varqte")
    cmd = [exe] if exe else [sys.executable, "-m", "varqte.cli"]
    return subprocess.run(cmd + args, capture_output=True, text=True)


def test_hydrogen_panel_from_live_run(tmp_path):
    """End-to-end: run the hydrogen experiment, render its state-error panel,
    and confirm both curves stay below 1e-3 (the exactly-representable case)."""
    csv_path = tmp_path / "hydrogen.csv"
    proc = _run_simulator_cli(
        [
            "run",
            "--preset",
            "hydrogen",
            "--evolution",
            "imag",
            "--ode",
            "argmin",
            "--solver",
            "rk54",
            "--out",
            str(csv_path),
        ]
    )
    if proc.returncode != 0 and not csv_path.exists():
        pytest.skip(f"simulator CLI unavailable: {proc.stderr.strip()[:200]}")
    out = tmp_path / "hydrogen_state_error.pdf"
    render(PanelSpec("state_error", ((str(csv_path), "hydrogen"),), str(out)))
    assert out.exists() and out.stat().st_size > 0
    data = load_columns(str(csv_path), ("t", "epsilon_clipped", "bures_actual"))
    assert max(data["epsilon_clipped"]) < 1e-3
    assert max(data["bures_actual"]) < 1e-3
