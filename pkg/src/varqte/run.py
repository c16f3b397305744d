"""Run orchestration: configuration -> trajectory -> CSV + manifest.

One CSV row per trajectory sample (the initial point plus every accepted
step), with a fixed column schema and 17-significant-digit decimal
formatting so that identical configurations reproduce byte-identical
files.  A JSON manifest sidecar records the resolved configuration, the
seed and a run summary.
"""

from __future__ import annotations

import csv
import json
import math
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .ansatz import Ansatz, prepare
from .bounds import clip_report, fidelity_bound
from .config import ConfigError, EvolutionConfig
from .evolution import EvolutionProblem, joint_rhs
from .exact import bures, exact_trajectory, fidelity
from .ode import (
    IntegrationError,
    IntegrationResult,
    OdeOptions,
    euler_integrate,
    rk54_integrate,
)
from .pauli import PauliSum
from .presets import preset_ansatz, preset_hamiltonian, preset_initial_parameters

SQRT2 = math.sqrt(2.0)

CSV_BASE_COLUMNS = [
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


def csv_columns(n_params: int) -> list[str]:
    return ["t"] + [f"omega_{i}" for i in range(n_params)] + CSV_BASE_COLUMNS


def _fmt(x: float) -> str:
    return f"{x:.17g}"


@dataclass
class RunResult:
    csv_path: Path
    manifest_path: Path
    manifest: dict
    rows: list[dict]


def build_problem(config: EvolutionConfig) -> tuple[EvolutionProblem, np.ndarray]:
    """Resolve a validated configuration into a problem and initial parameters."""
    config.validate()
    if config.hamiltonian_text is not None:
        hamiltonian = PauliSum.from_text(config.hamiltonian_text)
    else:
        hamiltonian = preset_hamiltonian(config.preset)
    if config.ansatz is not None:
        ansatz = Ansatz.from_json_dict(config.ansatz)
    elif config.preset is not None:
        ansatz = preset_ansatz(config.preset)
    else:
        raise ConfigError("an inline hamiltonian requires an explicit ansatz")
    if ansatz.n_qubits != hamiltonian.n_qubits:
        raise ConfigError(
            f"ansatz acts on {ansatz.n_qubits} qubits, hamiltonian on {hamiltonian.n_qubits}"
        )
    if config.initial_parameters is not None:
        omega0 = np.asarray(config.initial_parameters, dtype=float)
        if omega0.shape != (ansatz.n_params,):
            raise ConfigError(
                f"initial_parameters has {omega0.size} entries, ansatz needs {ansatz.n_params}"
            )
    else:
        if config.preset is None:
            raise ConfigError("an inline hamiltonian requires explicit initial_parameters")
        omega0 = preset_initial_parameters(config.preset, config.seed)
    problem = EvolutionProblem(
        hamiltonian=hamiltonian,
        ansatz=ansatz,
        kind=config.evolution,
        ode=OdeOptions(kind=config.ode, lstsq_cutoff=config.lstsq_cutoff),
        fd_delta=config.fd_delta,
        norm_mode=config.norm_mode,
        grid_points=config.grid_points,
    )
    return problem, omega0


def integrate(config: EvolutionConfig, problem: EvolutionProblem, omega0: np.ndarray) -> IntegrationResult:
    y0 = np.concatenate([omega0, [0.0]])

    def f(t, y):
        return joint_rhs(problem, t, y)[0]

    if config.solver.kind == "euler":
        return euler_integrate(f, y0, config.t_final, config.solver.n_steps)
    return rk54_integrate(
        f,
        y0,
        config.t_final,
        rel_tol=config.solver.rel_tol,
        abs_tol=config.solver.abs_tol,
        nondecreasing_indices=(-1,),
    )


def assemble_rows(problem: EvolutionProblem, trajectory: IntegrationResult) -> list[dict]:
    """Recompute diagnostics at every accepted point and attach the oracle columns."""
    psi0 = prepare(problem.ansatz, trajectory.states[0][:-1])
    exact = exact_trajectory(problem.hamiltonian, psi0, trajectory.times, problem.kind)
    rows = []
    for i, (t, y, h) in enumerate(
        zip(trajectory.times, trajectory.states, trajectory.step_sizes)
    ):
        _, record = joint_rhs(problem, t, y)
        record.step_size = h
        psi = prepare(problem.ansatz, record.omega)
        eps = record.epsilon
        fid_rigorous, fid_paper = fidelity_bound(max(eps, 0.0))
        row = {"t": t}
        for j, value in enumerate(record.omega):
            row[f"omega_{j}"] = value
        row.update(
            e_norm=record.e_norm,
            epsilon=eps,
            epsilon_clipped=clip_report(max(eps, 0.0)),
            zeta=record.zeta,
            chi=record.chi,
            energy_prepared=record.energy,
            energy_exact=exact.energies[i],
            variance_prepared=record.variance,
            bures_actual=bures(psi, exact.states[i]),
            fidelity_actual=fidelity(psi, exact.states[i]),
            fidelity_bound_rigorous=fid_rigorous,
            fidelity_bound_paper=fid_paper,
            step_size=h,
            fq_condition=record.fq_condition,
        )
        rows.append(row)
    return rows


def write_csv(path: Path, rows: list[dict], n_params: int):
    """Fixed schema, 17 significant digits; zeta/chi stay empty when absent."""
    columns = csv_columns(n_params)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        for row in rows:
            writer.writerow(
                "" if row[c] is None else _fmt(row[c]) for c in columns
            )


def run(config: EvolutionConfig, out: str | Path | None = None) -> RunResult:
    """Execute one configured evolution; writes CSV and manifest sidecar.

    On an integration failure the rows accepted so far are still flushed
    and the manifest carries a failure marker; the caller decides the exit
    code.
    """
    started = time.perf_counter()
    problem, omega0 = build_problem(config)
    csv_path = Path(out if out is not None else config.out)
    manifest_path = csv_path.with_suffix(csv_path.suffix + ".manifest.json")

    failure = None
    try:
        trajectory = integrate(config, problem, omega0)
    except IntegrationError as exc:
        failure = str(exc)
        trajectory = exc.records if isinstance(exc.records, IntegrationResult) else None

    rows = []
    if trajectory is not None and trajectory.times:
        rows = assemble_rows(problem, trajectory)
        write_csv(csv_path, rows, problem.ansatz.n_params)

    manifest = {
        "config": config.to_json_dict(),
        "seed": config.seed,
        "library_version": __version__,
        "status": "ok" if failure is None else "integration_failure",
        "n_rows": len(rows),
        "n_rejected_steps": trajectory.n_rejected if trajectory else None,
        "n_rhs_evaluations": trajectory.n_rhs_evals if trajectory else None,
        "monotone_projections": trajectory.monotone_projections if trajectory else None,
        "wall_time_s": time.perf_counter() - started,
    }
    if failure is not None:
        manifest["failure"] = failure
    if rows:
        last = rows[-1]
        manifest["summary"] = {
            "final_t": last["t"],
            "final_epsilon": last["epsilon"],
            "final_epsilon_clipped": last["epsilon_clipped"],
            "final_bures_actual": last["bures_actual"],
            "final_energy_prepared": last["energy_prepared"],
            "final_energy_exact": last["energy_exact"],
            "final_variance": last["variance_prepared"],
            "max_e_norm": max(r["e_norm"] for r in rows),
        }
    manifest_path.write_text(json.dumps(manifest, indent=2) + "\n")
    if failure is not None:
        raise IntegrationError(failure, records=trajectory)
    return RunResult(csv_path=csv_path, manifest_path=manifest_path, manifest=manifest, rows=rows)
