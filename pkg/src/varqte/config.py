"""Run configuration: JSON document with CLI flag overrides."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .presets import PRESET_NAMES


class ConfigError(ValueError):
    """Invalid or inconsistent run configuration (CLI exit code 2)."""


@dataclass
class SolverSpec:
    kind: str = "rk54"  # "euler" | "rk54"
    n_steps: int = 100
    rel_tol: float = 1e-6
    abs_tol: float = 1e-8

    def validate(self):
        if self.kind not in ("euler", "rk54"):
            raise ConfigError(f"unknown solver {self.kind!r}")
        if self.kind == "euler" and self.n_steps < 1:
            raise ConfigError("euler solver needs n_steps >= 1")
        if self.kind == "rk54" and (self.rel_tol <= 0 or self.abs_tol <= 0):
            raise ConfigError("rk54 tolerances must be positive")


@dataclass
class EvolutionConfig:
    """Full experiment description; serializes to/from a JSON document."""

    preset: str | None = "illustrative"
    hamiltonian_text: str | None = None  # inline "<coeff> <word>" lines
    ansatz: dict | None = None  # serialized circuit fragment; preset default if None
    initial_parameters: list[float] | None = None  # explicit values override the recipe
    seed: int = 7
    evolution: str = "real"  # "real" | "imag"
    ode: str = "standard"  # "standard" | "argmin"
    solver: SolverSpec = field(default_factory=SolverSpec)
    t_final: float = 1.0
    fd_delta: float = 1e-4
    norm_mode: str = "exact"
    grid_points: int = 10001
    lstsq_cutoff: float = 1e-8
    out: str = "run.csv"

    def validate(self):
        if self.preset is None and self.hamiltonian_text is None:
            raise ConfigError("either a preset or an inline hamiltonian is required")
        if self.preset is not None and self.preset not in PRESET_NAMES:
            raise ConfigError(f"unknown preset {self.preset!r}; expected one of {PRESET_NAMES}")
        if self.evolution not in ("real", "imag"):
            raise ConfigError(f"evolution must be 'real' or 'imag', got {self.evolution!r}")
        if self.ode not in ("standard", "argmin"):
            raise ConfigError(f"ode must be 'standard' or 'argmin', got {self.ode!r}")
        if self.t_final <= 0:
            raise ConfigError("t_final must be positive")
        if self.fd_delta <= 0:
            raise ConfigError("fd_delta must be positive")
        if self.norm_mode not in ("exact", "coefficient_bound"):
            raise ConfigError(f"unknown norm_mode {self.norm_mode!r}")
        if self.grid_points < 3:
            raise ConfigError("grid_points must be at least 3")
        self.solver.validate()
        return self

    def to_json_dict(self) -> dict:
        d = asdict(self)
        d["solver"] = asdict(self.solver)
        return d

    @staticmethod
    def from_json_dict(d: dict) -> "EvolutionConfig":
        data = dict(d)
        solver = data.pop("solver", {})
        if not isinstance(solver, dict):
            raise ConfigError("solver must be an object")
        unknown = set(data) - set(EvolutionConfig.__dataclass_fields__)
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
        try:
            cfg = EvolutionConfig(**data, solver=SolverSpec(**solver))
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc
        return cfg

    @staticmethod
    def load(path: str | Path) -> "EvolutionConfig":
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        return EvolutionConfig.from_json_dict(data)

    def save(self, path: str | Path):
        Path(path).write_text(json.dumps(self.to_json_dict(), indent=2) + "\n")
