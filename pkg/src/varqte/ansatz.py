"""Parameterized circuits: RY/RZ rotation layers with CX entanglement.

The hardware-efficient ansatz used throughout consists of

    [RY layer][RZ layer][full CX block][RY layer][RZ layer]

on ``n`` qubits with one repetition, giving 4n parameters.  Rotations use
the convention RY(t) = exp(-i t Y / 2), RZ(t) = exp(-i t Z / 2), so the
derivative of a rotation gate is obtained by inserting -(i/2) * sigma
right after it, which yields analytic (unnormalized) derivative
statevectors with norm 1/2.

Parameter ordering is layer-major, then qubit-major: indices [0, n) are
the first RY layer, [n, 2n) the first RZ layer, [2n, 3n) the second RY
layer ("last layer of RY rotations"), [3n, 4n) the final RZ layer.  All
functions are pure; Ansatz instances are immutable.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .pauli import DimensionError, zero_state

ROTATION_AXES = {"ry": "Y", "rz": "Z"}


@dataclass(frozen=True)
class Gate:
    """One circuit element: a parameterized rotation or a CX.

    ``kind`` is "ry", "rz" or "cx".  Rotations carry the target ``qubit``
    and their ``param_index``; CX carries ``control`` and ``qubit`` (the
    target) and no parameter.
    """

    kind: str
    qubit: int
    control: int | None = None
    param_index: int | None = None

    def __post_init__(self):
        if self.kind in ("ry", "rz"):
            if self.param_index is None or self.control is not None:
                raise ValueError(f"{self.kind} gate needs a param_index and no control")
        elif self.kind == "cx":
            if self.param_index is not None or self.control is None:
                raise ValueError("cx gate needs a control and carries no parameter")
            if self.control == self.qubit:
                raise ValueError("cx control and target must differ")
        else:
            raise ValueError(f"unknown gate kind {self.kind!r}")


@dataclass(frozen=True)
class Ansatz:
    """Ordered gate list defining |psi(omega)> = U_k(omega_k) ... U_0(omega_0)|0...0>."""

    n_qubits: int
    gates: tuple[Gate, ...]
    n_params: int
    global_phase: float = 0.0

    def __post_init__(self):
        seen = []
        for g in self.gates:
            if g.qubit >= self.n_qubits or (g.control is not None and g.control >= self.n_qubits):
                raise ValueError(f"gate {g} addresses a qubit outside 0..{self.n_qubits - 1}")
            if g.param_index is not None:
                seen.append(g.param_index)
        if sorted(seen) != list(range(self.n_params)):
            raise ValueError(
                f"parameter indices must be exactly 0..{self.n_params - 1}, each used once; "
                f"got {sorted(seen)}"
            )

    def to_json_dict(self) -> dict:
        d = {"n_qubits": self.n_qubits, "reps": 1, "layout": "full"}
        if self.global_phase:
            d["global_phase"] = self.global_phase
        return d

    @staticmethod
    def from_json_dict(d: dict) -> "Ansatz":
        """Build from the serialized fragment; an explicit gate list overrides the layout."""
        if "gates" in d:
            gates = []
            for g in d["gates"]:
                gates.append(
                    Gate(
                        kind=g["kind"],
                        qubit=g.get("target", g.get("qubit")),
                        control=g.get("control"),
                        param_index=g.get("param_index"),
                    )
                )
            n_params = sum(1 for g in gates if g.param_index is not None)
            return Ansatz(
                n_qubits=d["n_qubits"],
                gates=tuple(gates),
                n_params=n_params,
                global_phase=d.get("global_phase", 0.0),
            )
        if d.get("layout", "full") != "full":
            raise ValueError(f"unsupported entanglement layout {d.get('layout')!r}")
        if d.get("reps", 1) != 1:
            raise ValueError("only reps=1 is supported")
        return efficient_su2(d["n_qubits"], reps=d.get("reps", 1))


def efficient_su2(n_qubits: int, reps: int = 1) -> Ansatz:
    """Two RY/RZ rotation layer pairs around a full CX entanglement block.

    The CX block applies CX(i, j) for every ordered pair i < j with
    control i and target j.  Parameter count is 4 * n_qubits.
    """
    if n_qubits < 2:
        raise ValueError("efficient_su2 requires at least 2 qubits")
    if reps != 1:
        raise ValueError("repetition count is fixed to 1")
    gates: list[Gate] = []
    p = 0
    for kind in ("ry", "rz"):
        for q in range(n_qubits):
            gates.append(Gate(kind, q, param_index=p))
            p += 1
    for i in range(n_qubits):
        for j in range(i + 1, n_qubits):
            gates.append(Gate("cx", j, control=i))
    for kind in ("ry", "rz"):
        for q in range(n_qubits):
            gates.append(Gate(kind, q, param_index=p))
            p += 1
    return Ansatz(n_qubits=n_qubits, gates=tuple(gates), n_params=p)


def _apply_rotation(batch: np.ndarray, axis: str, qubit: int, theta: float, n: int) -> np.ndarray:
    """Apply RY/RZ on one qubit to a (rows, 2^n) batch of statevectors."""
    rows = batch.shape[0]
    shaped = batch.reshape(rows, 2**qubit, 2, 2 ** (n - qubit - 1))
    a = shaped[:, :, 0, :]
    b = shaped[:, :, 1, :]
    c, s = np.cos(theta / 2.0), np.sin(theta / 2.0)
    out = np.empty_like(shaped)
    if axis == "Y":
        out[:, :, 0, :] = c * a - s * b
        out[:, :, 1, :] = s * a + c * b
    else:  # Z
        out[:, :, 0, :] = (c - 1j * s) * a
        out[:, :, 1, :] = (c + 1j * s) * b
    return out.reshape(rows, -1)


def _cx_permutation(control: int, target: int, n: int) -> np.ndarray:
    idx = np.arange(2**n)
    cbit = 1 << (n - 1 - control)
    tbit = 1 << (n - 1 - target)
    return np.where(idx & cbit, idx ^ tbit, idx)


def _apply_gate(batch: np.ndarray, gate: Gate, theta: float | None, n: int) -> np.ndarray:
    if gate.kind == "cx":
        return batch[:, _cx_permutation(gate.control, gate.qubit, n)]
    return _apply_rotation(batch, ROTATION_AXES[gate.kind], gate.qubit, theta, n)


def _single_pauli_word(axis: str, qubit: int, n: int) -> str:
    return "I" * qubit + axis + "I" * (n - qubit - 1)


def _forward(ansatz: Ansatz, omega: np.ndarray, with_derivatives: bool) -> tuple[np.ndarray, np.ndarray | None]:
    """One sweep through the circuit; optionally grows derivative rows.

    Returns (psi, dpsi) where dpsi[j] = d|psi>/d omega_j (unnormalized).
    Row j is seeded as -(i/2) sigma_j applied right after gate j and then
    carried through the remaining gates together with the state row.
    """
    omega = np.asarray(omega, dtype=float)
    if omega.shape != (ansatz.n_params,):
        raise DimensionError(
            f"expected {ansatz.n_params} parameters, got shape {omega.shape}"
        )
    n = ansatz.n_qubits
    batch = zero_state(n)[np.newaxis, :].copy()
    row_of_param: dict[int, int] = {}
    from .pauli import apply_pauli_word  # local import to avoid cycle at module load

    for gate in ansatz.gates:
        theta = omega[gate.param_index] if gate.param_index is not None else None
        batch = _apply_gate(batch, gate, theta, n)
        if with_derivatives and gate.param_index is not None:
            word = _single_pauli_word(ROTATION_AXES[gate.kind], gate.qubit, n)
            seed = -0.5j * apply_pauli_word(word, batch[0])
            row_of_param[gate.param_index] = batch.shape[0]
            batch = np.vstack([batch, seed[np.newaxis, :]])
    if ansatz.global_phase:
        batch = batch * np.exp(1j * ansatz.global_phase)
    psi = batch[0]
    if not with_derivatives:
        return psi, None
    dpsi = np.empty((ansatz.n_params, 2**n), dtype=complex)
    for j, row in row_of_param.items():
        dpsi[j] = batch[row]
    return psi, dpsi


def prepare(ansatz: Ansatz, omega: np.ndarray) -> np.ndarray:
    """Normalized statevector |psi(omega)>."""
    psi, _ = _forward(ansatz, omega, with_derivatives=False)
    return psi


def derivative_state(ansatz: Ansatz, omega: np.ndarray, j: int) -> np.ndarray:
    """Unnormalized d|psi>/d omega_j (norm is exactly 1/2 for rotation gates)."""
    if not 0 <= j < ansatz.n_params:
        raise IndexError(f"parameter index {j} out of range 0..{ansatz.n_params - 1}")
    _, dpsi = _forward(ansatz, omega, with_derivatives=True)
    return dpsi[j]


def all_derivative_states(ansatz: Ansatz, omega: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(psi, dpsi-matrix) in one sweep; the workhorse for metric evaluation."""
    psi, dpsi = _forward(ansatz, omega, with_derivatives=True)
    return psi, dpsi


def initial_parameters(preset: str, seed: int | None = None) -> np.ndarray:
    """Initial parameter vectors for the three experiment presets.

    ``illustrative`` and ``hydrogen`` (2 qubits): zeros except the last RY
    layer at pi/2, preparing |++> exactly.  ``ising`` (3 qubits): zeros
    except the last RZ layer drawn uniformly from (0, pi/2], preparing
    |000> up to a global phase; the nonzero draw avoids a stationary
    initial point.
    """
    if preset in ("illustrative", "hydrogen"):
        n = 2
        omega = np.zeros(4 * n)
        omega[2 * n : 3 * n] = np.pi / 2
        return omega
    if preset == "ising":
        n = 3
        if seed is None:
            raise ValueError("ising initial parameters require a seed")
        rng = np.random.default_rng(seed)
        omega = np.zeros(4 * n)
        # uniform on (0, pi/2]: flip the half-open side of rng.uniform
        omega[3 * n : 4 * n] = np.pi / 2 - rng.uniform(0.0, np.pi / 2, size=n)
        return omega
    raise ValueError(f"unknown preset {preset!r}")
