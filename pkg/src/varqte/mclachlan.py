"""Per-step McLachlan quantities: metric, gradient vector, energies.

``evaluate_terms`` bundles everything the parameter ODEs and the error
bounds need at one point omega:

* fq        -- Fubini-Study metric, Re(<d_i psi|d_j psi> - <d_i psi|psi><psi|d_j psi>)
* c         -- C_i = <d_i psi| H |psi>
* overlap   -- <d_i psi|psi> (purely imaginary for unitary circuits)
* energy    -- <psi|H|psi>
* h2        -- <psi|H^2|psi>
* variance  -- h2 - energy^2

The analytic derivative-statevector route is the primary path.  The
working-qubit circuit construction (an extra ancilla controlling the two
operator branches) is implemented as an independent cross-check; it
evaluates Re/Im(e^{i alpha} <psi_in| U^dag (O) V |psi_in>) by exact
simulation of the (n+1)-qubit circuit and reproduces every metric entry.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ansatz import Ansatz, Gate, ROTATION_AXES, _apply_gate, _single_pauli_word, all_derivative_states
from .pauli import PauliSum, apply_pauli_word


@dataclass(frozen=True)
class McLachlanTerms:
    """Metric/gradient bundle at one parameter point."""

    fq: np.ndarray
    c: np.ndarray
    overlap: np.ndarray
    energy: float
    h2: float
    variance: float


def evaluate_terms(ansatz: Ansatz, omega: np.ndarray, h: PauliSum) -> McLachlanTerms:
    """Evaluate all McLachlan quantities at ``omega``.

    Derivative states are computed once in a single circuit sweep; the
    (k+1)^2 pair loop is a dense matrix product at these sizes.  fq is
    symmetrized after assembly to suppress roundoff asymmetry.
    """
    if h.n_qubits != ansatz.n_qubits:
        raise ValueError(
            f"hamiltonian acts on {h.n_qubits} qubits, ansatz on {ansatz.n_qubits}"
        )
    psi, dpsi = all_derivative_states(ansatz, omega)
    hpsi = h.apply(psi)
    overlap = dpsi.conj() @ psi
    c = dpsi.conj() @ hpsi
    gram = dpsi.conj() @ dpsi.T
    fq = np.real(gram - np.outer(overlap, overlap.conj()))
    fq = 0.5 * (fq + fq.T)
    energy = float(np.real(np.vdot(psi, hpsi)))
    h2 = float(np.real(np.vdot(hpsi, hpsi)))
    return McLachlanTerms(
        fq=fq, c=c, overlap=overlap, energy=energy, h2=h2, variance=h2 - energy**2
    )


def real_rhs(terms: McLachlanTerms) -> np.ndarray:
    """Right-hand side of the real-time linear system: Im(C_i - <d_i psi|psi> E)."""
    return np.imag(terms.c - terms.overlap * terms.energy)


def imag_rhs(terms: McLachlanTerms) -> np.ndarray:
    """Right-hand side of the imaginary-time linear system: -Re(C_i)."""
    return -np.real(terms.c)


# --- ancilla-circuit cross-check -------------------------------------------

# An operation applied to the system register of the working-qubit circuit:
# ("gate", Gate, theta) or ("word", pauli_word).
CircuitOp = tuple


def _apply_ops(state: np.ndarray, ops, n: int) -> np.ndarray:
    out = state
    for op in ops:
        if op[0] == "gate":
            out = _apply_gate(out[np.newaxis, :], op[1], op[2], n)[0]
        elif op[0] == "word":
            out = apply_pauli_word(op[1], out)
        else:
            raise ValueError(f"unknown circuit op {op[0]!r}")
    return out


def ancilla_circuit_value(
    kind: str,
    u_ops,
    v_ops,
    state_prep: np.ndarray,
    alpha: float,
    observable: PauliSum | None = None,
) -> float:
    """Working-qubit evaluation of Re/Im(e^{i alpha} <psi_in|U^dag (O) V|psi_in>).

    Simulates the construction exactly: the ancilla starts in
    (|0> + e^{i alpha}|1>)/sqrt(2), U is applied to the system branch with
    ancilla 0, V to the branch with ancilla 1, then a Hadamard mixes the
    branches and the ancilla Z expectation is read out -- together with the
    system observable when one is given.  ``kind`` selects the real part
    ("real") or, via an extra -pi/2 phase on the ancilla, the imaginary
    part ("imag").
    """
    if kind not in ("real", "imag"):
        raise ValueError(f"kind must be 'real' or 'imag', got {kind!r}")
    if kind == "imag":
        alpha = alpha - np.pi / 2
    n = int(np.log2(len(state_prep)) + 0.5)
    if 2**n != len(state_prep):
        raise ValueError("state_prep length is not a power of two")
    # composite register: ancilla as the leading (most significant) qubit
    branch0 = _apply_ops(np.asarray(state_prep, dtype=complex), u_ops, n) / np.sqrt(2)
    branch1 = np.exp(1j * alpha) * _apply_ops(np.asarray(state_prep, dtype=complex), v_ops, n) / np.sqrt(2)
    # Hadamard on the ancilla
    plus = (branch0 + branch1) / np.sqrt(2)
    minus = (branch0 - branch1) / np.sqrt(2)
    if observable is None:
        value = np.vdot(plus, plus) - np.vdot(minus, minus)
    else:
        if observable.n_qubits != n:
            raise ValueError("observable size does not match the system register")
        value = np.vdot(plus, observable.apply(plus)) - np.vdot(minus, observable.apply(minus))
    return float(np.real(value))


def _gate_ops(ansatz: Ansatz, omega: np.ndarray, upto: int | None = None) -> list:
    """Gates 0..upto (inclusive) as circuit ops; all gates when upto is None."""
    gates = ansatz.gates if upto is None else ansatz.gates[: upto + 1]
    return [
        ("gate", g, omega[g.param_index] if g.param_index is not None else None)
        for g in gates
    ]


def _sigma_inserted_ops(ansatz: Ansatz, omega: np.ndarray, j: int, stop: int | None = None) -> list:
    """Ops for the circuit with sigma_j inserted right after its rotation gate.

    ``stop`` truncates after gate index ``stop``; None runs to the end.
    """
    gate_idx = next(i for i, g in enumerate(ansatz.gates) if g.param_index == j)
    gate = ansatz.gates[gate_idx]
    word = _single_pauli_word(ROTATION_AXES[gate.kind], gate.qubit, ansatz.n_qubits)
    ops = _gate_ops(ansatz, omega, upto=gate_idx)
    ops.append(("word", word))
    tail_end = len(ansatz.gates) - 1 if stop is None else stop
    for g in ansatz.gates[gate_idx + 1 : tail_end + 1]:
        ops.append(("gate", g, omega[g.param_index] if g.param_index is not None else None))
    return ops


def fubini_study_via_ancilla(ansatz: Ansatz, omega: np.ndarray) -> np.ndarray:
    """Assemble fq entirely from working-qubit circuit values.

    For i <= j the Gram part Re<d_i psi|d_j psi> is one circuit value with
    both branches truncated after gate j, and the phase part uses
    Im<d_i psi|psi> = (1/2) Re<(sigma_i-inserted) psi|psi>, one circuit
    value per parameter.  Exact simulation, no sampling.
    """
    omega = np.asarray(omega, dtype=float)
    k = ansatz.n_params
    psi0 = np.zeros(2**ansatz.n_qubits, dtype=complex)
    psi0[0] = 1.0
    gate_index_of = {
        g.param_index: idx for idx, g in enumerate(ansatz.gates) if g.param_index is not None
    }
    full = _gate_ops(ansatz, omega)
    imag_overlap = np.empty(k)
    for j in range(k):
        val = ancilla_circuit_value(
            "real", _sigma_inserted_ops(ansatz, omega, j), full, psi0, alpha=0.0
        )
        imag_overlap[j] = 0.5 * val
    fq = np.empty((k, k))
    for i in range(k):
        for j in range(i, k):
            stop = gate_index_of[max(i, j, key=lambda p: gate_index_of[p])]
            u_ops = _sigma_inserted_ops(ansatz, omega, i, stop=stop)
            v_ops = _sigma_inserted_ops(ansatz, omega, j, stop=stop)
            gram = 0.25 * ancilla_circuit_value("real", u_ops, v_ops, psi0, alpha=0.0)
            fq[i, j] = fq[j, i] = gram - imag_overlap[i] * imag_overlap[j]
    return fq


def gradient_components_via_ancilla(
    ansatz: Ansatz, omega: np.ndarray, h: PauliSum, j: int
) -> tuple[float, float]:
    """(Im C_j, Re C_j) from the observable variant of the working-qubit circuit."""
    omega = np.asarray(omega, dtype=float)
    psi0 = np.zeros(2**ansatz.n_qubits, dtype=complex)
    psi0[0] = 1.0
    u_ops = _sigma_inserted_ops(ansatz, omega, j)
    full = _gate_ops(ansatz, omega)
    im_c = 0.5 * ancilla_circuit_value("real", u_ops, full, psi0, alpha=0.0, observable=h)
    re_c = -0.5 * ancilla_circuit_value("imag", u_ops, full, psi0, alpha=0.0, observable=h)
    return im_c, re_c
