"""Pauli-string operators and dense Hermitian matrix utilities.

A Hamiltonian is a real-weighted sum of Pauli words,

    H = sum_k c_k * P_k,    P_k in {I, X, Y, Z}^n,

acting on statevectors of dimension 2^n.  Statevectors are plain complex
numpy arrays; qubit 0 corresponds to the leftmost character of a word and
to the most significant bit of the basis index, matching the Kronecker
product ``P = kron(op[0], op[1], ...)``.

Pauli words are applied index-arithmetically (bit flips plus phase
factors); the dense-matrix route is kept as an independent oracle for
tests.  Everything here is pure and safe for concurrent use.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

PAULI_CHARS = "IXYZ"

PAULI_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

MAX_DENSE_QUBITS = 12


class DimensionError(ValueError):
    """Operator/state size mismatch or dense-memory guard violation."""


def zero_state(n_qubits: int) -> np.ndarray:
    """Return |0...0> on ``n_qubits``."""
    state = np.zeros(2**n_qubits, dtype=complex)
    state[0] = 1.0
    return state


def n_qubits_of(state: np.ndarray) -> int:
    """Number of qubits of a statevector; raises if the length is not 2^n."""
    n = int(np.log2(len(state)) + 0.5)
    if 2**n != len(state):
        raise DimensionError(f"statevector length {len(state)} is not a power of two")
    return n


def _validate_word(word: str) -> None:
    if not word or any(ch not in PAULI_CHARS for ch in word):
        raise ValueError(f"invalid Pauli word {word!r}: only characters I, X, Y, Z allowed")


def _compile_word(word: str) -> tuple[np.ndarray, np.ndarray]:
    """Precompute (source indices, phases) so that (P psi)[i] = phase[i] * psi[src[i]]."""
    n = len(word)
    dim = 2**n
    flip_mask = 0
    sign_mask = 0
    n_y = 0
    for pos, ch in enumerate(word):
        bit = 1 << (n - 1 - pos)
        if ch in "XY":
            flip_mask |= bit
        if ch in "YZ":
            sign_mask |= bit
        if ch == "Y":
            n_y += 1
    idx = np.arange(dim)
    src = idx ^ flip_mask
    # parity of the masked bits of the output index
    masked = idx & sign_mask
    parity = np.zeros(dim, dtype=np.int64)
    for shift in range(n):
        parity ^= (masked >> shift) & 1
    phases = ((-1.0) ** parity) * ((-1j) ** n_y)
    return src, phases.astype(complex)


def apply_pauli_word(word: str, state: np.ndarray) -> np.ndarray:
    """Apply a Pauli word to a statevector.

    Implemented with index arithmetic: X/Y flip the addressed bit, Y/Z
    contribute sign factors, each Y contributes a factor -i relative to
    the flipped component.  Unitary, hence norm preserving.
    """
    _validate_word(word)
    if len(state) != 2 ** len(word):
        raise DimensionError(
            f"word {word!r} acts on {2**len(word)} amplitudes, state has {len(state)}"
        )
    src, phases = _compile_word(word)
    return phases * np.asarray(state, dtype=complex)[src]


def pauli_word_matrix(word: str) -> np.ndarray:
    """Dense matrix of a Pauli word (test oracle for apply_pauli_word)."""
    _validate_word(word)
    out = PAULI_MATRICES[word[0]]
    for ch in word[1:]:
        out = np.kron(out, PAULI_MATRICES[ch])
    return out


@dataclass(frozen=True)
class PauliTerm:
    """One weighted Pauli word; coefficients are real (energy units, hbar = 1)."""

    coefficient: float
    word: str

    def __post_init__(self):
        _validate_word(self.word)
        if not np.isfinite(self.coefficient):
            raise ValueError(f"non-finite coefficient {self.coefficient!r}")


class PauliSum:
    """Real-weighted sum of Pauli words on a fixed qubit count.

    The induced dense matrix is Hermitian by construction.  An empty sum
    (H = 0) is allowed but then ``n_qubits`` must be given explicitly.
    Eigendecompositions are computed lazily and cached on the instance;
    instances are immutable after construction.
    """

    def __init__(self, terms, n_qubits: int | None = None):
        self.terms: tuple[PauliTerm, ...] = tuple(
            t if isinstance(t, PauliTerm) else PauliTerm(*t) for t in terms
        )
        if self.terms:
            lengths = {len(t.word) for t in self.terms}
            if len(lengths) > 1:
                raise DimensionError(f"mixed word lengths {sorted(lengths)}")
            inferred = lengths.pop()
            if n_qubits is not None and n_qubits != inferred:
                raise DimensionError(f"n_qubits={n_qubits} but words have length {inferred}")
            self.n_qubits = inferred
        else:
            if n_qubits is None:
                raise ValueError("empty PauliSum requires explicit n_qubits")
            self.n_qubits = int(n_qubits)
        if self.n_qubits < 1:
            raise ValueError("n_qubits must be positive")
        self._compiled = [(_compile_word(t.word), t.coefficient) for t in self.terms]
        self._eig: tuple[np.ndarray, np.ndarray] | None = None

    @classmethod
    def from_text(cls, text: str, n_qubits: int | None = None) -> "PauliSum":
        """Parse lines of ``<coeff> <word>``, e.g. ``0.5716 ZZ``.

        Blank lines and ``#`` comments are ignored.
        """
        terms = []
        for lineno, line in enumerate(text.splitlines(), start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"line {lineno}: expected '<coeff> <word>', got {line!r}")
            terms.append(PauliTerm(float(parts[0]), parts[1].upper()))
        return cls(terms, n_qubits=n_qubits)

    def to_text(self) -> str:
        return "\n".join(f"{t.coefficient!r} {t.word}" for t in self.terms)

    def apply(self, state: np.ndarray) -> np.ndarray:
        """H |psi> via per-term index arithmetic."""
        self._check_state(state)
        out = np.zeros_like(state, dtype=complex)
        for (src, phases), coeff in self._compiled:
            out += coeff * (phases * state[src])
        return out

    def coefficient_bound(self) -> float:
        return float(sum(abs(t.coefficient) for t in self.terms))

    def _check_state(self, state: np.ndarray) -> None:
        if len(state) != 2**self.n_qubits:
            raise DimensionError(
                f"state has {len(state)} amplitudes, expected {2**self.n_qubits}"
            )

    def _eigh(self) -> tuple[np.ndarray, np.ndarray]:
        if self._eig is None:
            vals, vecs = np.linalg.eigh(to_dense(self))
            self._eig = (vals, vecs)
        return self._eig

    def ground_state(self) -> tuple[float, np.ndarray]:
        """(lowest eigenvalue, eigenvector) from the cached eigensolve."""
        vals, vecs = self._eigh()
        return float(vals[0]), vecs[:, 0]

    def __repr__(self):
        body = " + ".join(f"{t.coefficient:g}*{t.word}" for t in self.terms) or "0"
        return f"PauliSum({self.n_qubits}q: {body})"


def to_dense(h: PauliSum) -> np.ndarray:
    """Dense Hermitian matrix sum_k c_k kron(...); guarded at 12 qubits."""
    if h.n_qubits > MAX_DENSE_QUBITS:
        raise DimensionError(
            f"refusing to densify {h.n_qubits} qubits (> {MAX_DENSE_QUBITS})"
        )
    dim = 2**h.n_qubits
    out = np.zeros((dim, dim), dtype=complex)
    for term in h.terms:
        out += term.coefficient * pauli_word_matrix(term.word)
    return out


def expectation(h: PauliSum, state: np.ndarray) -> float:
    """<psi|H|psi> for a normalized state.

    The imaginary residue must stay below 1e-10; larger residues signal an
    internal inconsistency and raise instead of being truncated silently.
    """
    h._check_state(state)
    norm = np.linalg.norm(state)
    if abs(norm - 1.0) > 1e-8:
        raise ValueError(f"expectation requires a normalized state, got norm {norm}")
    value = np.vdot(state, h.apply(state))
    if abs(value.imag) > 1e-10:
        raise ArithmeticError(f"expectation has imaginary residue {value.imag:g}")
    return float(value.real)


def expectation_squared(h: PauliSum, state: np.ndarray) -> float:
    """<psi|H^2|psi> = ||H psi||^2, exactly real and nonnegative."""
    h._check_state(state)
    hpsi = h.apply(state)
    return float(np.real(np.vdot(hpsi, hpsi)))


def spectral_norm(h: PauliSum, mode: str = "exact") -> float:
    """Operator norm of H.

    ``exact`` diagonalizes the dense matrix (requires densifiable size);
    ``coefficient_bound`` returns sum_k |c_k|, an upper bound that needs
    no diagonalization.
    """
    if mode == "coefficient_bound":
        return h.coefficient_bound()
    if mode != "exact":
        raise ValueError(f"unknown spectral norm mode {mode!r}")
    if not h.terms:
        return 0.0
    vals, _ = h._eigh()
    return float(np.max(np.abs(vals)))


def herm_expm_apply(
    h: PauliSum, scale: complex, state: np.ndarray, renormalize: bool = False
) -> np.ndarray:
    """exp(scale * H) |psi> through the eigendecomposition of H.

    Exact to numerical precision (no Trotterization).  For real negative
    ``scale`` the result decays; pass ``renormalize=True`` to return a unit
    vector (imaginary-time evolution).
    """
    if not np.isfinite(scale):
        raise ValueError(f"non-finite scale {scale!r}")
    h._check_state(state)
    vals, vecs = h._eigh()
    coeffs = vecs.conj().T @ state
    out = vecs @ (np.exp(scale * vals) * coeffs)
    if renormalize:
        norm = np.linalg.norm(out)
        if norm < 1e-300:
            raise ArithmeticError("state vanished under imaginary-time evolution")
        out = out / norm
    return out
