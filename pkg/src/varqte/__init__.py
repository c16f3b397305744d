"""Variational quantum time evolution with a-posteriori error bounds.

Simulates real- and imaginary-time evolution of small parameterized
circuits via McLachlan's variational principle and integrates, alongside
the parameters, rigorous upper bounds on the Bures distance between the
prepared and the exactly evolved state.
"""

__version__ = "0.1.0"

from .ansatz import (
    Ansatz,
    Gate,
    all_derivative_states,
    derivative_state,
    efficient_su2,
    initial_parameters,
    prepare,
)
from .bounds import (
    BoundIncrement,
    chi,
    clip_report,
    fidelity_bound,
    qite_increment,
    qrte_rate,
    zeta,
)
from .config import ConfigError, EvolutionConfig, SolverSpec
from .evolution import EvolutionProblem, joint_rhs
from .exact import ExactTrajectory, bures, exact_evolve, exact_trajectory, fidelity
from .mclachlan import (
    McLachlanTerms,
    ancilla_circuit_value,
    evaluate_terms,
    imag_rhs,
    real_rhs,
)
from .ode import (
    IntegrationError,
    IntegrationResult,
    OdeOptions,
    StepRecord,
    dopri5_step,
    error_norm_sq,
    euler_integrate,
    rhs_argmin,
    rhs_standard,
    rk54_integrate,
    solve_argmin,
    solve_standard,
)
from .pauli import (
    PauliSum,
    PauliTerm,
    apply_pauli_word,
    expectation,
    expectation_squared,
    herm_expm_apply,
    pauli_word_matrix,
    spectral_norm,
    to_dense,
    zero_state,
)
from .presets import preset_ansatz, preset_hamiltonian, preset_initial_parameters
from .run import RunResult, run
from .selftest import ValidationReport, validate
