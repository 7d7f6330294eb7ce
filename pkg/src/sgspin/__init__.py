"""Non-adiabatic control of spin-1/2 qubits in a rotating field.

Closed-form two-level dynamics with an integrator cross-check, Stern-Gerlach
branch bookkeeping (converter and multiplier), gate timing synthesis and the
two-qubit swap family.
"""

__version__ = "0.1.0"

from .dynamics import (
    KET0,
    KET1,
    AdiabaticityReport,
    BasisMode,
    Branch,
    BranchCoefficients,
    ControlParams,
    EigenPair,
    QubitState,
    adiabaticity_parameter,
    adiabaticity_ratio_numeric,
    adiabaticity_report,
    analytic_coefficients,
    basis_sweep,
    branch_coefficients,
    fidelity,
    hamiltonian,
    instantaneous_basis,
    project,
    rabi_frequency,
    spin_propagator,
)
from .ensemble import (
    ClusterReport,
    ConversionRecord,
    PathSpinState,
    adiabatic_split,
    branch_probability,
    cascade,
    cluster_counts,
    converter_oracle,
    nonadiabatic_multiply,
    reverse_converter,
)
from .gates import (
    GateKind,
    GateSpec,
    ParameterBox,
    SynthesisResult,
    manifold_theta,
    solve_gate_time,
    synthesize_general,
    verify_gate,
)
from .ode import ode_propagate, ode_trajectory
from .swap import TwoQubitState, build_swap_outputs, concurrence, extend_swap_family
