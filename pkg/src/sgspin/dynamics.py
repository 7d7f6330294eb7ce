"""Two-level spin dynamics in a field rotating about the z axis.

The Hamiltonian is

    H(t) = (omega0 / 2) [[cos(theta),            exp(-i omega t) sin(theta)],
                         [exp(i omega t) sin(theta), -cos(theta)          ]]

i.e. a field of fixed magnitude (Larmor frequency ``omega0``) tilted by
``theta`` from z and rotating at ``omega`` in the x-y plane.  Units are
whatever the caller uses; frequencies are angular (rad per unit time).

Three conventions for the instantaneous eigenbasis are available through
:class:`BasisMode`:

* ``EXACT`` diagonalizes H(t) numerically and fixes the phase so the
  larger-magnitude component is real and positive.
* ``COROTATING`` uses the analytic eigenvectors carried along by the frame
  rotation exp(-i omega t sigma_z / 2).  In this gauge the closed-form Rabi
  coefficients describe the state exactly, phases included.
* ``PAPER_LITERAL`` reproduces the column vectors as they were printed in
  the source material, which are not eigenvectors of H(t) for general theta.
  It exists only to quantify that discrepancy.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InvalidParams, NonOrthogonalBasis, NotNormalized

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)

NORM_TOL = 1e-12


@dataclass(frozen=True)
class ControlParams:
    """Drive configuration: Larmor frequency, rotation rate, tilt angle."""

    omega0: float
    omega: float
    theta: float

    def __post_init__(self):
        for name in ("omega0", "omega", "theta"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise InvalidParams(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, value)
        if self.omega0 <= 0:
            raise InvalidParams(f"omega0 must be > 0, got {self.omega0}")
        if self.omega < 0:
            raise InvalidParams(f"omega must be >= 0, got {self.omega}")
        if not 0.0 <= self.theta <= math.pi:
            raise InvalidParams(f"theta must lie in [0, pi], got {self.theta}")


@dataclass(frozen=True)
class QubitState:
    """Amplitudes ``a0``, ``a1`` of a spin-1/2 state.

    Normalization is not enforced on construction (integrators return states
    that are normalized only to their tolerance); operations that require it
    call :meth:`check_normalized`.
    """

    a0: complex
    a1: complex

    def __post_init__(self):
        object.__setattr__(self, "a0", complex(self.a0))
        object.__setattr__(self, "a1", complex(self.a1))

    @classmethod
    def from_vector(cls, v) -> "QubitState":
        v = np.asarray(v, dtype=complex).reshape(2)
        return cls(complex(v[0]), complex(v[1]))

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.a0, self.a1], dtype=complex)

    @property
    def populations(self) -> tuple[float, float]:
        return abs(self.a0) ** 2, abs(self.a1) ** 2

    def norm(self) -> float:
        return math.hypot(abs(self.a0), abs(self.a1))

    def normalized(self) -> "QubitState":
        n = self.norm()
        if n == 0:
            raise NotNormalized("cannot normalize the zero vector")
        return QubitState(self.a0 / n, self.a1 / n)

    def check_normalized(self, tol: float = NORM_TOL) -> "QubitState":
        if abs(self.norm() ** 2 - 1.0) > tol:
            raise NotNormalized(
                f"|a0|^2 + |a1|^2 = {self.norm() ** 2!r} is not 1 within {tol}"
            )
        return self


KET0 = QubitState(1, 0)
KET1 = QubitState(0, 1)


class Branch(enum.Enum):
    UP = "up"
    DOWN = "down"


class BasisMode(enum.Enum):
    PAPER_LITERAL = "paper"
    EXACT = "exact"
    COROTATING = "corotating"


@dataclass(frozen=True)
class EigenPair:
    state0: QubitState
    state1: QubitState
    E0: float
    E1: float
    mode: BasisMode

    def overlap(self) -> complex:
        """<state0|state1>; zero for a proper orthonormal pair."""
        return complex(np.vdot(self.state0.vector, self.state1.vector))


def hamiltonian(params: ControlParams, t: float) -> np.ndarray:
    c, s = math.cos(params.theta), math.sin(params.theta)
    phase = np.exp(1j * params.omega * t)
    return 0.5 * params.omega0 * np.array(
        [[c, s * phase.conjugate()], [s * phase, -c]], dtype=complex
    )


def hamiltonian_derivative(params: ControlParams, t: float) -> np.ndarray:
    """Analytic dH/dt."""
    phase = np.exp(1j * params.omega * t)
    scale = 0.5 * params.omega0 * params.omega * math.sin(params.theta)
    return scale * np.array(
        [[0, -1j * phase.conjugate()], [1j * phase, 0]], dtype=complex
    )


def _detuning_and_coupling(params: ControlParams) -> tuple[float, float]:
    # Components of the effective field in the co-rotating frame.
    return (
        params.omega0 - params.omega * math.cos(params.theta),
        params.omega * math.sin(params.theta),
    )


def rabi_frequency(params: ControlParams) -> float:
    """sqrt(omega0^2 + omega^2 - 2 omega0 omega cos(theta)).

    Evaluated as a hypot of the rotating-frame field components, which is
    algebraically identical and keeps |alpha0|^2 + |alpha1|^2 = 1 to rounding.
    """
    return math.hypot(*_detuning_and_coupling(params))


def adiabaticity_parameter(params: ControlParams) -> float:
    """Closed-form adiabaticity measure (omega / 2 omega0) sin(theta)."""
    return params.omega / (2.0 * params.omega0) * math.sin(params.theta)


def _gauge_fix(v: np.ndarray) -> np.ndarray:
    # Larger-magnitude component real and positive; ties go to component 0.
    k = 0 if abs(v[0]) >= abs(v[1]) - 1e-12 else 1
    return v * (abs(v[k]) / v[k])


def instantaneous_basis(
    params: ControlParams, t: float, mode: BasisMode = BasisMode.EXACT
) -> EigenPair:
    """Instantaneous eigenvectors of H(t); state0 carries E0 = +omega0/2."""
    half = 0.5 * params.omega0
    if mode is BasisMode.EXACT:
        energies, vecs = np.linalg.eigh(hamiltonian(params, t))
        # eigh sorts ascending, so the +omega0/2 level is the last column
        v0 = _gauge_fix(vecs[:, 1])
        v1 = _gauge_fix(vecs[:, 0])
        return EigenPair(
            QubitState.from_vector(v0),
            QubitState.from_vector(v1),
            float(energies[1]),
            float(energies[0]),
            mode,
        )

    ch, sh = math.cos(params.theta / 2), math.sin(params.theta / 2)
    em = np.exp(-0.5j * params.omega * t)
    ep = em.conjugate()
    if mode is BasisMode.COROTATING:
        s0 = QubitState(em * ch, ep * sh)
        s1 = QubitState(em * sh, -ep * ch)
    elif mode is BasisMode.PAPER_LITERAL:
        s0 = QubitState(em * sh, ep * ch)
        s1 = QubitState(ep * sh, -em * ch)
    else:
        raise ValueError(f"unknown basis mode {mode!r}")
    return EigenPair(s0, s1, half, -half, mode)


def basis_sweep(
    params: ControlParams, times: Sequence[float], mode: BasisMode = BasisMode.EXACT
) -> list[EigenPair]:
    """Eigenbases along a time grid, sign-aligned with the previous sample."""
    out: list[EigenPair] = []
    for t in times:
        pair = instantaneous_basis(params, float(t), mode)
        if out and mode is BasisMode.EXACT:
            prev = out[-1]
            v0, v1 = pair.state0.vector, pair.state1.vector
            if np.vdot(prev.state0.vector, v0).real < 0:
                v0 = -v0
            if np.vdot(prev.state1.vector, v1).real < 0:
                v1 = -v1
            pair = EigenPair(
                QubitState.from_vector(v0),
                QubitState.from_vector(v1),
                pair.E0,
                pair.E1,
                mode,
            )
        out.append(pair)
    return out


def eigen_residual(pair: EigenPair, params: ControlParams, t: float) -> float:
    """max_k ||H(t) state_k - E_k state_k||."""
    h = hamiltonian(params, t)
    r0 = h @ pair.state0.vector - pair.E0 * pair.state0.vector
    r1 = h @ pair.state1.vector - pair.E1 * pair.state1.vector
    return float(max(np.linalg.norm(r0), np.linalg.norm(r1)))


def adiabaticity_ratio_numeric(params: ControlParams, t: float) -> float:
    """|<0(t)|dH/dt|1(t)>| / (E0 - E1)^2 in the diagonalized basis."""
    pair = instantaneous_basis(params, t, BasisMode.EXACT)
    element = np.vdot(
        pair.state0.vector, hamiltonian_derivative(params, t) @ pair.state1.vector
    )
    return float(abs(element) / (pair.E0 - pair.E1) ** 2)


@dataclass(frozen=True)
class AdiabaticityReport:
    closed_form: float
    numeric_max: float
    is_adiabatic: bool
    threshold: float


def adiabaticity_report(
    params: ControlParams, times: Sequence[float], threshold: float = 0.1
) -> AdiabaticityReport:
    closed = adiabaticity_parameter(params)
    numeric = max((adiabaticity_ratio_numeric(params, float(t)) for t in times), default=0.0)
    return AdiabaticityReport(closed, numeric, closed < threshold, threshold)


def analytic_coefficients(
    params: ControlParams, t: float, branch: Branch = Branch.UP
) -> tuple[complex, complex]:
    """Closed-form expansion coefficients in the instantaneous eigenbasis.

    UP starts in |0(0)> and returns (alpha0, alpha1); DOWN starts in |1(0)>
    and returns (beta0, beta1).  At the degenerate point omega_bar = 0 the
    removable singularity is resolved by its limit.
    """
    detuning, coupling = _detuning_and_coupling(params)
    wbar = math.hypot(detuning, coupling)
    if wbar == 0.0:
        return (1 + 0j, 0j) if branch is Branch.UP else (0j, 1 + 0j)
    x = 0.5 * wbar * t
    c, s = math.cos(x), math.sin(x)
    flip = 1j * (coupling / wbar) * s
    if branch is Branch.UP:
        return complex(c, -(detuning / wbar) * s), flip
    return flip, complex(c, (detuning / wbar) * s)


@dataclass(frozen=True)
class BranchCoefficients:
    times: np.ndarray
    c0: np.ndarray
    c1: np.ndarray
    branch: Branch

    @property
    def populations(self) -> tuple[np.ndarray, np.ndarray]:
        return np.abs(self.c0) ** 2, np.abs(self.c1) ** 2


def branch_coefficients(
    params: ControlParams, times, branch: Branch = Branch.UP
) -> BranchCoefficients:
    """Vectorized :func:`analytic_coefficients` over a time grid."""
    times = np.asarray(times, dtype=float)
    detuning, coupling = _detuning_and_coupling(params)
    wbar = math.hypot(detuning, coupling)
    if wbar == 0.0:
        ones, zeros = np.ones_like(times, dtype=complex), np.zeros_like(times, dtype=complex)
        c0, c1 = (ones, zeros) if branch is Branch.UP else (zeros, ones)
        return BranchCoefficients(times, c0, c1, branch)
    x = 0.5 * wbar * times
    c, s = np.cos(x), np.sin(x)
    flip = 1j * (coupling / wbar) * s
    if branch is Branch.UP:
        return BranchCoefficients(times, c - 1j * (detuning / wbar) * s, flip, branch)
    return BranchCoefficients(times, flip, c + 1j * (detuning / wbar) * s, branch)


def spin_propagator(params: ControlParams, t: float) -> np.ndarray:
    """Closed-form propagator in the co-rotating eigenbasis.

    Columns are the UP and DOWN coefficient pairs, so ``U @ (c0, c1)`` maps
    coefficients at time 0 to coefficients at time t.
    """
    a0, a1 = analytic_coefficients(params, t, Branch.UP)
    b0, b1 = analytic_coefficients(params, t, Branch.DOWN)
    return np.array([[a0, b0], [a1, b1]], dtype=complex)


def project(state: QubitState, basis: EigenPair, tol: float = 1e-10) -> tuple[complex, complex]:
    """Expansion coefficients (<state0|psi>, <state1|psi>)."""
    overlap = abs(basis.overlap())
    if overlap > tol:
        raise NonOrthogonalBasis(
            f"|<state0|state1>| = {overlap:.3e} exceeds {tol:g} ({basis.mode.value} basis)"
        )
    psi = state.vector
    return (
        complex(np.vdot(basis.state0.vector, psi)),
        complex(np.vdot(basis.state1.vector, psi)),
    )


def fidelity(psi: QubitState, phi: QubitState) -> float:
    """|<psi|phi>|, insensitive to global phase."""
    return float(min(1.0, abs(np.vdot(psi.vector, phi.vector))))


def global_phase(psi: QubitState, phi: QubitState) -> float:
    """Phase angle of <psi|phi> (the offset taking psi to phi)."""
    return float(np.angle(np.vdot(psi.vector, phi.vector)))
