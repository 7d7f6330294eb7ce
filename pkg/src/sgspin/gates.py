"""Gate timing on the manifold cos(theta) = omega0 / omega, plus a general search.

On the manifold the up-branch coefficients reduce to
(cos(wbar t / 2), i sin(wbar t / 2)), so each named gate becomes a pair of
conditions on that angle, written in terms of the input amplitudes (a0, a1):

    NOT       cos = a1                  i sin = a0
    Z         cos = a0                  i sin = -a1
    HADAMARD  cos = (a0 + a1)/sqrt(2)   i sin = (a0 - a1)/sqrt(2)

The literal mode requires both conditions exactly.  The relaxed mode asks
only that (cos, i sin) match the targets up to a global phase.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .dynamics import (
    BasisMode,
    Branch,
    ControlParams,
    QubitState,
    analytic_coefficients,
    fidelity,
    global_phase,
    hamiltonian,
    instantaneous_basis,
    project,
    rabi_frequency,
    spin_propagator,
)
from .errors import DegenerateDrive, Infeasible, InvalidManifold, NotFound
from .ode import DEFAULT_TOL, ode_propagate

SOLVE_TOL = 1e-9
SQRT2 = math.sqrt(2.0)


class GateKind(enum.Enum):
    NOT = "not"
    Z = "z"
    HADAMARD = "hadamard"


class InfeasibilityReason(enum.Enum):
    COSINE_NOT_REAL = "cosine target is not a real number in [-1, 1]"
    SINE_NOT_IMAGINARY = "sine target is not i times a real number in [-1, 1]"
    INCONSISTENT = "cosine and sine targets are not on the unit circle"
    NO_PHASE_MATCH = "no angle reproduces the targets up to a global phase"


@dataclass(frozen=True)
class GateSpec:
    kind: GateKind
    input: QubitState

    def __post_init__(self):
        self.input.check_normalized()


@dataclass(frozen=True)
class SynthesisResult:
    params: ControlParams
    tau: float
    predicted_output: QubitState
    residual: float
    hold_hamiltonian: np.ndarray
    solved: bool = True


def manifold_theta(omega0: float, omega: float) -> float:
    """theta = arccos(omega0 / omega); on it omega sin(theta) = wbar."""
    if omega0 <= 0:
        raise InvalidManifold(f"omega0 must be > 0, got {omega0}")
    if omega0 > omega:
        raise InvalidManifold(f"cos(theta) = {omega0 / omega if omega else math.inf} exceeds 1")
    return math.acos(omega0 / omega)


def gate_targets(spec: GateSpec) -> tuple[complex, complex]:
    """(cosine target, target for i*sin) of the timing conditions."""
    a0, a1 = spec.input.a0, spec.input.a1
    if spec.kind is GateKind.NOT:
        return a1, a0
    if spec.kind is GateKind.Z:
        return a0, -a1
    return (a0 + a1) / SQRT2, (a0 - a1) / SQRT2


def ideal_output(spec: GateSpec) -> QubitState:
    """Textbook action of the gate on the input amplitudes."""
    a0, a1 = spec.input.a0, spec.input.a1
    if spec.kind is GateKind.NOT:
        return QubitState(a1, a0)
    if spec.kind is GateKind.Z:
        return QubitState(a0, -a1)
    return QubitState((a0 + a1) / SQRT2, (a0 - a1) / SQRT2)


def _smallest_tau(angle: float, wbar: float) -> float:
    # angle is wbar * tau / 2, reduced to [0, 2 pi)
    angle = math.fmod(angle, 2 * math.pi)
    if angle < 0:
        angle += 2 * math.pi
    if 2 * math.pi - angle < 1e-13:
        angle = 0.0
    return 2.0 * angle / wbar


def _literal_angle(cos_t: complex, isin_t: complex, tol: float) -> float:
    if abs(cos_t.imag) > tol or abs(cos_t.real) > 1 + tol:
        raise Infeasible(InfeasibilityReason.COSINE_NOT_REAL, f"cos target = {cos_t}")
    s = isin_t / 1j
    if abs(s.imag) > tol or abs(s.real) > 1 + tol:
        raise Infeasible(InfeasibilityReason.SINE_NOT_IMAGINARY, f"i*sin target = {isin_t}")
    c, s = cos_t.real, s.real
    if abs(c * c + s * s - 1.0) > tol:
        raise Infeasible(
            InfeasibilityReason.INCONSISTENT, f"cos^2 + sin^2 = {c * c + s * s!r}"
        )
    return math.atan2(s, c)


def _relaxed_angle(cos_t: complex, isin_t: complex) -> float:
    # maximize |conj(C) cos x + conj(S) i sin x|^2 in closed form
    A, B = cos_t.conjugate(), 1j * isin_t.conjugate()
    return 0.5 * math.atan2(2 * (A * B.conjugate()).real, abs(A) ** 2 - abs(B) ** 2)


def solve_gate_time(
    spec: GateSpec, omega0: float, omega: float, mode: str = "literal"
) -> SynthesisResult:
    """Smallest tau >= 0 meeting the gate's timing conditions on the manifold.

    Raises :class:`Infeasible` with a diagnosis when no real tau exists.
    """
    theta = manifold_theta(omega0, omega)
    params = ControlParams(omega0, omega, theta)
    wbar = rabi_frequency(params)
    if wbar == 0.0:
        raise DegenerateDrive("wbar = 0: the drive never moves the state")
    cos_t, isin_t = gate_targets(spec)

    if mode == "literal":
        angle = _literal_angle(cos_t, isin_t, SOLVE_TOL)
    elif mode == "relaxed":
        angle = _relaxed_angle(cos_t, isin_t)
    else:
        raise ValueError(f"mode must be 'literal' or 'relaxed', got {mode!r}")
    tau = _smallest_tau(angle, wbar)

    predicted = QubitState(*analytic_coefficients(params, tau, Branch.UP))
    if mode == "literal":
        residual = max(abs(predicted.a0 - cos_t), abs(predicted.a1 - isin_t))
        if residual > SOLVE_TOL:
            raise Infeasible(InfeasibilityReason.INCONSISTENT, f"residual {residual:.3e}")
    else:
        residual = 1.0 - fidelity(predicted, QubitState(cos_t, isin_t)) ** 2
        if residual > SOLVE_TOL:
            raise Infeasible(InfeasibilityReason.NO_PHASE_MATCH, f"best infidelity {residual:.3e}")
        # the best angle is defined modulo pi; take the earliest one
        tau = min(tau, _smallest_tau(angle + math.pi, wbar))
        predicted = QubitState(*analytic_coefficients(params, tau, Branch.UP))
        residual = max(0.0, 1.0 - fidelity(predicted, QubitState(cos_t, isin_t)) ** 2)
    return SynthesisResult(params, tau, predicted, residual, hamiltonian(params, tau))


@dataclass(frozen=True)
class ParameterBox:
    """Closed search intervals for (omega0, omega, theta, t)."""

    omega0: tuple[float, float]
    omega: tuple[float, float]
    theta: tuple[float, float]
    t: tuple[float, float]

    def __post_init__(self):
        for name in ("omega0", "omega", "theta", "t"):
            lo, hi = getattr(self, name)
            if lo > hi:
                raise ValueError(f"empty interval for {name}: ({lo}, {hi})")
        if self.omega0[0] <= 0 or self.omega[0] < 0 or self.t[0] < 0:
            raise ValueError("omega0 must be > 0 and omega, t >= 0")
        if self.theta[0] < 0 or self.theta[1] > math.pi:
            raise ValueError("theta interval must lie in [0, pi]")

    @property
    def bounds(self) -> list[tuple[float, float]]:
        return [self.omega0, self.omega, self.theta, self.t]


def _infidelity(x, psi_in, target) -> float:
    params = ControlParams(x[0], x[1], min(max(x[2], 0.0), math.pi))
    out = spin_propagator(params, x[3]) @ psi_in
    return max(0.0, 1.0 - abs(np.vdot(target, out)) ** 2)


def golden_section(f, a: float, b: float, tol: float = 1e-12, max_iter: int = 200) -> float:
    """Minimizer of a unimodal f on [a, b]."""
    inv_phi = (math.sqrt(5) - 1) / 2
    c, d = b - inv_phi * (b - a), a + inv_phi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if b - a <= tol:
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def synthesize_general(
    input: QubitState,
    target: QubitState,
    bounds: ParameterBox,
    tol: float = 1e-6,
    grid: int = 7,
    t_grid: int = 41,
    n_seeds: int = 6,
) -> SynthesisResult:
    """Search (omega0, omega, theta, t) for the closed-form map input -> target.

    States are coefficients in the co-rotating eigenbasis.  The search is
    deterministic: a grid over the box, then golden-section refinement in t
    and bounded quasi-Newton polishing from the best few grid points.
    Raises :class:`NotFound` carrying the best point if infidelity > tol.
    """
    input.check_normalized()
    target.check_normalized()
    psi_in, tgt = input.vector, target.vector

    axes = [
        np.linspace(lo, hi, grid if hi > lo else 1) for lo, hi in bounds.bounds[:3]
    ]
    lo_t, hi_t = bounds.t
    t_axis = np.linspace(lo_t, hi_t, t_grid if hi_t > lo_t else 1)
    dt = (hi_t - lo_t) / (t_grid - 1) if hi_t > lo_t else 0.0

    seeds = []
    for w0, w, th in itertools.product(*axes):
        for t in t_axis:
            x = (float(w0), float(w), float(th), float(t))
            seeds.append((_infidelity(x, psi_in, tgt), x))
    seeds.sort()

    best_val, best_x = seeds[0]
    for val, x in seeds[:n_seeds]:
        if best_val <= 1e-15:
            break
        w0, w, th, t = x
        if dt > 0:
            t = golden_section(
                lambda s: _infidelity((w0, w, th, s), psi_in, tgt),
                max(lo_t, t - dt),
                min(hi_t, t + dt),
            )
        res = minimize(
            _infidelity,
            np.array([w0, w, th, t]),
            args=(psi_in, tgt),
            method="L-BFGS-B",
            bounds=bounds.bounds,
            options={"ftol": 1e-15, "gtol": 1e-12},
        )
        candidates = [(_infidelity((w0, w, th, t), psi_in, tgt), (w0, w, th, t))]
        candidates.append((float(res.fun), tuple(float(v) for v in res.x)))
        for cand in candidates:
            if cand[0] < best_val or (cand[0] == best_val and cand[1] < best_x):
                best_val, best_x = cand

    params = ControlParams(best_x[0], best_x[1], best_x[2])
    tau = best_x[3]
    predicted = QubitState.from_vector(spin_propagator(params, tau) @ psi_in)
    result = SynthesisResult(
        params, tau, predicted, best_val, hamiltonian(params, tau), solved=best_val <= tol
    )
    if not result.solved:
        raise NotFound(result)
    return result


@dataclass(frozen=True)
class GateVerification:
    analytic_fidelity: float
    ode_fidelity: float
    phase_offset: float
    population_error: float


def verify_gate(
    result: SynthesisResult, expected: QubitState, tol: float = DEFAULT_TOL
) -> GateVerification:
    """Check a timing solution against the closed form and the ODE oracle.

    ``expected`` is the intended output as eigenbasis coefficients at tau
    (e.g. :func:`ideal_output` of the gate).  The integrator starts in
    |0(0)>; its state at tau is expanded in the co-rotating basis for the
    fidelity and in the diagonalized basis for the population check.
    """
    params, tau = result.params, result.tau
    analytic = QubitState(*analytic_coefficients(params, tau, Branch.UP))
    start = instantaneous_basis(params, 0.0, BasisMode.COROTATING).state0
    psi = ode_propagate(params, start, tau, tol=tol)
    ode_coeffs = QubitState(*project(psi, instantaneous_basis(params, tau, BasisMode.COROTATING)))
    exact = project(psi, instantaneous_basis(params, tau, BasisMode.EXACT))
    return GateVerification(
        analytic_fidelity=fidelity(analytic, expected),
        ode_fidelity=fidelity(ode_coeffs, expected),
        phase_offset=global_phase(analytic, ode_coeffs),
        population_error=abs(abs(exact[1]) ** 2 - abs(analytic.a1) ** 2),
    )
