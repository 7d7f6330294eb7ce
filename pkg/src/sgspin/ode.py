"""Numerical integration of i dpsi/dt = H(t) psi.

This is the independent check on the closed-form coefficients: it knows only
the Hamiltonian matrix, nothing about Rabi frequencies or eigenbases.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import DOP853

from .dynamics import ControlParams, QubitState
from .errors import StepUnderflow

DEFAULT_TOL = 1e-9
DEFAULT_MIN_STEP = 1e-12


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # shape (len(times), 2), complex
    n_steps: int

    @property
    def final(self) -> QubitState:
        return QubitState.from_vector(self.states[-1])

    def state(self, i: int) -> QubitState:
        return QubitState.from_vector(self.states[i])

    def norm_error(self) -> float:
        """Largest deviation of ||psi|| from 1 over the samples."""
        return float(np.max(np.abs(np.linalg.norm(self.states, axis=1) - 1.0)))


def _rhs(params: ControlParams):
    half = 0.5 * params.omega0
    hc = half * math.cos(params.theta)
    hs = half * math.sin(params.theta)
    w = params.omega

    def f(t, y):
        off = hs * np.exp(1j * w * t)
        return np.array(
            [-1j * (hc * y[0] + off.conjugate() * y[1]), -1j * (off * y[0] - hc * y[1])]
        )

    return f


def ode_trajectory(
    params: ControlParams,
    psi0: QubitState,
    times,
    tol: float = DEFAULT_TOL,
    min_step: float = DEFAULT_MIN_STEP,
) -> Trajectory:
    """Integrate from ``times[0]`` and sample at every entry of ``times``.

    Adaptive 8th-order Dormand-Prince with local tolerance ``tol / 10``; samples
    between steps come from the method's dense output.  The state is never
    renormalized.
    """
    if not 0 < tol <= 1e-4:
        raise ValueError(f"tol must lie in (0, 1e-4], got {tol}")
    psi0.check_normalized(1e-10)
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size == 0:
        raise ValueError("times must be a non-empty 1-d sequence")
    if np.any(np.diff(times) < 0) or times[0] < 0:
        raise ValueError("times must be non-negative and non-decreasing")

    out = np.empty((times.size, 2), dtype=complex)
    y0 = psi0.vector
    t0, t_end = float(times[0]), float(times[-1])
    out[times == t0] = y0
    if t_end == t0:
        return Trajectory(times, out, 0)

    # local tolerance a decade tighter keeps the global norm drift under 10 * tol
    solver = DOP853(_rhs(params), t0, y0, t_end, rtol=0.1 * tol, atol=0.1 * tol)
    k = int(np.searchsorted(times, t0, side="right"))
    n_steps = 0
    while solver.status == "running":
        message = solver.step()
        n_steps += 1
        if solver.status == "failed":
            raise StepUnderflow(f"integrator failed at t={solver.t}: {message}", t=solver.t)
        if solver.status == "running" and solver.step_size < min_step:
            raise StepUnderflow(
                f"step {solver.step_size:.3e} below minimum {min_step:.3e} at t={solver.t}",
                t=solver.t,
                step=solver.step_size,
            )
        j = int(np.searchsorted(times, solver.t, side="right"))
        if j > k:
            dense = solver.dense_output()
            for i in range(k, j):
                out[i] = solver.y if times[i] == solver.t else dense(times[i])
            k = j
    return Trajectory(times, out, n_steps)


def ode_propagate(
    params: ControlParams,
    psi0: QubitState,
    t_end: float,
    tol: float = DEFAULT_TOL,
    min_step: float = DEFAULT_MIN_STEP,
) -> QubitState:
    """psi(t_end) starting from psi0 at t = 0."""
    if t_end < 0:
        raise ValueError(f"t_end must be >= 0, got {t_end}")
    return ode_trajectory(params, psi0, [0.0, t_end], tol, min_step).final
