"""Stern-Gerlach branch bookkeeping: path-spin splits, converter, multiplier.

Spatial wave packets are reduced to scalar branch weights w = int |phi|^2 dX.
The ideal device has w_up = w_down = 1 and perfectly separated branches.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .dynamics import (
    KET0,
    KET1,
    BasisMode,
    Branch,
    ControlParams,
    QubitState,
    adiabaticity_parameter,
    analytic_coefficients,
    instantaneous_basis,
)
from .errors import EmptyBranch, InconsistentRecord

EMPTY_BRANCH_TOL = 1e-15
NONADIABATIC_WARN_THRESHOLD = 0.1


class AdiabaticDriveWarning(UserWarning):
    """The drive is slow enough that the multiplier barely mixes levels."""


@dataclass(frozen=True)
class PathSpinState:
    """Spin states riding the up and down spatial branches.

    ``up_amp``/``down_amp`` are the bare input amplitudes; the dynamical
    phases exp(-/+ i omega0 t) accumulated in the field are kept separately
    in ``up_phase``/``down_phase`` so they can be undone on reversal.
    """

    up_spin: QubitState
    down_spin: QubitState
    up_amp: complex
    down_amp: complex
    w_up: float = 1.0
    w_down: float = 1.0
    up_phase: complex = 1 + 0j
    down_phase: complex = 1 + 0j

    def __post_init__(self):
        for w in (self.w_up, self.w_down):
            if not 0.0 <= w <= 1.0:
                raise ValueError(f"branch weight {w} outside [0, 1]")
        total = abs(self.up_amp) ** 2 * self.w_up + abs(self.down_amp) ** 2 * self.w_down
        if total > 1.0 + 1e-12:
            raise ValueError(f"branch probabilities sum to {total} > 1")

    def amplitude(self, branch: Branch) -> complex:
        """Branch amplitude including its dynamical phase."""
        if branch is Branch.UP:
            return self.up_amp * self.up_phase
        return self.down_amp * self.down_phase

    def spin(self, branch: Branch) -> QubitState:
        return self.up_spin if branch is Branch.UP else self.down_spin


def adiabatic_split(
    q: QubitState,
    w_up: float = 1.0,
    w_down: float = 1.0,
    omega0: float = 0.0,
    t: float = 0.0,
) -> PathSpinState:
    """Path-spin entangled state after an ideal (adiabatic) magnet.

    |0> goes up with amplitude a0 and phase exp(-i omega0 t); |1> goes down
    with a1 and exp(+i omega0 t).
    """
    q.check_normalized()
    return PathSpinState(
        up_spin=KET0,
        down_spin=KET1,
        up_amp=q.a0,
        down_amp=q.a1,
        w_up=w_up,
        w_down=w_down,
        up_phase=complex(np.exp(-1j * omega0 * t)),
        down_phase=complex(np.exp(1j * omega0 * t)),
    )


def branch_probability(s: PathSpinState, branch: Branch) -> float:
    if branch is Branch.UP:
        return abs(s.up_amp) ** 2 * s.w_up
    return abs(s.down_amp) ** 2 * s.w_down


@dataclass(frozen=True)
class ClusterReport:
    n_up: int
    n_down: int
    logical_up: QubitState
    logical_down: QubitState


def cluster_counts(
    s: PathSpinState, N: int, rng: np.random.Generator | None = None
) -> ClusterReport:
    """Particles accumulated in each branch out of an ensemble of N.

    Without ``rng`` the counts are N * P rounded half-to-even; when the two
    probabilities exhaust the ensemble the down count is N - n_up so nothing
    is lost to rounding.  With ``rng`` counts are a multinomial draw.
    """
    if N < 0:
        raise ValueError(f"N must be >= 0, got {N}")
    p_up = branch_probability(s, Branch.UP)
    p_down = branch_probability(s, Branch.DOWN)
    if rng is not None:
        probs = np.array([p_up, p_down, max(0.0, 1.0 - p_up - p_down)])
        n_up, n_down, _ = rng.multinomial(N, probs / probs.sum())
        return ClusterReport(int(n_up), int(n_down), s.up_spin, s.down_spin)
    n_up = round(N * p_up)
    if abs(p_up + p_down - 1.0) <= 1e-12:
        n_down = N - n_up
    else:
        n_down = min(round(N * p_down), N - n_up)
    return ClusterReport(n_up, n_down, s.up_spin, s.down_spin)


@dataclass(frozen=True)
class ConversionRecord:
    """Everything the converter threw away, enough to undo it."""

    input: PathSpinState
    selected_branch: Branch
    kept_amp: complex
    discarded_amp: complex
    discarded_state: QubitState


def converter_oracle(
    s: PathSpinState, keep: Branch = Branch.UP
) -> tuple[QubitState, ConversionRecord]:
    """Post-select one branch; return its spin state and the undo record."""
    if branch_probability(s, keep) < EMPTY_BRANCH_TOL:
        raise EmptyBranch(f"{keep.value} branch carries no probability")
    drop = Branch.DOWN if keep is Branch.UP else Branch.UP
    kept = s.spin(keep).normalized()
    record = ConversionRecord(
        input=s,
        selected_branch=keep,
        kept_amp=s.up_amp if keep is Branch.UP else s.down_amp,
        discarded_amp=s.up_amp if drop is Branch.UP else s.down_amp,
        discarded_state=s.spin(drop),
    )
    return kept, record


def reverse_converter(rec: ConversionRecord, kept_output: QubitState) -> QubitState:
    """Recombine the kept output with the stored complement.

    For an adiabatic split this returns the original input qubit.
    """
    weight = abs(rec.kept_amp) ** 2 + abs(rec.discarded_amp) ** 2
    if abs(weight - 1.0) > 1e-12:
        raise InconsistentRecord(f"stored amplitudes carry total weight {weight!r}")
    psi = rec.kept_amp * kept_output.vector + rec.discarded_amp * rec.discarded_state.vector
    restored = QubitState.from_vector(psi)
    if abs(restored.norm() - 1.0) > 1e-12:
        raise InconsistentRecord("recombined state is not normalized")
    return restored


@dataclass(frozen=True)
class MultiplierOutput:
    up: QubitState
    down: QubitState
    probs: tuple[float, float]


def nonadiabatic_multiply(
    params: ControlParams,
    q: QubitState,
    t: float,
    warn_threshold: float = NONADIABATIC_WARN_THRESHOLD,
) -> MultiplierOutput:
    """One non-adiabatic stage: two logical qubits from one.

    The up cluster (weight |a0|^2) starts in |0(0)> and the down cluster
    (weight |a1|^2) in |1(0)>; both are evolved to t with the closed-form
    coefficients and returned as spin vectors in the z basis.
    """
    q.check_normalized()
    if adiabaticity_parameter(params) < warn_threshold:
        warnings.warn(
            f"adiabaticity parameter {adiabaticity_parameter(params):.3g} < {warn_threshold}; "
            "the stage will barely transfer population",
            AdiabaticDriveWarning,
            stacklevel=2,
        )
    basis = instantaneous_basis(params, t, BasisMode.COROTATING)
    e0, e1 = basis.state0.vector, basis.state1.vector
    a0, a1 = analytic_coefficients(params, t, Branch.UP)
    b0, b1 = analytic_coefficients(params, t, Branch.DOWN)
    return MultiplierOutput(
        up=QubitState.from_vector(a0 * e0 + a1 * e1),
        down=QubitState.from_vector(b0 * e0 + b1 * e1),
        probs=(abs(q.a0) ** 2, abs(q.a1) ** 2),
    )


def cascade(
    stages: Sequence[tuple[ControlParams, float]], q: QubitState
) -> list[tuple[QubitState, float]]:
    """Apply the multiplier stage after stage; n stages give 2**n clusters.

    Clusters are ordered up-before-down at every stage, so the binary digits
    of a cluster's index read off its path (0 = up).
    """
    q.check_normalized()
    clusters = [(q, 1.0)]
    slow = [p for p, _ in stages if adiabaticity_parameter(p) < NONADIABATIC_WARN_THRESHOLD]
    if slow:
        warnings.warn(
            f"{len(slow)} of {len(stages)} stages are near-adiabatic",
            AdiabaticDriveWarning,
            stacklevel=2,
        )
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", AdiabaticDriveWarning)
        for params, t in stages:
            nxt = []
            for state, weight in clusters:
                out = nonadiabatic_multiply(params, state, t)
                nxt.append((out.up, weight * out.probs[0]))
                nxt.append((out.down, weight * out.probs[1]))
            clusters = nxt
    return clusters


def cascade_weight_sum(clusters: Sequence[tuple[QubitState, float]]) -> float:
    return math.fsum(w for _, w in clusters)
