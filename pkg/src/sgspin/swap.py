"""Two-qubit swap outputs and their extension by local non-adiabatic control.

Basis order is |q2 q3> in {|00>, |01>, |10>, |11>}, particle 2 first.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import SIGMA_X, ControlParams, spin_propagator
from .errors import NotNormalized


@dataclass(frozen=True)
class TwoQubitState:
    amps: tuple[complex, complex, complex, complex]

    def __post_init__(self):
        amps = tuple(complex(a) for a in self.amps)
        if len(amps) != 4:
            raise ValueError(f"need 4 amplitudes, got {len(amps)}")
        object.__setattr__(self, "amps", amps)

    @classmethod
    def from_vector(cls, v) -> "TwoQubitState":
        return cls(tuple(np.asarray(v, dtype=complex).reshape(4)))

    @property
    def vector(self) -> np.ndarray:
        return np.array(self.amps, dtype=complex)

    def norm(self) -> float:
        return float(np.linalg.norm(self.vector))


def build_swap_outputs(a: complex, b: complex) -> tuple[TwoQubitState, TwoQubitState]:
    """a|00> + b|11> and a|00> - b|11>."""
    if abs(abs(a) ** 2 + abs(b) ** 2 - 1.0) > 1e-12:
        raise NotNormalized(f"|a|^2 + |b|^2 = {abs(a) ** 2 + abs(b) ** 2!r}")
    return TwoQubitState((a, 0, 0, b)), TwoQubitState((a, 0, 0, -b))


def local_propagators(params: ControlParams, t: float) -> tuple[np.ndarray, np.ndarray]:
    """Single-qubit maps for the up- and down-initialized branches.

    The up map is the closed-form propagator itself; the down map is the same
    drive seen from the branch that starts in |1>, i.e. X U X.  Both are the
    identity at t = 0.
    """
    u = spin_propagator(params, t)
    return u, SIGMA_X @ u @ SIGMA_X


def apply_local(state: TwoQubitState, u: np.ndarray, particle: int = 2) -> TwoQubitState:
    if particle == 2:
        op = np.kron(u, np.eye(2))
    elif particle == 3:
        op = np.kron(np.eye(2), u)
    else:
        raise ValueError(f"particle must be 2 or 3, got {particle}")
    return TwoQubitState.from_vector(op @ state.vector)


def extend_swap_family(
    params: ControlParams, t: float, a: complex, b: complex, particle: int = 2
) -> list[TwoQubitState]:
    """Four states: each swap output under the up and the down local map.

    Order: (base1, up), (base1, down), (base2, up), (base2, down).
    """
    up, down = local_propagators(params, t)
    return [
        apply_local(base, u, particle)
        for base in build_swap_outputs(a, b)
        for u in (up, down)
    ]


def concurrence(s: TwoQubitState) -> float:
    """Pure-state concurrence 2|a00 a11 - a01 a10|."""
    a00, a01, a10, a11 = s.amps
    return float(2.0 * abs(a00 * a11 - a01 * a10))
