import math
import time
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sgspin import (
    KET0,
    KET1,
    BasisMode,
    Branch,
    ControlParams,
    QubitState,
    adiabatic_split,
    branch_probability,
    cascade,
    cluster_counts,
    converter_oracle,
    fidelity,
    instantaneous_basis,
    nonadiabatic_multiply,
    ode_propagate,
    project,
    reverse_converter,
)
from sgspin.ensemble import AdiabaticDriveWarning, ConversionRecord, cascade_weight_sum
from sgspin.errors import EmptyBranch, InconsistentRecord

from conftest import control_params, qubit_states, random_params, random_state

R2 = 1 / math.sqrt(2)


# --- adiabatic split / probabilities -------------------------------------------

def test_split_pure_up():
    s = adiabatic_split(QubitState(1, 0))
    assert (s.up_amp, s.down_amp) == (1, 0)
    assert s.up_spin == KET0 and s.down_spin == KET1


def test_split_symmetric():
    s = adiabatic_split(QubitState(R2, R2))
    assert s.up_amp == pytest.approx(R2) and s.down_amp == pytest.approx(R2)


def test_split_born_rule():
    s = adiabatic_split(QubitState(0.6, 0.8))
    assert branch_probability(s, Branch.UP) == pytest.approx(0.36, abs=1e-15)
    assert branch_probability(s, Branch.DOWN) == pytest.approx(0.64, abs=1e-15)


def test_split_phases_are_metadata_only():
    q = QubitState(0.6, 0.8j)
    s = adiabatic_split(q, omega0=2.0, t=0.3)
    assert s.amplitude(Branch.UP) == pytest.approx(0.6 * np.exp(-0.6j))
    assert s.amplitude(Branch.DOWN) == pytest.approx(0.8j * np.exp(0.6j))
    assert branch_probability(s, Branch.UP) == pytest.approx(0.36)


@pytest.mark.parametrize("a0, w, expected", [(R2, 1.0, 0.5), (0.6, 1.0, 0.36), (0.6, 0.9, 0.324)])
def test_branch_probability_with_weights(a0, w, expected):
    s = adiabatic_split(QubitState(a0, math.sqrt(1 - a0**2)), w_up=w)
    assert branch_probability(s, Branch.UP) == pytest.approx(expected, abs=1e-15)


@given(qubit_states(), st.floats(0, 1), st.floats(0, 1))
def test_path_spin_probability_bound(q, w_up, w_down):
    s = adiabatic_split(q, w_up, w_down)
    total = branch_probability(s, Branch.UP) + branch_probability(s, Branch.DOWN)
    assert total <= 1 + 1e-12


def test_path_spin_rejects_bad_weight():
    with pytest.raises(ValueError):
        adiabatic_split(QubitState(1, 0), w_up=1.2)


# --- cluster counts --------------------------------------------------------------

def test_cluster_counts_examples():
    r = cluster_counts(adiabatic_split(QubitState(0.6, 0.8)), 1000)
    assert (r.n_up, r.n_down) == (360, 640)
    r0 = cluster_counts(adiabatic_split(QubitState(0.6, 0.8)), 0)
    assert (r0.n_up, r0.n_down) == (0, 0)
    r = cluster_counts(adiabatic_split(QubitState(R2, R2)), 1000)
    assert (r.n_up, r.n_down) == (500, 500)
    assert r.logical_up == KET0 and r.logical_down == KET1


def test_cluster_counts_round_half_even():
    # N * P = 2.5 rounds to 2
    s = adiabatic_split(QubitState(math.sqrt(0.25), math.sqrt(0.75)))
    assert cluster_counts(s, 10).n_up == 2


@pytest.mark.parametrize("N", [0, 1, 10, 10**6])
def test_cluster_counts_sum_to_N_in_ideal_device(N, rng):
    for _ in range(200):
        r = cluster_counts(adiabatic_split(random_state(rng)), N)
        assert r.n_up + r.n_down == N


def test_cluster_counts_lossy_device():
    s = adiabatic_split(QubitState(0.6, 0.8), w_up=0.9, w_down=0.5)
    r = cluster_counts(s, 1000)
    assert (r.n_up, r.n_down) == (324, 320)


def test_cluster_counts_sampling_is_seeded():
    s = adiabatic_split(QubitState(0.6, 0.8))
    a = cluster_counts(s, 10_000, np.random.default_rng(7))
    b = cluster_counts(s, 10_000, np.random.default_rng(7))
    assert (a.n_up, a.n_down) == (b.n_up, b.n_down)
    assert a.n_up + a.n_down == 10_000
    # 5 sigma of a binomial with p = 0.36
    assert abs(a.n_up - 3600) < 5 * math.sqrt(10_000 * 0.36 * 0.64)


def test_cluster_counts_rejects_negative():
    with pytest.raises(ValueError):
        cluster_counts(adiabatic_split(QubitState(1, 0)), -1)


# --- converter ---------------------------------------------------------------------

def test_converter_keeps_up():
    out, rec = converter_oracle(adiabatic_split(QubitState(0.6, 0.8)), Branch.UP)
    assert out == KET0
    assert rec.discarded_amp == pytest.approx(0.8)
    assert rec.discarded_state == KET1
    assert rec.selected_branch is Branch.UP


def test_converter_pure_input():
    out, rec = converter_oracle(adiabatic_split(QubitState(1, 0)), Branch.UP)
    assert out == KET0 and rec.kept_amp == 1


def test_converter_empty_branch():
    with pytest.raises(EmptyBranch):
        converter_oracle(adiabatic_split(QubitState(1, 0)), Branch.DOWN)


@pytest.mark.parametrize(
    "q", [QubitState(0.6, 0.8), QubitState(1, 0), QubitState(R2, 1j * R2)]
)
@pytest.mark.parametrize("keep", [Branch.UP, Branch.DOWN])
def test_converter_round_trip_examples(q, keep):
    s = adiabatic_split(q, omega0=1.3, t=0.4)
    if branch_probability(s, keep) == 0:
        return
    out, rec = converter_oracle(s, keep)
    back = reverse_converter(rec, out)
    assert back.a0 == pytest.approx(q.a0, abs=1e-12)
    assert back.a1 == pytest.approx(q.a1, abs=1e-12)


@given(qubit_states())
def test_converter_round_trip_property(q):
    keep = Branch.UP if abs(q.a0) >= abs(q.a1) else Branch.DOWN
    out, rec = converter_oracle(adiabatic_split(q), keep)
    back = reverse_converter(rec, out)
    np.testing.assert_allclose(back.vector, q.vector, atol=1e-12)


def test_reverse_converter_rejects_bad_record():
    _, rec = converter_oracle(adiabatic_split(QubitState(0.6, 0.8)))
    bad = ConversionRecord(rec.input, rec.selected_branch, 0.6, 0.9, rec.discarded_state)
    with pytest.raises(InconsistentRecord):
        reverse_converter(bad, KET0)


# --- multiplier -----------------------------------------------------------------------

def test_multiply_at_t0_returns_eigenstates():
    params = ControlParams(1, 2, 1.0)
    out = nonadiabatic_multiply(params, QubitState(0.6, 0.8), 0.0)
    pair = instantaneous_basis(params, 0.0)
    assert fidelity(out.up, pair.state0) == pytest.approx(1, abs=1e-12)
    assert fidelity(out.down, pair.state1) == pytest.approx(1, abs=1e-12)
    assert out.probs == pytest.approx((0.36, 0.64))


def test_multiply_full_flip_on_manifold():
    params = ControlParams(1, 2, math.pi / 3)
    t = math.pi / math.sqrt(3)
    out = nonadiabatic_multiply(params, QubitState(R2, R2), t)
    e1 = instantaneous_basis(params, t, BasisMode.COROTATING).state1
    np.testing.assert_allclose(out.up.vector, 1j * e1.vector, atol=1e-12)
    # diagonalized basis agrees at population level
    c0, c1 = project(out.up, instantaneous_basis(params, t))
    assert abs(c1) ** 2 == pytest.approx(1, abs=1e-12)
    psi = ode_propagate(params, instantaneous_basis(params, 0.0, BasisMode.COROTATING).state0, t)
    assert fidelity(psi, out.up) >= 1 - 1e-8


def test_multiply_matches_integrator(rng):
    for _ in range(15):
        params, q, t = random_params(rng), random_state(rng), rng.uniform(0, 8)
        out = nonadiabatic_multiply(params, q, t, warn_threshold=0)
        pair0 = instantaneous_basis(params, 0.0, BasisMode.COROTATING)
        up = ode_propagate(params, pair0.state0, t)
        down = ode_propagate(params, pair0.state1, t)
        assert fidelity(up, out.up) >= 1 - 1e-6
        assert fidelity(down, out.down) >= 1 - 1e-6
        exact = instantaneous_basis(params, t)
        for a, b in ((up, out.up), (down, out.down)):
            pa = [abs(c) ** 2 for c in project(a, exact)]
            pb = [abs(c) ** 2 for c in project(b, exact)]
            np.testing.assert_allclose(pa, pb, atol=1e-6)


@given(control_params(), qubit_states(), st.floats(0, 50))
def test_multiply_outputs_normalized(params, q, t):
    out = nonadiabatic_multiply(params, q, t, warn_threshold=0)
    assert abs(out.up.norm() - 1) <= 1e-12
    assert abs(out.down.norm() - 1) <= 1e-12
    assert sum(out.probs) == pytest.approx(1, abs=1e-12)


def test_multiply_warns_when_adiabatic():
    with pytest.warns(AdiabaticDriveWarning):
        nonadiabatic_multiply(ControlParams(1, 0.01, 1.0), QubitState(1, 0), 1.0)


# --- cascade ----------------------------------------------------------------------------

@pytest.mark.parametrize("n", [0, 1, 2, 3, 6])
def test_cascade_sizes_and_weights(n):
    stages = [(ControlParams(1, 2, math.pi / 3), 0.9)] * n
    clusters = cascade(stages, QubitState(0.6, 0.8j))
    assert len(clusters) == 2**n
    assert cascade_weight_sum(clusters) == pytest.approx(1, abs=1e-12)
    for state, _ in clusters:
        assert abs(state.norm() - 1) <= 1e-12


def test_cascade_depth_zero_is_input():
    q = QubitState(0.6, 0.8)
    assert cascade([], q) == [(q, 1.0)]


def test_cascade_first_stage_matches_multiply():
    params, q = ControlParams(1, 3, 1.2), QubitState(0.6, 0.8)
    (up, wu), (down, wd) = cascade([(params, 1.5)], q)
    out = nonadiabatic_multiply(params, q, 1.5)
    assert (up, down) == (out.up, out.down)
    assert (wu, wd) == out.probs


def test_cascade_mixed_stages_conserve_weight(rng):
    stages = [(random_params(rng), rng.uniform(0, 5)) for _ in range(5)]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", AdiabaticDriveWarning)
        clusters = cascade(stages, random_state(rng))
    assert len(clusters) == 32
    assert cascade_weight_sum(clusters) == pytest.approx(1, abs=1e-12)


def test_cascade_six_stages_fast():
    stages = [(ControlParams(1, 2, math.pi / 3), 0.9)] * 6
    start = time.perf_counter()
    cascade(stages, QubitState(R2, R2))
    assert time.perf_counter() - start < 1.0

