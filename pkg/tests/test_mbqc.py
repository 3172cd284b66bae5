"""
Tests for the MBQC gate engine: catalog, schedules, runs and branches
"""

import json
import math

import numpy as np
import pytest

from libs.dephasing_exceptions import ConfigurationError, DomainError
from services.dephasing_core.dephasing_channel import (
    CompositionConvention,
    MeasuredQubitHandling,
)
from services.dephasing_core.mbqc import (
    PAULI_X,
    PAULI_Z,
    GateName,
    MeasurementMode,
    MeasurementSchedule,
    enumerate_branches,
    euler_gate,
    gate_catalog,
    gate_fidelity_curve,
    ideal_output,
    measurement_basis,
    parse_gate_name,
    rotation,
    run_gate,
)
from services.dephasing_core.states import InputQubit, named_state

CATALOG = (GateName.NOT, GateName.HADAMARD, GateName.PHASE)


def random_input(rng) -> InputQubit:
    z = rng.normal(size=2) + 1j * rng.normal(size=2)
    return InputQubit.normalized(z[0], z[1])


def test_measurement_basis_examples():
    up, down = measurement_basis(0.0)
    np.testing.assert_allclose(up, named_state("plus"), atol=1e-15)
    np.testing.assert_allclose(down, named_state("minus"), atol=1e-15)
    up, _ = measurement_basis(math.pi / 2)
    np.testing.assert_allclose(up, named_state("plus_y"), atol=1e-15)


def test_measurement_basis_is_orthonormal(rng):
    for phi in rng.uniform(-math.pi, math.pi, size=10):
        up, down = measurement_basis(phi)
        assert abs(np.vdot(up, down)) == pytest.approx(0.0, abs=1e-15)
        assert np.vdot(up, up).real == pytest.approx(1.0)


@pytest.mark.parametrize("name,tags", [
    ("not", ("minus", "plus", "plus")),
    ("hadamard", ("minus_y", "plus_y", "plus")),
    ("phase", ("plus", "plus_y", "plus")),
])
def test_catalog_up_projectors(name, tags):
    g = gate_catalog(name)
    for qubit, tag in zip((2, 3, 4), tags):
        np.testing.assert_allclose(g.axis(qubit), named_state(tag), atol=1e-15)


@pytest.mark.parametrize("name,tag,expected", [
    ("not", "zero", [0, 1]),
    ("hadamard", "zero", [1 / math.sqrt(2), 1 / math.sqrt(2)]),
    ("phase", "plus", [1 / math.sqrt(2), 1j / math.sqrt(2)]),
])
def test_ideal_outputs(name, tag, expected):
    psi = ideal_output(gate_catalog(name), InputQubit.from_tag(tag))
    np.testing.assert_allclose(psi.amplitudes, expected, atol=1e-15)


def test_catalog_lookup_errors():
    assert parse_gate_name("Hadamard") is GateName.HADAMARD
    with pytest.raises(ConfigurationError) as info:
        gate_catalog("toffoli")
    assert info.value.exit_code == 2
    with pytest.raises(ConfigurationError):
        gate_catalog("euler")
    with pytest.raises(ConfigurationError):
        gate_catalog("euler", euler_angles=[0.1, 0.2])


def test_euler_gate_unitary_and_angles():
    g = gate_catalog("euler", euler_angles=[0.3, -1.1, 2.0])
    assert g.basis_angles == (-0.3, -1.1, 2.0)
    expected = rotation(PAULI_X, 2.0) @ rotation(PAULI_Z, -1.1) @ rotation(PAULI_X, 0.3)
    np.testing.assert_allclose(g.ideal_unitary, expected, atol=1e-15)
    assert g.to_dict()["euler_angles"] == [0.3, -1.1, 2.0]


@pytest.mark.parametrize("gate", CATALOG)
def test_zero_time_runs_are_exact(calibrated, gate):
    g = gate_catalog(gate)
    result = run_gate(g, g.reference_input, MeasurementSchedule.simultaneous(0.0), calibrated)
    assert result.gate_fidelity == pytest.approx(1.0, abs=1e-12)
    assert result.branch_probability == pytest.approx(1 / 16, abs=1e-12)


def test_hadamard_is_exact_on_z_eigenstates(calibrated):
    g = gate_catalog("hadamard")
    for tag in ("zero", "one"):
        result = run_gate(g, InputQubit.from_tag(tag), MeasurementSchedule.simultaneous(0.0),
                          calibrated)
        assert result.gate_fidelity == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("name", ["not", "phase"])
def test_zero_time_runs_are_exact_for_any_input(rng, calibrated, name):
    g = gate_catalog(name)
    schedule = MeasurementSchedule.distinct(0.0, 0.0, 0.0)
    for _ in range(10):
        result = run_gate(g, random_input(rng), schedule, calibrated)
        assert result.gate_fidelity == pytest.approx(1.0, abs=1e-10)


def test_euler_zero_time_runs_are_exact(rng, calibrated):
    schedule = MeasurementSchedule.simultaneous(0.0)
    for _ in range(10):
        xi, eta, zeta = rng.uniform(-math.pi, math.pi, size=3)
        g = euler_gate(xi, eta, zeta)
        result = run_gate(g, random_input(rng), schedule, calibrated)
        assert result.gate_fidelity == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("t,gate,expected", [
    (15.9, "phase", 0.96),
    (15.7, "not", 0.93),
])
def test_simultaneous_fidelities(calibrated, t, gate, expected):
    g = gate_catalog(gate)
    result = run_gate(g, g.reference_input, MeasurementSchedule.simultaneous(t), calibrated)
    assert result.gate_fidelity == pytest.approx(expected, abs=0.03)


@pytest.mark.parametrize("convention", list(CompositionConvention))
def test_equal_distinct_times_match_simultaneous(calibrated, convention):
    g = gate_catalog("phase")
    q = g.reference_input
    for t in (3.0, 15.9, 31.6):
        distinct = run_gate(g, q, MeasurementSchedule.distinct(t, t, t, convention=convention),
                            calibrated)
        simultaneous = run_gate(
            g, q, MeasurementSchedule.simultaneous(t, convention=convention), calibrated
        )
        assert distinct.gate_fidelity == simultaneous.gate_fidelity
        assert distinct.branch_probability == simultaneous.branch_probability


def test_conventions_differ_for_separated_times(calibrated):
    g = gate_catalog("not")
    results = [
        run_gate(g, g.reference_input,
                 MeasurementSchedule.distinct(7.8, 23.4, 39.0, convention=c), calibrated)
        for c in CompositionConvention
    ]
    assert results[0].gate_fidelity != pytest.approx(results[1].gate_fidelity, abs=1e-6)


def test_retain_matches_remove_at_zero_time(rng, calibrated):
    g = gate_catalog("phase")
    q = random_input(rng)
    removed = run_gate(g, q, MeasurementSchedule.simultaneous(0.0), calibrated)
    retained = run_gate(
        g, q, MeasurementSchedule.simultaneous(0.0, handling=MeasuredQubitHandling.RETAIN),
        calibrated,
    )
    np.testing.assert_allclose(
        retained.output_qubit_state.elements, removed.output_qubit_state.elements, atol=1e-12
    )
    assert retained.branch_probability == pytest.approx(removed.branch_probability, abs=1e-12)


def test_retain_output_is_a_valid_qubit_state(calibrated):
    g = gate_catalog("not")
    schedule = MeasurementSchedule.distinct(5.0, 10.0, 15.0, handling=MeasuredQubitHandling.RETAIN)
    result = run_gate(g, g.reference_input, schedule, calibrated)
    rho = result.output_qubit_state
    assert rho.n_qubits == 1
    assert rho.trace() == pytest.approx(1.0, abs=1e-12)
    assert rho.min_eigenvalue() >= -1e-10
    assert 0.0 <= result.gate_fidelity <= 1.0


@pytest.mark.parametrize("t", [0.0, 15.7])
def test_branch_probabilities_sum_to_one(calibrated, t):
    g = gate_catalog("not")
    branches = enumerate_branches(g, g.reference_input, MeasurementSchedule.simultaneous(t),
                                  calibrated)
    assert len(branches) == 16
    assert len({b.branch for b in branches}) == 16
    assert sum(b.probability for b in branches) == pytest.approx(1.0, abs=1e-10)
    if t == 0.0:
        assert all(b.probability == pytest.approx(1 / 16, abs=1e-12) for b in branches)


def test_schedule_validation():
    with pytest.raises(DomainError):
        MeasurementSchedule.distinct(3.0, 2.0, 4.0)
    with pytest.raises(DomainError):
        MeasurementSchedule.distinct(-1.0, 2.0, 4.0)
    with pytest.raises(DomainError):
        MeasurementSchedule(MeasurementMode.SIMULTANEOUS, (1.0, 2.0, 3.0))
    with pytest.raises(DomainError):
        MeasurementSchedule.simultaneous(1.0, outcome_branch=(0, 0, 2, 0))
    with pytest.raises(DomainError):
        MeasurementSchedule.simultaneous(1.0, outcome_branch=(0, 0, 0))


def test_symmetric_schedule_clips_at_zero():
    s = MeasurementSchedule.symmetric(0.1, 0.2)
    assert s.times[0] == 0.0
    assert s.times[1] == pytest.approx(0.1)
    assert s.times[2] == pytest.approx(0.3)
    assert s.t_gap is None
    assert MeasurementSchedule.simultaneous(2.5).t_gap == 2.5


def test_run_result_serializes_to_json(calibrated, plus_input):
    g = gate_catalog("phase")
    result = run_gate(g, plus_input, MeasurementSchedule.simultaneous(15.9), calibrated)
    payload = json.loads(json.dumps(result.to_dict()))
    assert payload["gate"]["name"] == "PHASE"
    assert payload["schedule"] == {
        "mode": "simultaneous",
        "t_gap": 15.9,
        "outcome_branch": [0, 0, 0, 0],
        "measured_qubits": "remove",
    }
    assert payload["convention"] == "divisible"
    assert len(payload["output_state"]) == 2
    assert all(len(row) == 2 and len(row[0]) == 2 for row in payload["output_state"])
    assert payload["gate_fidelity"] == result.gate_fidelity


def test_simultaneous_curve_is_continuous(calibrated):
    g = gate_catalog("hadamard")
    curve = gate_fidelity_curve(
        g, g.reference_input, MeasurementMode.SIMULTANEOUS, np.arange(0.0, 20.0, 0.01), calibrated
    )
    assert curve.values[0] == pytest.approx(1.0, abs=1e-12)
    assert np.max(np.abs(np.diff(curve.values))) < 0.05
    assert np.all((curve.values >= 0.0) & (curve.values <= 1.0))


def test_distinct_curve_evaluator_uses_symmetric_schedule(calibrated):
    g = gate_catalog("not")
    curve = gate_fidelity_curve(
        g, g.reference_input, MeasurementMode.DISTINCT_TIMES, [0.0, 15.7], calibrated, delta=0.2
    )
    expected = run_gate(g, g.reference_input, MeasurementSchedule.distinct(15.5, 15.7, 15.9),
                        calibrated)
    assert curve.values[1] == pytest.approx(expected.gate_fidelity, abs=1e-12)
