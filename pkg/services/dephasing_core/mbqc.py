"""
MBQC Gate Engine - single-qubit gates on the five-qubit cluster chain

Qubit 1 is projected onto |+> at t = 0. Qubits 2, 3 and 4 are then measured in
bases B(phi) = {(|0> + e^{i phi}|1>)/sqrt(2), (|0> - e^{i phi}|1>)/sqrt(2)}
while the register dephases under the common bath; the result appears on
qubit 5. Gate fidelity is conditioned on the scheduled outcome branch
(all-up by default) and compared with the ideal output up to global phase.
"""

import itertools
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from libs.dephasing_exceptions import ConfigurationError, DomainError, ImpossibleBranchError
from .bath import BathParams
from .dephasing_channel import CompositionConvention, MeasuredQubitHandling, propagate
from .fidelity import FidelityCurve, check_grid
from .states import (
    InputQubit,
    build_chain,
    entangle,
    named_state,
    post_first_measurement,
)
from .tensor_core import (
    ALGEBRA_TOL,
    DensityMatrix,
    PureState,
    outer,
    overlap,
    partial_trace,
    project_and_renormalize,
)

logger = logging.getLogger(__name__)

MEASURED_QUBITS = (2, 3, 4)
OUTPUT_QUBIT = 5
ALL_UP = (0, 0, 0, 0)

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
HADAMARD_MATRIX = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
PHASE_MATRIX = np.array([[1, 0], [0, 1j]], dtype=complex)


class GateName(Enum):
    """Single-qubit gates in the catalog"""
    NOT = "NOT"
    HADAMARD = "HADAMARD"
    PHASE = "PHASE"
    EULER = "EULER"


class MeasurementMode(Enum):
    """Timing scenario for the measurements of qubits 2, 3, 4"""
    DISTINCT_TIMES = "distinct_times"
    SIMULTANEOUS = "simultaneous"


def rotation(axis: np.ndarray, angle: float) -> np.ndarray:
    """exp(-i angle sigma / 2) for a Pauli matrix sigma"""
    return math.cos(angle / 2) * np.eye(2) - 1j * math.sin(angle / 2) * axis


def measurement_basis(phi: float) -> Tuple[np.ndarray, np.ndarray]:
    """(up, down) = ((|0> + e^{i phi}|1>)/sqrt(2), (|0> - e^{i phi}|1>)/sqrt(2))"""
    phase = np.exp(1j * phi)
    up = np.array([1, phase], dtype=complex) / math.sqrt(2)
    down = np.array([1, -phase], dtype=complex) / math.sqrt(2)
    return up, down


@dataclass(frozen=True)
class GateSpec:
    """
    A gate's measurement pattern on qubits 2-4 and its ideal action

    Args:
        name: Catalog name
        basis_angles: (phi_2, phi_3, phi_4) for bases B_2, B_3, B_4
        ideal_unitary: 2x2 target unitary
        reference_input: Input the gate is benchmarked with
        euler_angles: (xi, eta, zeta) for EULER gates
    """

    name: GateName
    basis_angles: Tuple[float, float, float]
    ideal_unitary: np.ndarray = field(compare=False)
    reference_input: InputQubit
    euler_angles: Optional[Tuple[float, float, float]] = None

    def __post_init__(self):
        unitary = np.array(self.ideal_unitary, dtype=complex)
        if unitary.shape != (2, 2) or not np.allclose(
            unitary.conj().T @ unitary, np.eye(2), atol=ALGEBRA_TOL, rtol=0.0
        ):
            raise DomainError("BAD_GATE", f"{self.name.value}: ideal unitary is not unitary")
        unitary.setflags(write=False)
        object.__setattr__(self, "ideal_unitary", unitary)

    def axis(self, qubit: int, outcome: int = 0) -> np.ndarray:
        """Projector axis for measured qubit 2, 3 or 4 and outcome 0 (up) / 1 (down)"""
        return measurement_basis(self.basis_angles[MEASURED_QUBITS.index(qubit)])[outcome]

    def to_dict(self) -> Dict[str, Any]:
        payload: Dict[str, Any] = {
            "name": self.name.value,
            "basis_angles": list(self.basis_angles),
        }
        if self.euler_angles is not None:
            payload["euler_angles"] = list(self.euler_angles)
        return payload


def euler_gate(xi: float, eta: float, zeta: float) -> GateSpec:
    """U(xi, eta, zeta) = Ux(zeta) Uz(eta) Ux(xi) measured in B_2(-xi), B_3(eta), B_4(zeta)"""
    unitary = rotation(PAULI_X, zeta) @ rotation(PAULI_Z, eta) @ rotation(PAULI_X, xi)
    return GateSpec(
        name=GateName.EULER,
        basis_angles=(-xi, eta, zeta),
        ideal_unitary=unitary,
        reference_input=InputQubit.from_tag("zero"),
        euler_angles=(xi, eta, zeta),
    )


def parse_gate_name(name: Union[str, GateName]) -> GateName:
    if isinstance(name, GateName):
        return name
    try:
        return GateName(str(name).upper())
    except ValueError:
        known = ", ".join(g.value.lower() for g in GateName)
        raise ConfigurationError("UNKNOWN_GATE", f"unknown gate {name!r}; known: {known}")


def gate_catalog(
    name: Union[str, GateName],
    euler_angles: Optional[Sequence[float]] = None,
) -> GateSpec:
    """
    Catalog entry by name

    NOT:      up-projectors (|->, |+>, |+>),         |0> -> |1>
    HADAMARD: up-projectors (|-,y>, |+,y>, |+>),     |0> -> (|0> + |1>)/sqrt(2)
    PHASE:    up-projectors (|+>, |+,y>, |+>),       |+> -> (|0> + i|1>)/sqrt(2)
    EULER:    needs euler_angles (xi, eta, zeta)
    """
    gate = parse_gate_name(name)
    if gate is GateName.NOT:
        return GateSpec(gate, (math.pi, 0.0, 0.0), PAULI_X, InputQubit.from_tag("zero"))
    if gate is GateName.HADAMARD:
        return GateSpec(
            gate, (-math.pi / 2, math.pi / 2, 0.0), HADAMARD_MATRIX, InputQubit.from_tag("zero")
        )
    if gate is GateName.PHASE:
        return GateSpec(gate, (0.0, math.pi / 2, 0.0), PHASE_MATRIX, InputQubit.from_tag("plus"))
    if euler_angles is None or len(euler_angles) != 3:
        raise ConfigurationError("EULER_ANGLES", "EULER gate needs three angles (xi, eta, zeta)")
    return euler_gate(*(float(a) for a in euler_angles))


def ideal_output(g: GateSpec, q: InputQubit) -> PureState:
    return PureState(1, g.ideal_unitary @ q.vector())


@dataclass(frozen=True)
class MeasurementSchedule:
    """
    When qubits 2, 3, 4 are measured, which branch is kept, and how the
    register is propagated between measurements
    """

    mode: MeasurementMode
    times: Tuple[float, float, float]
    outcome_branch: Tuple[int, int, int, int] = ALL_UP
    convention: CompositionConvention = CompositionConvention.DIVISIBLE
    handling: MeasuredQubitHandling = MeasuredQubitHandling.REMOVE

    def __post_init__(self):
        times = tuple(float(t) for t in self.times)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "outcome_branch", tuple(int(b) for b in self.outcome_branch))
        if len(times) != 3:
            raise DomainError("BAD_SCHEDULE", f"need three measurement times, got {len(times)}")
        if times[0] < 0 or not times[0] <= times[1] <= times[2]:
            raise DomainError("BAD_SCHEDULE", f"times must satisfy 0 <= t1 <= t2 <= t3: {times}")
        if self.mode is MeasurementMode.SIMULTANEOUS and len(set(times)) != 1:
            raise DomainError("BAD_SCHEDULE", "simultaneous schedule needs a single t_gap")
        if len(self.outcome_branch) != 4 or set(self.outcome_branch) - {0, 1}:
            raise DomainError("BAD_BRANCH", f"outcome branch must be 4 bits: {self.outcome_branch}")

    @classmethod
    def distinct(cls, t1: float, t2: float, t3: float, **kwargs) -> "MeasurementSchedule":
        return cls(MeasurementMode.DISTINCT_TIMES, (t1, t2, t3), **kwargs)

    @classmethod
    def simultaneous(cls, t_gap: float, **kwargs) -> "MeasurementSchedule":
        return cls(MeasurementMode.SIMULTANEOUS, (t_gap, t_gap, t_gap), **kwargs)

    @classmethod
    def symmetric(cls, t: float, delta: float, **kwargs) -> "MeasurementSchedule":
        """(t - delta, t, t + delta), clipped at zero"""
        return cls.distinct(max(t - delta, 0.0), t, t + delta, **kwargs)

    @property
    def t_gap(self) -> Optional[float]:
        return self.times[0] if self.mode is MeasurementMode.SIMULTANEOUS else None

    def with_branch(self, branch: Sequence[int]) -> "MeasurementSchedule":
        return MeasurementSchedule(
            self.mode, self.times, tuple(branch), self.convention, self.handling
        )

    def to_dict(self) -> Dict[str, Any]:
        payload: Dict[str, Any] = {"mode": self.mode.value}
        if self.mode is MeasurementMode.SIMULTANEOUS:
            payload["t_gap"] = self.times[0]
        else:
            payload["times"] = list(self.times)
        payload["outcome_branch"] = list(self.outcome_branch)
        payload["measured_qubits"] = self.handling.value
        return payload


@dataclass
class GateRunResult:
    """Output qubit state, branch probability and gate fidelity of one run"""

    output_qubit_state: DensityMatrix
    branch_probability: float
    gate_fidelity: float
    gate: Optional[GateSpec] = None
    input_qubit: Optional[InputQubit] = None
    schedule: Optional[MeasurementSchedule] = None

    def to_dict(self) -> Dict[str, Any]:
        rho = self.output_qubit_state.elements
        return {
            "gate": self.gate.to_dict() if self.gate else None,
            "alpha": self.input_qubit.to_dict()["alpha"] if self.input_qubit else None,
            "beta": self.input_qubit.to_dict()["beta"] if self.input_qubit else None,
            "schedule": self.schedule.to_dict() if self.schedule else None,
            "convention": self.schedule.convention.value if self.schedule else None,
            "branch_probability": self.branch_probability,
            "gate_fidelity": self.gate_fidelity,
            "output_state": [[[float(z.real), float(z.imag)] for z in row] for row in rho],
        }


@lru_cache(maxsize=256)
def _initial_register(
    q: InputQubit, first_outcome: int, handling: MeasuredQubitHandling
) -> Tuple[DensityMatrix, float, Tuple[int, ...]]:
    """Register right after Pi_1 at t = 0, its probability and the qubit labels it holds"""
    entangled = outer(entangle(build_chain(q)))
    axis = named_state("plus" if first_outcome == 0 else "minus")
    if handling is MeasuredQubitHandling.RETAIN:
        rho, probability = project_and_renormalize(entangled, 1, axis, remove=False)
        return rho, probability, (1, 2, 3, 4, 5)
    _, probability = project_and_renormalize(entangled, 1, axis)
    rho = outer(post_first_measurement(q, first_outcome))
    return rho, probability, (2, 3, 4, 5)


def run_gate(
    g: GateSpec, q: InputQubit, s: MeasurementSchedule, p: BathParams
) -> GateRunResult:
    """
    Propagate and project qubits 2, 3, 4 at the scheduled times

    Raises:
        ImpossibleBranchError: a scheduled projection has probability < 1e-14
    """
    rho, probability, labels = _initial_register(q, s.outcome_branch[0], s.handling)
    labels = list(labels)
    remove = s.handling is MeasuredQubitHandling.REMOVE
    t_now = 0.0

    for qubit, t_measure, outcome in zip(MEASURED_QUBITS, s.times, s.outcome_branch[1:]):
        rho = propagate(rho, t_now, t_measure, p, s.convention)
        t_now = t_measure
        position = labels.index(qubit) + 1
        try:
            rho, branch = project_and_renormalize(rho, position, g.axis(qubit, outcome), remove)
        except ImpossibleBranchError as e:
            raise ImpossibleBranchError(position, e.probability, label=str(qubit)) from e
        probability *= branch
        if remove:
            labels.remove(qubit)

    output = rho if remove else partial_trace(rho, [labels.index(OUTPUT_QUBIT) + 1])
    fidelity = overlap(output, ideal_output(g, q))
    return GateRunResult(
        output_qubit_state=output,
        branch_probability=probability,
        gate_fidelity=float(np.clip(fidelity, 0.0, 1.0)),
        gate=g,
        input_qubit=q,
        schedule=s,
    )


def schedule_for(
    mode: MeasurementMode, t: float, delta: float = 0.2, **kwargs
) -> MeasurementSchedule:
    """Schedule parameterized by one grid value: t_gap, or (t - delta, t, t + delta)"""
    if mode is MeasurementMode.SIMULTANEOUS:
        return MeasurementSchedule.simultaneous(t, **kwargs)
    return MeasurementSchedule.symmetric(t, delta, **kwargs)


def gate_fidelity_curve(
    g: GateSpec,
    q: InputQubit,
    mode: MeasurementMode,
    t_grid: Sequence[float],
    p: BathParams,
    delta: float = 0.2,
    convention: CompositionConvention = CompositionConvention.DIVISIBLE,
    handling: MeasuredQubitHandling = MeasuredQubitHandling.REMOVE,
) -> FidelityCurve:
    grid = check_grid(t_grid)

    def evaluator(t: float) -> float:
        schedule = schedule_for(mode, t, delta, convention=convention, handling=handling)
        return run_gate(g, q, schedule, p).gate_fidelity

    values = np.array([evaluator(t) for t in grid])
    return FidelityCurve(grid, values, evaluator=evaluator)


@dataclass(frozen=True)
class BranchOutcome:
    """One of the 16 measurement branches of qubits 1-4"""
    branch: Tuple[int, int, int, int]
    probability: float
    gate_fidelity: Optional[float]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "branch": list(self.branch),
            "probability": self.probability,
            "gate_fidelity": self.gate_fidelity,
        }


def enumerate_branches(
    g: GateSpec, q: InputQubit, s: MeasurementSchedule, p: BathParams
) -> List[BranchOutcome]:
    """All 16 outcome branches with their probabilities (uncorrected fidelities)"""
    outcomes = []
    for branch in itertools.product((0, 1), repeat=4):
        try:
            result = run_gate(g, q, s.with_branch(branch), p)
            outcomes.append(BranchOutcome(branch, result.branch_probability, result.gate_fidelity))
        except ImpossibleBranchError:
            logger.debug(f"branch {branch} impossible for {g.name.value}")
            outcomes.append(BranchOutcome(branch, 0.0, None))
    return outcomes
