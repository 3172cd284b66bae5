"""
Tensor Core - dense linear algebra over n-qubit registers

Basis convention: qubit 1 is the most significant bit of a basis index and
label 0 is the sigma_z eigenvalue +1, so ket strings read left to right as
binary indices.
"""

import logging
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from libs.dephasing_exceptions import DomainError, ImpossibleBranchError

logger = logging.getLogger(__name__)

ALGEBRA_TOL = 1e-12
BRANCH_PROBABILITY_FLOOR = 1e-14


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=complex)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class PureState:
    """State vector over n qubits"""

    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if self.n_qubits < 0:
            raise DomainError("BAD_REGISTER", f"n_qubits must be >= 0, got {self.n_qubits}")
        amplitudes = _frozen(np.ravel(self.amplitudes))
        if amplitudes.shape != (2 ** self.n_qubits,):
            raise DomainError(
                "BAD_REGISTER",
                f"{self.n_qubits} qubits need {2 ** self.n_qubits} amplitudes, "
                f"got {amplitudes.size}",
            )
        object.__setattr__(self, "amplitudes", amplitudes)

    @classmethod
    def from_vector(cls, vector: Sequence[complex]) -> "PureState":
        vector = np.asarray(vector, dtype=complex)
        n_qubits = int(round(np.log2(vector.size))) if vector.size else -1
        return cls(n_qubits, vector)

    @property
    def dim(self) -> int:
        return 2 ** self.n_qubits

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalize(self) -> "PureState":
        norm = self.norm()
        if norm < BRANCH_PROBABILITY_FLOOR:
            raise DomainError("BAD_STATE", "cannot normalize a zero vector")
        return PureState(self.n_qubits, self.amplitudes / norm)

    def is_normalized(self, tol: float = ALGEBRA_TOL) -> bool:
        return abs(self.norm() ** 2 - 1.0) <= tol


@dataclass(frozen=True)
class DensityMatrix:
    """Density matrix over n qubits (n = 0 is the empty register [[1]])"""

    n_qubits: int
    elements: np.ndarray

    def __post_init__(self):
        if self.n_qubits < 0:
            raise DomainError("BAD_REGISTER", f"n_qubits must be >= 0, got {self.n_qubits}")
        elements = _frozen(self.elements)
        dim = 2 ** self.n_qubits
        if elements.shape != (dim, dim):
            raise DomainError(
                "BAD_REGISTER",
                f"{self.n_qubits} qubits need a {dim}x{dim} matrix, got {elements.shape}",
            )
        object.__setattr__(self, "elements", elements)

    @property
    def dim(self) -> int:
        return 2 ** self.n_qubits

    def trace(self) -> complex:
        return complex(np.trace(self.elements))

    def is_hermitian(self, tol: float = ALGEBRA_TOL) -> bool:
        return bool(np.max(np.abs(self.elements - self.elements.conj().T), initial=0.0) <= tol)

    def min_eigenvalue(self) -> float:
        hermitian_part = (self.elements + self.elements.conj().T) / 2
        return float(np.linalg.eigvalsh(hermitian_part)[0])


def basis_state(label: str) -> PureState:
    """Computational basis ket from a bit string such as '0110'"""
    if not label or set(label) - {"0", "1"}:
        raise DomainError("BAD_STATE", f"not a bit string: {label!r}")
    amplitudes = np.zeros(2 ** len(label), dtype=complex)
    amplitudes[int(label, 2)] = 1.0
    return PureState(len(label), amplitudes)


def outer(psi: PureState) -> DensityMatrix:
    return DensityMatrix(psi.n_qubits, np.outer(psi.amplitudes, psi.amplitudes.conj()))


def tensor(a: PureState, b: PureState) -> PureState:
    """Kronecker product; a occupies the more significant qubits"""
    return PureState(a.n_qubits + b.n_qubits, np.kron(a.amplitudes, b.amplitudes))


def tensor_all(states: Sequence[PureState]) -> PureState:
    result = PureState(0, np.ones(1, dtype=complex))
    for state in states:
        result = tensor(result, state)
    return result


def _check_position(n_qubits: int, qubit: int):
    if not 1 <= qubit <= n_qubits:
        raise DomainError("BAD_QUBIT", f"qubit {qubit} outside register of {n_qubits}")


def project_and_renormalize(
    rho: DensityMatrix,
    qubit: int,
    axis_state: Sequence[complex],
    remove: bool = True,
) -> Tuple[DensityMatrix, float]:
    """
    Project one qubit onto |axis><axis| and renormalize

    Args:
        rho: Register state
        qubit: 1-based register position to measure
        axis_state: Normalized 2-component vector
        remove: Drop the measured qubit (True) or keep it in the projected state

    Returns:
        (post-measurement state, branch probability)

    Raises:
        ImpossibleBranchError: probability below 1e-14
    """
    _check_position(rho.n_qubits, qubit)
    axis = np.asarray(axis_state, dtype=complex).reshape(2)
    if abs(np.vdot(axis, axis).real - 1.0) > ALGEBRA_TOL:
        raise DomainError("BAD_AXIS", f"axis state not normalized: {axis}")

    left = 2 ** (qubit - 1)
    right = 2 ** (rho.n_qubits - qubit)
    blocks = rho.elements.reshape(left, 2, right, left, 2, right)
    reduced = np.einsum("aibcjd,i,j->abcd", blocks, axis.conj(), axis)
    probability = float(np.real(np.einsum("abab->", reduced)))

    if probability < BRANCH_PROBABILITY_FLOOR:
        raise ImpossibleBranchError(qubit, probability)

    if remove:
        elements = reduced.reshape(left * right, left * right) / probability
        return DensityMatrix(rho.n_qubits - 1, elements), min(probability, 1.0)

    projector = np.outer(axis, axis.conj())
    expanded = np.einsum("abcd,ij->aibcjd", reduced, projector)
    elements = expanded.reshape(rho.dim, rho.dim) / probability
    return DensityMatrix(rho.n_qubits, elements), min(probability, 1.0)


def partial_trace(rho: DensityMatrix, keep: Sequence[int]) -> DensityMatrix:
    """Reduced state on the 1-based positions in `keep` (register order kept)"""
    keep = sorted(set(keep))
    for qubit in keep:
        _check_position(rho.n_qubits, qubit)

    n = rho.n_qubits
    tensor_view = rho.elements.reshape((2,) * (2 * n))
    current = n
    for qubit in reversed(range(1, n + 1)):
        if qubit in keep:
            continue
        axis = qubit - 1
        tensor_view = np.trace(tensor_view, axis1=axis, axis2=axis + current)
        current -= 1

    dim = 2 ** len(keep)
    return DensityMatrix(len(keep), tensor_view.reshape(dim, dim))


def overlap(rho: DensityMatrix, psi: PureState) -> float:
    """<psi|rho|psi> as a real number"""
    if rho.n_qubits != psi.n_qubits:
        raise DomainError(
            "DIM_MISMATCH", f"state has {psi.n_qubits} qubits, matrix has {rho.n_qubits}"
        )
    value = np.vdot(psi.amplitudes, rho.elements @ psi.amplitudes)
    return float(value.real)


def random_pure_state(n_qubits: int, rng: np.random.Generator) -> PureState:
    vector = rng.normal(size=2 ** n_qubits) + 1j * rng.normal(size=2 ** n_qubits)
    return PureState(n_qubits, vector).normalize()
