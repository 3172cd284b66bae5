"""
States - named single-qubit states, the five-qubit chain, the entangler S
and the post-measurement four-qubit state, plus the oscillation condition.
"""

import json
import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, FrozenSet, Optional, Union

import numpy as np

from libs.dephasing_exceptions import ConfigurationError, DomainError
from .dephasing_channel import m_sum_vector
from .tensor_core import ALGEBRA_TOL, PureState, tensor_all

logger = logging.getLogger(__name__)

CHAIN_QUBITS = 5
SQRT_HALF = 1 / math.sqrt(2)

NAMED_STATES: Dict[str, np.ndarray] = {
    "zero": np.array([1, 0], dtype=complex),
    "one": np.array([0, 1], dtype=complex),
    "plus": np.array([SQRT_HALF, SQRT_HALF], dtype=complex),
    "minus": np.array([SQRT_HALF, -SQRT_HALF], dtype=complex),
    "plus_y": np.array([SQRT_HALF, 1j * SQRT_HALF], dtype=complex),
    "minus_y": np.array([SQRT_HALF, -1j * SQRT_HALF], dtype=complex),
}

# CLI spellings
TAG_ALIASES = {"0": "zero", "1": "one", "+": "plus", "-": "minus", "+y": "plus_y", "-y": "minus_y"}


def named_state(tag: str) -> np.ndarray:
    key = TAG_ALIASES.get(tag, tag)
    if key not in NAMED_STATES:
        raise ConfigurationError(
            "UNKNOWN_STATE", f"unknown state tag {tag!r}; known: {', '.join(NAMED_STATES)}"
        )
    return NAMED_STATES[key].copy()


def _ket(tag: str) -> PureState:
    return PureState(1, named_state(tag))


@dataclass(frozen=True)
class InputQubit:
    """Input qubit alpha|0> + beta|1>"""

    alpha: complex
    beta: complex

    def __post_init__(self):
        object.__setattr__(self, "alpha", complex(self.alpha))
        object.__setattr__(self, "beta", complex(self.beta))
        norm_sq = abs(self.alpha) ** 2 + abs(self.beta) ** 2
        if abs(norm_sq - 1.0) > ALGEBRA_TOL:
            raise DomainError("BAD_INPUT", f"|alpha|^2 + |beta|^2 = {norm_sq!r}, expected 1")

    @classmethod
    def from_tag(cls, tag: str) -> "InputQubit":
        alpha, beta = named_state(tag)
        return cls(alpha, beta)

    @classmethod
    def normalized(cls, alpha: complex, beta: complex) -> "InputQubit":
        norm = math.sqrt(abs(alpha) ** 2 + abs(beta) ** 2)
        if norm == 0:
            raise DomainError("BAD_INPUT", "alpha and beta are both zero")
        return cls(alpha / norm, beta / norm)

    def vector(self) -> np.ndarray:
        return np.array([self.alpha, self.beta], dtype=complex)

    def conjugate_partner(self) -> np.ndarray:
        """|psi*> = alpha|0> - beta|1> (Z applied to the input)"""
        return np.array([self.alpha, -self.beta], dtype=complex)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "alpha": [self.alpha.real, self.alpha.imag],
            "beta": [self.beta.real, self.beta.imag],
        }


@dataclass(frozen=True)
class OscillationVerdict:
    """Distinct |M| values in a state's support and whether F(t) may oscillate"""
    abs_m_values: FrozenSet[int]
    may_oscillate: bool

    def to_dict(self) -> Dict[str, Any]:
        return {"abs_m_values": sorted(self.abs_m_values), "may_oscillate": self.may_oscillate}


def build_chain(q: InputQubit) -> PureState:
    """|psi_in>_1 (x) |+>_2 (x) |+>_3 (x) |+>_4 (x) |+>_5"""
    return tensor_all([PureState(1, q.vector())] + [_ket("plus")] * (CHAIN_QUBITS - 1))


def _chain_input(chain: PureState) -> Optional[InputQubit]:
    """Input qubit of a product chain |psi>|+>|+>|+>|+>, None for any other state"""
    blocks = chain.amplitudes.reshape(2, 16)
    alpha, beta = blocks[0, 0] * 4, blocks[1, 0] * 4
    if abs(alpha) ** 2 + abs(beta) ** 2 < ALGEBRA_TOL:
        return None
    q = InputQubit.normalized(alpha, beta)
    if np.max(np.abs(build_chain(q).amplitudes - chain.amplitudes)) > 1e-10:
        return None
    return q


def entangle(chain: PureState) -> PureState:
    """
    S acting on a chain, built term by term from its four-term expansion

        1/2 [ |psi>|0>|->|0>|->  - |psi>|0>|+>|1>|+>
            - |psi*>|1>|+>|0>|-> + |psi*>|1>|->|1>|+> ]

    Five-qubit states that are not a product chain go through entangle_circuit.
    """
    if chain.n_qubits != CHAIN_QUBITS:
        raise DomainError("BAD_REGISTER", f"entangler acts on 5 qubits, got {chain.n_qubits}")
    q = _chain_input(chain)
    if q is None:
        return entangle_circuit(chain)
    psi = PureState(1, q.vector())
    psi_star = PureState(1, q.conjugate_partner())
    zero, one, plus, minus = _ket("zero"), _ket("one"), _ket("plus"), _ket("minus")

    terms = [
        (+1, [psi, zero, minus, zero, minus]),
        (-1, [psi, zero, plus, one, plus]),
        (-1, [psi_star, one, plus, zero, minus]),
        (+1, [psi_star, one, minus, one, plus]),
    ]
    amplitudes = sum(sign * tensor_all(kets).amplitudes for sign, kets in terms) / 2
    return PureState(CHAIN_QUBITS, amplitudes)


def _entangler_phases() -> np.ndarray:
    indices = np.arange(2 ** CHAIN_QUBITS)
    bits = [(indices >> (CHAIN_QUBITS - k)) & 1 for k in range(1, CHAIN_QUBITS + 1)]
    parity = np.zeros_like(indices)
    for k in range(CHAIN_QUBITS - 1):
        parity += bits[k] * bits[k + 1]
    for k in range(1, CHAIN_QUBITS):
        parity += bits[k]
    return np.where(parity % 2 == 0, 1.0, -1.0)


def entangle_circuit(state: PureState) -> PureState:
    """Z2 Z3 Z4 Z5 . CZ12 CZ23 CZ34 CZ45 applied to any five-qubit state"""
    if state.n_qubits != CHAIN_QUBITS:
        raise DomainError("BAD_REGISTER", f"entangler acts on 5 qubits, got {state.n_qubits}")
    return PureState(CHAIN_QUBITS, _entangler_phases() * state.amplitudes)


def post_first_measurement(q: InputQubit, outcome: int = 0) -> PureState:
    """
    Qubits 2..5 after projecting qubit 1 of S|chain> onto |+> (outcome 0) or |-> (outcome 1),
    renormalized
    """
    if outcome not in (0, 1):
        raise DomainError("BAD_OUTCOME", f"outcome must be 0 (up) or 1 (down), got {outcome}")
    axis = named_state("plus" if outcome == 0 else "minus")
    c_psi = np.vdot(axis, q.vector())
    c_star = np.vdot(axis, q.conjugate_partner())
    zero, one, plus, minus = _ket("zero"), _ket("one"), _ket("plus"), _ket("minus")

    amplitudes = c_psi * (
        tensor_all([zero, minus, zero, minus]).amplitudes
        - tensor_all([zero, plus, one, plus]).amplitudes
    ) - c_star * (
        tensor_all([one, plus, zero, minus]).amplitudes
        - tensor_all([one, minus, one, plus]).amplitudes
    )
    return PureState(CHAIN_QUBITS - 1, amplitudes / 2).normalize()


def oscillation_condition(psi: PureState, amp_tol: float = 1e-12) -> OscillationVerdict:
    if amp_tol < 0:
        raise DomainError("BAD_TOLERANCE", f"amp_tol must be >= 0, got {amp_tol}")
    support = np.abs(psi.amplitudes) > amp_tol
    abs_m = frozenset(int(v) for v in np.abs(m_sum_vector(psi.n_qubits)[support]))
    return OscillationVerdict(abs_m_values=abs_m, may_oscillate=len(abs_m) >= 2)


def two_qubit_example() -> PureState:
    """|1> (x) (|0> + |1>)/sqrt(2)"""
    return tensor_all([_ket("one"), _ket("plus")])


def ghz_state(n_qubits: int) -> PureState:
    amplitudes = np.zeros(2 ** n_qubits, dtype=complex)
    amplitudes[0] = amplitudes[-1] = SQRT_HALF
    return PureState(n_qubits, amplitudes)


def state_to_json(psi: PureState) -> str:
    payload = {
        "n_qubits": psi.n_qubits,
        "amplitudes": [[float(a.real), float(a.imag)] for a in psi.amplitudes],
    }
    return json.dumps(payload, indent=2)


def state_from_json(source: Union[str, Dict[str, Any]]) -> PureState:
    """Parse {"n_qubits": n, "amplitudes": [[re, im], ...]}"""
    try:
        payload = json.loads(source) if isinstance(source, str) else source
        n_qubits = int(payload["n_qubits"])
        amplitudes = np.array([complex(re, im) for re, im in payload["amplitudes"]])
        return PureState(n_qubits, amplitudes)
    except (ValueError, TypeError, KeyError, DomainError) as e:
        raise ConfigurationError("BAD_STATE_FILE", f"malformed state JSON: {e}") from e
