"""
Dephasing Channel - exact reduced dynamics under a common dephasing bath

Each density-matrix element between basis states r, c is multiplied by

    exp(-Gamma * (M_r - M_c)^2) * exp(i * Theta * (M_r^2 - M_c^2))

where M is the sigma_z^(T) eigenvalue of the basis state. Populations are
untouched. The map is applied in the interaction picture.
"""

import logging
from enum import Enum
from functools import lru_cache

import numpy as np

from libs.dephasing_exceptions import DomainError
from .bath import BathParams, DephasingFactors, dephasing_factors
from .tensor_core import DensityMatrix

logger = logging.getLogger(__name__)


class CompositionConvention(Enum):
    """How (Gamma, Theta) are assigned to an interval [t_a, t_b]"""
    DIVISIBLE = "divisible"      # Gamma(t_b) - Gamma(t_a)
    FRESH_BATH = "fresh-bath"    # Gamma(t_b - t_a)


class MeasuredQubitHandling(Enum):
    """What happens to a qubit after its projective measurement"""
    REMOVE = "remove"
    RETAIN = "retain"


def m_sum(basis_index: int, n_qubits: int) -> int:
    if not 0 <= basis_index < 2 ** n_qubits:
        raise DomainError("BAD_INDEX", f"index {basis_index} outside {n_qubits}-qubit register")
    return n_qubits - 2 * bin(basis_index).count("1")


@lru_cache(maxsize=None)
def m_sum_vector(n_qubits: int) -> np.ndarray:
    """M for every basis index of an n-qubit register"""
    indices = np.arange(2 ** n_qubits)
    popcount = np.zeros_like(indices)
    for bit in range(n_qubits):
        popcount += (indices >> bit) & 1
    values = n_qubits - 2 * popcount
    values.setflags(write=False)
    return values


def channel_eigenfactor(m_r: int, m_c: int, f: DephasingFactors) -> complex:
    if m_r == m_c:
        return 1.0 + 0.0j
    damping = np.exp(-f.gamma * (m_r - m_c) ** 2)
    phase = np.exp(1j * f.theta * (m_r ** 2 - m_c ** 2))
    return complex(damping * phase)


def factor_matrix(n_qubits: int, f: DephasingFactors) -> np.ndarray:
    m = m_sum_vector(n_qubits).astype(float)
    diff = m[:, None] - m[None, :]
    sq_diff = (m ** 2)[:, None] - (m ** 2)[None, :]
    return np.exp(-f.gamma * diff ** 2) * np.exp(1j * f.theta * sq_diff)


def interval_factors(
    t_a: float,
    t_b: float,
    p: BathParams,
    conv: CompositionConvention = CompositionConvention.DIVISIBLE,
) -> DephasingFactors:
    if t_a < 0 or t_b < t_a:
        raise DomainError("BAD_INTERVAL", f"need 0 <= t_a <= t_b, got [{t_a}, {t_b}]")
    if t_a == t_b:
        return DephasingFactors(0.0, 0.0)
    if conv is CompositionConvention.DIVISIBLE:
        start, end = dephasing_factors(t_a, p), dephasing_factors(t_b, p)
        return DephasingFactors(gamma=end.gamma - start.gamma, theta=end.theta - start.theta)
    return dephasing_factors(t_b - t_a, p)


def propagate(
    rho: DensityMatrix,
    t_a: float,
    t_b: float,
    p: BathParams,
    conv: CompositionConvention = CompositionConvention.DIVISIBLE,
) -> DensityMatrix:
    """
    Evolve rho from t_a to t_b under collective dephasing

    Args:
        rho: Register state at t_a
        t_a: Start of the interval
        t_b: End of the interval (>= t_a)
        p: Bath parameters
        conv: Interval composition convention

    Returns:
        Register state at t_b
    """
    f = interval_factors(t_a, t_b, p, conv)
    if f.gamma == 0.0 and f.theta == 0.0:
        return rho
    return DensityMatrix(rho.n_qubits, rho.elements * factor_matrix(rho.n_qubits, f))
