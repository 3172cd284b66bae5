"""
Fidelity - F(t) = Tr[rho(0) rho(t)] for pure initial states

The engine path propagates the density matrix. The two closed forms (the
two-qubit product state and the post-measurement cluster state) are kept as
independent oracles for it.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from libs.dephasing_exceptions import DomainError
from .bath import BathParams, gamma_closed, theta_closed
from .dephasing_channel import propagate
from .states import InputQubit
from .tensor_core import PureState, outer

logger = logging.getLogger(__name__)


@dataclass
class FidelityCurve:
    """Fidelity values on a nondecreasing time grid"""

    times: np.ndarray
    values: np.ndarray
    evaluator: Optional[Callable[[float], float]] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.times.shape != self.values.shape:
            raise DomainError("BAD_CURVE", "times and values differ in length")
        check_grid(self.times)

    def __len__(self) -> int:
        return int(self.times.size)

    def rows(self) -> List[Sequence[float]]:
        return [(float(t), float(v)) for t, v in zip(self.times, self.values)]

    def to_dict(self) -> Dict[str, List[float]]:
        return {"t": self.times.tolist(), "fidelity": self.values.tolist()}


def check_grid(t_grid: Sequence[float]) -> np.ndarray:
    grid = np.asarray(t_grid, dtype=float)
    if grid.ndim != 1:
        raise DomainError("BAD_GRID", "time grid must be one-dimensional")
    if grid.size and (np.any(np.diff(grid) < 0) or grid[0] < 0):
        raise DomainError("BAD_GRID", "time grid must be nonnegative and nondecreasing")
    return grid


def fidelity_at(psi0: PureState, t: float, p: BathParams) -> float:
    rho0 = outer(psi0)
    rho_t = propagate(rho0, 0.0, t, p)
    # Tr[rho0 rho_t] with rho0 Hermitian
    return float(np.real(np.vdot(rho0.elements, rho_t.elements)))


def closed_form_two_qubit(t: float, p: BathParams) -> float:
    """1/2 + 1/2 exp(-4 Gamma) cos(4 Theta) for |1>(|0> + |1>)/sqrt(2)"""
    gamma, theta = gamma_closed(t, p), theta_closed(t, p)
    return 0.5 + 0.5 * math.exp(-4 * gamma) * math.cos(4 * theta)


def cluster_k(q: InputQubit) -> float:
    """k = (alpha* beta + alpha beta*)^2"""
    cross = q.alpha.conjugate() * q.beta + q.alpha * q.beta.conjugate()
    return float(cross.real ** 2)


def closed_form_cluster(q: InputQubit, t: float, p: BathParams) -> float:
    """Seven-term fidelity of the four-qubit state left after the first measurement"""
    g, th = gamma_closed(t, p), theta_closed(t, p)
    k = cluster_k(q)
    e, c = math.exp, math.cos
    return (
        (3 / 32) * e(-16 * g) * c(16 * th)
        + (3 / 8) * e(-4 * g) * c(4 * th)
        + (1 / 16 - k / 32) * e(-36 * g) * c(12 * th)
        + (1 / 16 + k / 32) * e(-4 * g) * c(12 * th)
        + (1 / 128 - k / 128) * e(-64 * g)
        + (1 / 8 - k / 32) * e(-16 * g)
        + 5 * k / 128
        + 35 / 128
    )


def fidelity_curve(psi0: PureState, t_grid: Sequence[float], p: BathParams) -> FidelityCurve:
    grid = check_grid(t_grid)

    def evaluator(t: float) -> float:
        return fidelity_at(psi0, t, p)

    values = np.array([evaluator(t) for t in grid])
    return FidelityCurve(grid, values, evaluator=evaluator)
