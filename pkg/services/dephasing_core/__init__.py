"""
Dephasing Core

Collective dephasing of qubit registers under an ohmic bath and the gate
fidelities of measurement-based computation on a five-qubit cluster chain.
"""

__version__ = "1.0.0"

from .bath import BathParams, DephasingFactors, Regime
from .dephasing_channel import CompositionConvention, MeasuredQubitHandling, propagate
from .fidelity import FidelityCurve, fidelity_at, fidelity_curve
from .mbqc import (
    GateName,
    GateRunResult,
    GateSpec,
    MeasurementMode,
    MeasurementSchedule,
    gate_catalog,
    run_gate,
)
from .scheduler import ExtremaReport, OptimizationReport, find_extrema, optimize_schedule
from .states import InputQubit
from .tensor_core import DensityMatrix, PureState

__all__ = [
    'BathParams',
    'CompositionConvention',
    'DensityMatrix',
    'DephasingFactors',
    'ExtremaReport',
    'FidelityCurve',
    'GateName',
    'GateRunResult',
    'GateSpec',
    'InputQubit',
    'MeasuredQubitHandling',
    'MeasurementMode',
    'MeasurementSchedule',
    'OptimizationReport',
    'PureState',
    'Regime',
    'find_extrema',
    'fidelity_at',
    'fidelity_curve',
    'gate_catalog',
    'optimize_schedule',
    'propagate',
    'run_gate',
]
