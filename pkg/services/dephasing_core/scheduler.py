"""
Scheduler - fidelity-curve extrema and optimum measurement times

Extrema are located by sign changes of the sampled finite differences and
refined by golden-section search on the curve's evaluator. Schedule search is
a coarse grid (1-D over t_gap, or 3-D over ordered triples). The simultaneous
optimum is the best interior peak of the sampled t_gap curve, so a window edge
is reported only when the window holds no peak. Otherwise the best grid sample
is refined by golden-section search, one coordinate at a time.
"""

import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import optimize

from libs.dephasing_exceptions import DomainError, ImpossibleBranchError
from .bath import BathParams
from .dephasing_channel import CompositionConvention, MeasuredQubitHandling
from .fidelity import FidelityCurve
from .mbqc import GateSpec, MeasurementMode, MeasurementSchedule, run_gate
from .states import InputQubit

logger = logging.getLogger(__name__)

DEFAULT_STEP = 0.05
DEFAULT_REFINE_TOL = 1e-4
REFINE_SWEEPS = 2


@dataclass(frozen=True)
class Extremum:
    t: float
    value: float

    def to_dict(self) -> Dict[str, float]:
        return {"t": self.t, "value": self.value}


@dataclass
class ExtremaReport:
    """Interior peaks and valleys of a fidelity curve, in time order"""

    peaks: List[Extremum] = field(default_factory=list)
    valleys: List[Extremum] = field(default_factory=list)

    @property
    def is_empty(self) -> bool:
        return not self.peaks and not self.valleys

    def best_peak(self) -> Optional[Extremum]:
        if not self.peaks:
            return None
        # max() keeps the first of equal values, i.e. the earliest time
        return max(self.peaks, key=lambda e: e.value)

    def nearest(self, t: float, kind: str = "peak") -> Optional[Extremum]:
        pool = self.peaks if kind == "peak" else self.valleys
        if not pool:
            return None
        return min(pool, key=lambda e: abs(e.t - t))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "peaks": [e.to_dict() for e in self.peaks],
            "valleys": [e.to_dict() for e in self.valleys],
        }


def _golden_xtol(refine_tol: float, center: float) -> float:
    # golden stops once the bracket is below xtol * (|x1| + |x2|) ~ xtol * 2|center|
    return refine_tol / (2.0 * max(abs(center), refine_tol))


def _golden_refine(
    func: Callable[[float], float],
    bracket: Tuple[float, float, float],
    values: Tuple[float, float, float],
    refine_tol: float,
    maximize: bool = True,
) -> Optional[Tuple[float, float]]:
    """
    Golden-section search inside a three-point bracket

    Args:
        func: Objective
        bracket: (a, b, c) with a < b < c
        values: Sampled func(a), func(b), func(c)
        refine_tol: Time tolerance
        maximize: Search for a maximum (True) or a minimum (False)

    Returns:
        (t, value) or None when the bracket is not strict
    """
    a, b, c = bracket
    sign = -1.0 if maximize else 1.0
    fa, fb, fc = (sign * v for v in values)
    if not (a < b < c and fb < fa and fb < fc):
        logger.debug(f"bracket {bracket} with values {values} is not strict; refinement skipped")
        return None

    result = optimize.minimize_scalar(
        lambda t: sign * func(t),
        bracket=(a, b, c),
        method="golden",
        options={"xtol": _golden_xtol(refine_tol, b)},
    )
    t_best = float(min(max(result.x, a), c))
    return t_best, float(sign * result.fun)


def _sign_pattern(values: np.ndarray) -> np.ndarray:
    """Signs of finite differences with zeros carrying the previous nonzero sign"""
    signs = np.sign(np.diff(values))
    last = 0.0
    for i, s in enumerate(signs):
        if s == 0:
            signs[i] = last
        else:
            last = s
    return signs


def find_extrema(curve: FidelityCurve, refine_tol: float = DEFAULT_REFINE_TOL) -> ExtremaReport:
    """
    Interior peaks and valleys of a sampled curve

    A flat or monotone curve yields an empty report. Each bracket is refined
    with the curve's evaluator when it has one.
    """
    if len(curve) < 3:
        raise DomainError("BAD_CURVE", f"need at least 3 samples, got {len(curve)}")

    times, values = curve.times, curve.values
    signs = _sign_pattern(values)
    report = ExtremaReport()

    for i in range(1, len(signs)):
        if signs[i - 1] == signs[i] or signs[i - 1] == 0 or signs[i] == 0:
            continue
        is_peak = signs[i - 1] > 0
        # on a plateau the extremum sample is the first one of the run
        j = i
        while j > 1 and values[j - 1] == values[j]:
            j -= 1
        best = Extremum(float(times[j]), float(values[j]))

        if curve.evaluator is not None:
            bracket = (float(times[j - 1]), float(times[j]), float(times[i + 1]))
            sampled = (float(values[j - 1]), float(values[j]), float(values[i + 1]))
            refined = _golden_refine(curve.evaluator, bracket, sampled, refine_tol, is_peak)
            if refined is not None:
                t_ref, v_ref = refined
                if (v_ref > best.value) if is_peak else (v_ref < best.value):
                    best = Extremum(t_ref, v_ref)

        best = Extremum(best.t, float(np.clip(best.value, 0.0, 1.0)))
        (report.peaks if is_peak else report.valleys).append(best)

    logger.debug(f"find_extrema: {len(report.peaks)} peaks, {len(report.valleys)} valleys")
    return report


# --- schedule optimization ----------------------------------------------------


@dataclass
class OptimizationReport:
    """Best measurement schedule found in a window"""

    mode: MeasurementMode
    window: Tuple[float, float]
    best_schedule: MeasurementSchedule
    best_fidelity: float
    evaluations: int
    grid_step: float
    # simultaneous optimum taken at a window edge (no interior peak)
    boundary: bool = False

    def to_dict(self) -> Dict[str, Any]:
        return {
            "mode": self.mode.value,
            "window": list(self.window),
            "best_schedule": self.best_schedule.to_dict(),
            "best_fidelity": self.best_fidelity,
            "evaluations": self.evaluations,
            "grid_step": self.grid_step,
            "boundary": self.boundary,
        }


def window_grid(window: Sequence[float], step: float) -> np.ndarray:
    """lo, lo + step, ... up to and including hi"""
    lo, hi = float(window[0]), float(window[1])
    if lo < 0 or hi < lo or not math.isfinite(hi):
        raise DomainError("BAD_WINDOW", f"window must satisfy 0 <= t_lo <= t_hi: {window}")
    if step <= 0:
        raise DomainError("BAD_STEP", f"grid step must be > 0, got {step}")
    count = int(math.floor((hi - lo) / step + 1e-9))
    grid = lo + step * np.arange(count + 1)
    if hi - grid[-1] > 1e-12:
        grid = np.append(grid, hi)
    return grid


class _ScheduleObjective:
    """Gate fidelity as a function of measurement times, with an evaluation counter"""

    def __init__(
        self,
        g: GateSpec,
        q: InputQubit,
        mode: MeasurementMode,
        p: BathParams,
        convention: CompositionConvention,
        handling: MeasuredQubitHandling,
    ):
        self.g = g
        self.q = q
        self.mode = mode
        self.p = p
        self.convention = convention
        self.handling = handling
        self.evaluations = 0

    def schedule(self, times: Sequence[float]) -> MeasurementSchedule:
        if self.mode is MeasurementMode.SIMULTANEOUS:
            return MeasurementSchedule.simultaneous(
                times[0], convention=self.convention, handling=self.handling
            )
        return MeasurementSchedule.distinct(
            *times, convention=self.convention, handling=self.handling
        )

    def __call__(self, times: Sequence[float]) -> float:
        self.evaluations += 1
        try:
            return run_gate(self.g, self.q, self.schedule(times), self.p).gate_fidelity
        except ImpossibleBranchError:
            return -math.inf


def _interior_peak(
    objective: _ScheduleObjective,
    grid: np.ndarray,
    values: np.ndarray,
    refine_tol: float,
) -> Optional[Extremum]:
    """Best refined interior peak of the sampled t_gap curve, None when there is none"""
    if grid.size < 3 or not np.all(np.isfinite(values)):
        return None
    curve = FidelityCurve(grid, values, evaluator=lambda t: objective((float(t),)))
    return find_extrema(curve, refine_tol).best_peak()


def _refine_coordinates(
    objective: _ScheduleObjective,
    times: List[float],
    value: float,
    step: float,
    bounds: Tuple[float, float],
    refine_tol: float,
) -> Tuple[List[float], float]:
    """Coordinate-wise golden refinement of an ordered triple (or a single t_gap)"""
    lo, hi = bounds
    for _ in range(REFINE_SWEEPS):
        improved = False
        for c in range(len(times)):
            lower = times[c - 1] if c > 0 else lo
            upper = times[c + 1] if c < len(times) - 1 else hi
            a, b, d = max(times[c] - step, lower), times[c], min(times[c] + step, upper)

            def along(t: float, c: int = c) -> float:
                trial = list(times)
                trial[c] = t
                return objective(trial)

            if not a < b < d:
                continue
            refined = _golden_refine(along, (a, b, d), (along(a), value, along(d)), refine_tol)
            if refined is not None and refined[1] > value:
                times[c], value = refined
                improved = True
        if not improved:
            break
    return times, value


def optimize_schedule(
    g: GateSpec,
    q: InputQubit,
    mode: MeasurementMode,
    window: Sequence[float],
    p: BathParams,
    step: float = DEFAULT_STEP,
    refine_tol: float = DEFAULT_REFINE_TOL,
    convention: CompositionConvention = CompositionConvention.DIVISIBLE,
    handling: MeasuredQubitHandling = MeasuredQubitHandling.REMOVE,
) -> OptimizationReport:
    """
    Search the window for the schedule with the highest gate fidelity

    Args:
        g: Gate to run
        q: Input qubit
        mode: simultaneous (1-D over t_gap) or distinct_times (3-D, t1 <= t2 <= t3)
        window: [t_lo, t_hi]
        p: Bath parameters
        step: Coarse grid step
        refine_tol: Time tolerance of the golden-section refinement

    Returns:
        OptimizationReport; ties go to the earliest times. In simultaneous mode
        the optimum equals find_extrema's best peak on the same grid.
    """
    grid = window_grid(window, step)
    objective = _ScheduleObjective(g, q, mode, p, convention, handling)

    peak: Optional[Extremum] = None
    if mode is MeasurementMode.SIMULTANEOUS:
        values = np.array([objective((float(t),)) for t in grid])
        peak = _interior_peak(objective, grid, values, refine_tol)
        coarse: Iterable[Tuple[Tuple[float, ...], float]] = (
            ((float(t),), float(v)) for t, v in zip(grid, values)
        )
    else:
        coarse = (
            (times, objective(times))
            for times in (
                tuple(float(grid[i]) for i in idx)
                for idx in itertools.combinations_with_replacement(range(len(grid)), 3)
            )
        )

    boundary = False
    if peak is not None:
        times, value = [peak.t], peak.value
    else:
        best_times: Optional[Tuple[float, ...]] = None
        best_value = -math.inf
        for candidate, candidate_value in coarse:
            if candidate_value > best_value:
                best_times, best_value = candidate, candidate_value

        if best_times is None:
            raise DomainError(
                "BAD_WINDOW", f"every schedule in {list(window)} hits an impossible branch"
            )
        logger.debug(
            f"coarse search over {objective.evaluations} schedules: "
            f"best {best_times} -> {best_value}"
        )
        times, value = _refine_coordinates(
            objective, list(best_times), best_value, step, (grid[0], grid[-1]), refine_tol
        )
        if mode is MeasurementMode.SIMULTANEOUS:
            boundary = True
            logger.warning(
                f"no interior peak for {g.name.value} in {list(window)}; "
                f"reporting the best grid sample t_gap={times[0]}"
            )

    schedule = objective.schedule(times)
    logger.info(
        f"optimum for {g.name.value} ({mode.value}) in {list(window)}: "
        f"{schedule.times} -> {value:.6f} after {objective.evaluations} evaluations"
    )
    return OptimizationReport(
        mode=mode,
        window=(float(window[0]), float(window[1])),
        best_schedule=schedule,
        best_fidelity=float(value),
        evaluations=objective.evaluations,
        grid_step=step,
        boundary=boundary,
    )
