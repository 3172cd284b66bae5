"""
Tests for extrema detection and schedule optimization
"""

import math

import numpy as np
import pytest

from libs.dephasing_exceptions import DomainError
from services.dephasing_core.bath import BathParams
from services.dephasing_core.fidelity import FidelityCurve, fidelity_curve
from services.dephasing_core.mbqc import (
    MeasurementMode,
    MeasurementSchedule,
    gate_catalog,
    gate_fidelity_curve,
    run_gate,
)
from services.dephasing_core.scheduler import (
    ExtremaReport,
    Extremum,
    find_extrema,
    optimize_schedule,
    window_grid,
)
from services.dephasing_core.states import InputQubit, ghz_state, post_first_measurement


def cosine_curve(step: float = 0.5, with_evaluator: bool = True) -> FidelityCurve:
    def f(t: float) -> float:
        return 0.5 + 0.5 * math.cos(0.4 * t)

    times = np.arange(0.0, 30.0 + step / 2, step)
    return FidelityCurve(times, [f(t) for t in times], evaluator=f if with_evaluator else None)


def test_cosine_extrema_are_refined():
    report = find_extrema(cosine_curve(), refine_tol=1e-4)
    assert len(report.peaks) == 1
    assert report.peaks[0].t == pytest.approx(2 * math.pi / 0.4, abs=2e-4)
    assert report.peaks[0].value == pytest.approx(1.0, abs=1e-8)
    assert [v.t for v in report.valleys] == pytest.approx(
        [math.pi / 0.4, 3 * math.pi / 0.4], abs=2e-4
    )


def test_extrema_without_evaluator_stay_on_samples():
    report = find_extrema(cosine_curve(with_evaluator=False))
    assert len(report.peaks) == 1
    assert report.peaks[0].t == 15.5
    assert report.peaks[0].value == pytest.approx(0.5 + 0.5 * math.cos(6.2))


def test_refinement_is_never_worse_than_samples():
    curve = cosine_curve(step=1.3)
    report = find_extrema(curve)
    assert report.peaks and report.valleys
    for peak in report.peaks:
        nearby = curve.values[np.abs(curve.times - peak.t) <= 1.3]
        assert peak.value >= nearby.max()
    for valley in report.valleys:
        nearby = curve.values[np.abs(curve.times - valley.t) <= 1.3]
        assert valley.value <= nearby.min()


def test_plateau_reports_first_sample():
    curve = FidelityCurve([0.0, 1.0, 2.0, 3.0], [0.0, 1.0, 1.0, 0.0])
    report = find_extrema(curve)
    assert report.peaks == [Extremum(1.0, 1.0)]
    assert report.valleys == []


def test_monotone_curve_has_no_extrema(calibrated):
    report = find_extrema(fidelity_curve(ghz_state(2), np.linspace(0, 50, 501), calibrated))
    assert report.is_empty
    assert report.best_peak() is None
    assert report.nearest(10.0) is None


def test_cluster_curve_extrema(calibrated):
    psi = post_first_measurement(InputQubit.from_tag("zero"))
    report = find_extrema(fidelity_curve(psi, np.linspace(0, 40, 401), calibrated))
    assert report.nearest(7.8, "valley").t == pytest.approx(7.8, abs=0.15)
    assert report.nearest(15.7, "peak").t == pytest.approx(15.7, abs=0.15)
    assert report.nearest(23.5, "valley").t == pytest.approx(23.5, abs=0.15)
    assert report.nearest(15.7, "peak").value == pytest.approx(0.71, abs=0.03)


def test_short_curve_rejected():
    with pytest.raises(DomainError):
        find_extrema(FidelityCurve([0.0, 1.0], [1.0, 0.5]))


def test_best_peak_prefers_earliest_tie():
    report = ExtremaReport(peaks=[Extremum(2.0, 0.9), Extremum(5.0, 0.9), Extremum(7.0, 0.8)])
    assert report.best_peak().t == 2.0
    assert report.to_dict()["peaks"][1] == {"t": 5.0, "value": 0.9}


def test_window_grid():
    np.testing.assert_allclose(window_grid((0.0, 1.0), 0.3), [0.0, 0.3, 0.6, 0.9, 1.0])
    np.testing.assert_allclose(window_grid((1.0, 2.0), 0.5), [1.0, 1.5, 2.0])
    np.testing.assert_allclose(window_grid((4.0, 4.0), 0.5), [4.0])
    with pytest.raises(DomainError):
        window_grid((5.0, 1.0), 0.1)
    with pytest.raises(DomainError):
        window_grid((-1.0, 1.0), 0.1)
    with pytest.raises(DomainError):
        window_grid((0.0, 1.0), 0.0)


def test_zero_window_gives_zero_schedule(calibrated):
    g = gate_catalog("not")
    report = optimize_schedule(
        g, g.reference_input, MeasurementMode.DISTINCT_TIMES, (0.0, 0.0), calibrated
    )
    assert report.best_schedule.times == (0.0, 0.0, 0.0)
    assert report.best_fidelity == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("gate,t_expected,f_expected", [
    ("phase", 15.9, 0.96),
    ("not", 15.7, 0.93),
])
def test_simultaneous_optimum(calibrated, gate, t_expected, f_expected):
    g = gate_catalog(gate)
    report = optimize_schedule(
        g, g.reference_input, MeasurementMode.SIMULTANEOUS, (1.0, 20.0), calibrated
    )
    assert report.best_schedule.t_gap == pytest.approx(t_expected, abs=0.1)
    assert report.best_fidelity == pytest.approx(f_expected, abs=0.03)
    assert report.evaluations > len(window_grid((1.0, 20.0), 0.05))


@pytest.mark.parametrize("gate", ["hadamard", "not", "phase"])
def test_simultaneous_optimum_is_the_best_peak(calibrated, gate):
    g = gate_catalog(gate)
    grid = window_grid((1.0, 20.0), 0.05)
    curve = gate_fidelity_curve(
        g, g.reference_input, MeasurementMode.SIMULTANEOUS, grid, calibrated
    )
    peak = find_extrema(curve).best_peak()
    report = optimize_schedule(
        g, g.reference_input, MeasurementMode.SIMULTANEOUS, (1.0, 20.0), calibrated
    )
    assert peak is not None
    assert not report.boundary
    assert report.best_schedule.t_gap == pytest.approx(peak.t, abs=1e-4)
    assert report.best_fidelity == pytest.approx(peak.value, abs=1e-12)


def test_phase_optimum_is_not_the_window_edge(calibrated):
    g = gate_catalog("phase")
    report = optimize_schedule(
        g, g.reference_input, MeasurementMode.SIMULTANEOUS, (1.0, 20.0), calibrated
    )
    edge = run_gate(g, g.reference_input, MeasurementSchedule.simultaneous(1.0), calibrated)
    # the edge sample is higher than the peak but is not a recurrence
    assert edge.gate_fidelity > report.best_fidelity
    assert report.best_schedule.t_gap == pytest.approx(15.955, abs=0.01)
    assert report.best_fidelity == pytest.approx(0.9656, abs=1e-3)


def test_optimum_is_stable_under_step_halving(calibrated):
    g = gate_catalog("phase")
    coarse, fine = (
        optimize_schedule(
            g, g.reference_input, MeasurementMode.SIMULTANEOUS, (10.0, 20.0), calibrated, step=s
        )
        for s in (0.1, 0.05)
    )
    assert fine.best_fidelity == pytest.approx(coarse.best_fidelity, abs=1e-3)
    assert fine.best_schedule.t_gap == pytest.approx(coarse.best_schedule.t_gap, abs=0.05)


def test_simultaneous_refinement_beats_coarse_grid(calibrated):
    g = gate_catalog("phase")
    grid = window_grid((14.0, 17.0), 0.5)
    coarse = max(
        run_gate(g, g.reference_input, MeasurementSchedule.simultaneous(t), calibrated)
        .gate_fidelity
        for t in grid
    )
    report = optimize_schedule(
        g, g.reference_input, MeasurementMode.SIMULTANEOUS, (14.0, 17.0), calibrated, step=0.5
    )
    assert report.best_fidelity >= coarse


def test_distinct_optimum_is_at_least_the_tight_triple(calibrated):
    g = gate_catalog("not")
    tight = run_gate(g, g.reference_input, MeasurementSchedule.distinct(15.5, 15.7, 15.9),
                     calibrated).gate_fidelity
    report = optimize_schedule(
        g, g.reference_input, MeasurementMode.DISTINCT_TIMES, (15.5, 15.9), calibrated, step=0.1
    )
    times = report.best_schedule.times
    assert times[0] <= times[1] <= times[2]
    assert 15.5 <= times[0] and times[2] <= 15.9
    assert report.best_fidelity >= tight - 1e-6
    # 5 grid points -> C(5 + 2, 3) ordered triples before refinement
    assert report.evaluations >= 35


def test_ties_go_to_earliest_times():
    quiet = BathParams(eta=0.0, omega_c=100.0, beta_hbar=1.0)
    g = gate_catalog("phase")
    for mode, expected in [
        (MeasurementMode.SIMULTANEOUS, (2.0, 2.0, 2.0)),
        (MeasurementMode.DISTINCT_TIMES, (2.0, 2.0, 2.0)),
    ]:
        report = optimize_schedule(g, g.reference_input, mode, (2.0, 3.0), quiet, step=0.5)
        assert report.best_schedule.times == expected
        assert report.boundary is (mode is MeasurementMode.SIMULTANEOUS)
        assert report.best_fidelity == pytest.approx(1.0, abs=1e-12)


def test_optimization_report_to_dict(calibrated):
    g = gate_catalog("not")
    report = optimize_schedule(
        g, g.reference_input, MeasurementMode.SIMULTANEOUS, (15.0, 16.0), calibrated, step=0.25
    )
    payload = report.to_dict()
    assert payload["mode"] == "simultaneous"
    assert payload["window"] == [15.0, 16.0]
    assert payload["grid_step"] == 0.25
    assert payload["boundary"] is False
    assert "t_gap" in payload["best_schedule"]
