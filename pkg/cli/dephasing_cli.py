#!/usr/bin/env python3
"""
dephase CLI - Command Line Interface

Terminal interface for the collective-dephasing simulator. Every command
writes a CSV or JSON data file (stdout by default) and logs to stderr.
"""

import sys
sys.path.insert(0, str(__file__).rsplit('/', 2)[0])  # Add project root to path

import argparse
import logging
from typing import Any, Callable, Dict, List, Optional

import numpy as np
from pythonjsonlogger.json import JsonFormatter
from rich.console import Console
from rich.logging import RichHandler

from libs.dephasing_exceptions import ConfigurationError, DephasingError
from libs.reporting import ReportGenerator
from services.config import RunConfig, get_settings, load_bath_profile, load_run_config
from services.dephasing_core import __version__
from services.dephasing_core.bath import (
    BathParams,
    classify_regime,
    gamma_closed,
    gamma_thermal,
    theta_closed,
)
from services.dephasing_core.dephasing_channel import (
    CompositionConvention,
    MeasuredQubitHandling,
)
from services.dephasing_core.fidelity import closed_form_cluster, fidelity_curve
from services.dephasing_core.mbqc import (
    GateSpec,
    MeasurementMode,
    MeasurementSchedule,
    enumerate_branches,
    gate_catalog,
    gate_fidelity_curve,
    run_gate,
)
from services.dephasing_core.reproduction import reproduce_paper
from services.dephasing_core.scheduler import find_extrema, optimize_schedule
from services.dephasing_core.states import (
    InputQubit,
    oscillation_condition,
    post_first_measurement,
    state_from_json,
)

console = Console(stderr=True)

DEFAULT_GRID_COUNT = 1001
# reproduce-paper: an asserted acceptance check failed (report still written)
ACCEPTANCE_FAILED = 5
MODE_ALIASES = {
    "distinct": MeasurementMode.DISTINCT_TIMES,
    "distinct_times": MeasurementMode.DISTINCT_TIMES,
    "distinct-times": MeasurementMode.DISTINCT_TIMES,
    "simultaneous": MeasurementMode.SIMULTANEOUS,
}

# flags that map one-to-one onto RunConfig fields
CONFIG_FLAGS = (
    "profile", "eta", "omega_c", "beta_hbar", "gate", "euler_angles", "input", "alpha", "beta",
    "mode", "times", "t_gap", "delta", "outcome_branch", "grid", "window", "step", "refine_tol",
    "convention", "measured_qubits", "format", "output",
)


# --- flag parsers -------------------------------------------------------------


def float_list(count: Optional[int] = None) -> Callable[[str], List[float]]:
    def parse(text: str) -> List[float]:
        try:
            values = [float(v) for v in text.split(",")]
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected comma-separated numbers: {text!r}")
        if count is not None and len(values) != count:
            raise argparse.ArgumentTypeError(f"expected {count} values, got {len(values)}")
        return values
    return parse


def complex_value(text: str) -> List[float]:
    """'0.6', '0.6+0.8j' -> [re, im]"""
    try:
        z = complex(text.replace(" ", ""))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}")
    return [z.real, z.imag]


def branch_bits(text: str) -> List[int]:
    bits = text.replace(",", "")
    if len(bits) != 4 or set(bits) - {"0", "1"}:
        raise argparse.ArgumentTypeError(f"branch must be four bits such as 0000: {text!r}")
    return [int(b) for b in bits]


def grid_spec(text: str) -> str:
    parse_grid(text)
    return text


def parse_grid(text: str) -> np.ndarray:
    """'start:stop[:count]' -> evenly spaced times (count defaults to 1001)"""
    parts = text.split(":")
    try:
        if len(parts) not in (2, 3):
            raise ValueError
        start, stop = float(parts[0]), float(parts[1])
        count = int(parts[2]) if len(parts) == 3 else DEFAULT_GRID_COUNT
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must be start:stop[:count], got {text!r}")
    if start < 0 or stop < start or count < 1:
        raise argparse.ArgumentTypeError(f"grid needs 0 <= start <= stop and count >= 1: {text!r}")
    return np.linspace(start, stop, count)


class DephasingCLI:
    """dephase Command Line Interface"""

    def __init__(self):
        self.settings = get_settings()
        self.report_generator = ReportGenerator(
            output_dir=self.settings.DEPHASE_OUTPUT_DIR or None,
            console=console,
            package_version=__version__,
        )
        self.logger = logging.getLogger(__name__)

    def setup_logging(self, level: str, fmt: str):
        """Install the single stderr handler (rich console or JSON lines)"""
        if fmt == "json":
            handler = logging.StreamHandler(sys.stderr)
            handler.setFormatter(
                JsonFormatter("%(asctime)s %(levelname)s %(name)s %(message)s")
            )
        else:
            handler = RichHandler(rich_tracebacks=True, console=console, show_path=False)
        logging.basicConfig(
            level=getattr(logging, level.upper(), logging.INFO),
            format="%(message)s",
            handlers=[handler],
            force=True,
        )

    def create_parser(self) -> argparse.ArgumentParser:
        """Create argument parser"""
        common = argparse.ArgumentParser(add_help=False)
        common.add_argument('--profile', help='Bath profile from configs/bath-profiles')
        common.add_argument('--config', help='Run config file (JSON, or YAML by suffix)')
        common.add_argument('--output', help='Output file ("-" for stdout)')
        common.add_argument('--log-level', help='DEBUG, INFO, WARNING, ERROR')
        common.add_argument('--log-format', choices=['rich', 'json'], help='Log format')
        common.add_argument('--eta', type=float, help='Coupling strength')
        common.add_argument('--omega-c', type=float, help='Cutoff frequency')
        common.add_argument('--beta-hbar', help='Thermal time hbar/k_B T ("inf" for T = 0)')
        common.add_argument(
            '--convention',
            choices=['divisible', 'fresh-bath'],
            help='Interval composition convention (default: divisible)'
        )
        common.add_argument(
            '--measured-qubits',
            choices=['remove', 'retain'],
            help='Measured qubits leave the register or stay in it (default: remove)'
        )

        parser = argparse.ArgumentParser(
            prog='dephase',
            description='dephase - collective dephasing and MBQC gate fidelities',
            formatter_class=argparse.RawDescriptionHelpFormatter,
            epilog="""
Examples:
  # Decoherence functions
  dephase decoherence --eta 1e-3 --omega-c 100 --beta-hbar 1 --grid 0:50:5000

  # Cluster-state fidelity, engine against closed form
  dephase state-fidelity --alpha 1 --grid 0:50

  # One gate run
  dephase gate --gate not --input 0 --times 6,8,10

  # Best waiting time
  dephase optimize --gate phase --input plus --mode simultaneous --window 1,20

  # Full acceptance table
  dephase reproduce-paper --output results/reproduction.json
            """
        )
        parser.add_argument('--version', action='version', version=f'dephase {__version__}')
        subparsers = parser.add_subparsers(dest='command', help='Commands')

        def gate_flags(p: argparse.ArgumentParser):
            p.add_argument('--gate', help='not, hadamard, phase or euler')
            p.add_argument('--euler', dest='euler_angles', type=float_list(3),
                           help='Euler angles xi,eta,zeta for --gate euler')
            p.add_argument('--input', help='Input tag: 0, 1, plus, minus, plus_y, minus_y')
            p.add_argument('--alpha', type=complex_value, help='Input amplitude of |0>')
            p.add_argument('--beta', type=complex_value, help='Input amplitude of |1>')

        def output_format(p: argparse.ArgumentParser):
            p.add_argument('--format', choices=['csv', 'json'], help='Data format (default: csv)')

        # Decoherence command
        decoherence = subparsers.add_parser(
            'decoherence', parents=[common], help='Gamma(t), Theta(t) and regime on a grid'
        )
        decoherence.add_argument('--grid', type=grid_spec, help='start:stop[:count]')
        output_format(decoherence)

        # State fidelity command
        state = subparsers.add_parser(
            'state-fidelity', parents=[common],
            help='Fidelity of the state left after the first measurement'
        )
        state.add_argument('--input', help='Input tag')
        state.add_argument('--alpha', type=complex_value, help='Input amplitude of |0>')
        state.add_argument('--beta', type=complex_value, help='Input amplitude of |1>')
        state.add_argument('--grid', type=grid_spec, help='start:stop[:count]')
        output_format(state)

        # Gate command
        gate = subparsers.add_parser('gate', parents=[common], help='Run one MBQC gate')
        gate_flags(gate)
        gate.add_argument('--times', type=float_list(3), help='t1,t2,t3 (distinct times)')
        gate.add_argument('--t-gap', type=float, help='Single waiting time (simultaneous)')
        gate.add_argument('--branch', dest='outcome_branch', type=branch_bits,
                          help='Outcome bits of qubits 1-4 (default 0000)')

        # Gate curve command
        curve = subparsers.add_parser(
            'gate-curve', parents=[common], help='Gate fidelity on a time grid'
        )
        gate_flags(curve)
        curve.add_argument('--mode', help='simultaneous or distinct_times')
        curve.add_argument('--grid', type=grid_spec, help='start:stop[:count]')
        curve.add_argument('--delta', type=float, help='Spacing of (t-delta, t, t+delta)')
        output_format(curve)

        # Branches command
        branches = subparsers.add_parser(
            'branches', parents=[common], help='All 16 outcome branches of one schedule'
        )
        gate_flags(branches)
        branches.add_argument('--times', type=float_list(3), help='t1,t2,t3')
        branches.add_argument('--t-gap', type=float, help='Single waiting time')

        # Optimize command
        opt = subparsers.add_parser(
            'optimize', parents=[common], help='Search the best measurement schedule'
        )
        gate_flags(opt)
        opt.add_argument('--mode', help='simultaneous or distinct_times')
        opt.add_argument('--window', type=float_list(2), help='t_lo,t_hi')
        opt.add_argument('--step', type=float, help='Coarse grid step')
        opt.add_argument('--refine-tol', type=float, help='Refinement time tolerance')

        # Extrema command
        extrema = subparsers.add_parser(
            'extrema', parents=[common], help='Peaks and valleys of a fidelity curve'
        )
        gate_flags(extrema)
        extrema.add_argument('--target', choices=['cluster', 'gate'], default='cluster',
                             help='Cluster-state fidelity or a gate fidelity curve')
        extrema.add_argument('--mode', help='simultaneous or distinct_times (gate target)')
        extrema.add_argument('--grid', type=grid_spec, help='start:stop[:count]')
        extrema.add_argument('--refine-tol', type=float, help='Refinement time tolerance')

        # Check oscillation command
        check = subparsers.add_parser(
            'check-oscillation', parents=[common],
            help='Necessary condition for non-monotonic fidelity'
        )
        check.add_argument('state_file', help='State JSON {"n_qubits", "amplitudes"}')

        # Reproduce command
        reproduce = subparsers.add_parser(
            'reproduce-paper', parents=[common], help='Run the acceptance table'
        )
        reproduce.add_argument('--tolerance', type=float, default=0.03,
                               help='Tolerance on quoted gate fidelities (default: 0.03)')

        return parser

    # --- configuration --------------------------------------------------------

    def build_config(self, args: argparse.Namespace) -> RunConfig:
        """File config (if any) overridden by flags"""
        base = load_run_config(args.config) if args.config else RunConfig()
        overrides = {name: getattr(args, name, None) for name in CONFIG_FLAGS}
        return base.merged(overrides)

    def _mode(self, config: RunConfig, default: MeasurementMode) -> MeasurementMode:
        if config.mode is None:
            return default
        mode = MODE_ALIASES.get(config.mode.lower())
        if mode is None:
            raise ConfigurationError("BAD_MODE", f"unknown mode {config.mode!r}")
        return mode

    def _gate(self, config: RunConfig) -> GateSpec:
        if config.gate is None:
            raise ConfigurationError("BAD_CONFIG", "no gate given (--gate)")
        return gate_catalog(config.gate, config.euler_angles)

    def _conventions(self, config: RunConfig) -> Dict[str, Any]:
        return {
            "convention": CompositionConvention(config.convention),
            "handling": MeasuredQubitHandling(config.measured_qubits),
        }

    def _schedule(self, config: RunConfig) -> MeasurementSchedule:
        extra = self._conventions(config)
        if config.outcome_branch is not None:
            extra["outcome_branch"] = tuple(config.outcome_branch)
        if config.t_gap is not None:
            return MeasurementSchedule.simultaneous(config.t_gap, **extra)
        if config.times is not None:
            return MeasurementSchedule.distinct(*config.times, **extra)
        raise ConfigurationError("BAD_CONFIG", "no schedule given (--times or --t-gap)")

    def _grid(self, config: RunConfig, default: str) -> np.ndarray:
        try:
            return parse_grid(config.grid or default)
        except argparse.ArgumentTypeError as e:
            raise ConfigurationError("BAD_GRID", str(e))

    def _write_table(self, command: str, config: RunConfig, p: BathParams,
                     header: List[str], rows: List[List[Any]]):
        fmt = config.format or "csv"
        destination = self.report_generator.resolve_destination(config.output, command, fmt)
        if fmt == "json":
            payload = {name: [row[i] for row in rows] for i, name in enumerate(header)}
            self.report_generator.write_json(payload, destination)
        else:
            self.report_generator.write_csv(header, rows, destination)
        self.report_generator.write_metadata(
            destination, command, config.model_dump(exclude_none=True), p.to_dict()
        )

    def _write_json(self, command: str, config: RunConfig, p: Optional[BathParams], payload: Any):
        destination = self.report_generator.resolve_destination(config.output, command, "json")
        self.report_generator.write_json(payload, destination)
        self.report_generator.write_metadata(
            destination, command, config.model_dump(exclude_none=True),
            p.to_dict() if p else None,
        )

    # --- commands ---------------------------------------------------------------

    def cmd_decoherence(self, config: RunConfig) -> int:
        p = config.bath_params(self.settings)
        grid = self._grid(config, "0:50:5001")
        gamma, theta = gamma_closed(grid, p), theta_closed(grid, p)
        rows = [
            [float(t), float(g), float(th), classify_regime(float(t), p).value]
            for t, g, th in zip(grid, gamma, theta)
        ]
        if p.zero_temperature:
            self.logger.debug(f"thermal term is zero: {float(np.max(gamma_thermal(grid, p)))}")
        self._write_table("decoherence", config, p, ["t", "gamma", "theta", "regime"], rows)
        return 0

    def cmd_state_fidelity(self, config: RunConfig) -> int:
        p = config.bath_params(self.settings)
        q = config.input_qubit(default=InputQubit.from_tag("zero"))
        grid = self._grid(config, "0:50")
        curve = fidelity_curve(post_first_measurement(q), grid, p)
        rows = [
            [t, engine, closed_form_cluster(q, t, p)] for t, engine in curve.rows()
        ]
        worst = max((abs(r[1] - r[2]) for r in rows), default=0.0)
        self.logger.info(f"engine vs closed form: max deviation {worst:.2e} ({len(rows)} points)")
        self._write_table(
            "state-fidelity", config, p, ["t", "fidelity_engine", "fidelity_closed_form"], rows
        )
        return 0

    def cmd_gate(self, config: RunConfig) -> int:
        p = config.bath_params(self.settings)
        g = self._gate(config)
        q = config.input_qubit(default=g.reference_input)
        result = run_gate(g, q, self._schedule(config), p)
        self._write_json("gate", config, p, result.to_dict())
        self.report_generator.render_summary(f"{g.name.value} gate", {
            "schedule": result.schedule.to_dict(),
            "branch probability": result.branch_probability,
            "gate fidelity": result.gate_fidelity,
        })
        return 0

    def cmd_gate_curve(self, config: RunConfig) -> int:
        p = config.bath_params(self.settings)
        g = self._gate(config)
        q = config.input_qubit(default=g.reference_input)
        curve = gate_fidelity_curve(
            g, q, self._mode(config, MeasurementMode.SIMULTANEOUS), self._grid(config, "0:50"),
            p, delta=config.delta, **self._conventions(config)
        )
        rows = [list(row) for row in curve.rows()]
        self._write_table("gate-curve", config, p, ["t", "gate_fidelity"], rows)
        return 0

    def cmd_branches(self, config: RunConfig) -> int:
        p = config.bath_params(self.settings)
        g = self._gate(config)
        q = config.input_qubit(default=g.reference_input)
        schedule = self._schedule(config)
        outcomes = enumerate_branches(g, q, schedule, p)
        total = sum(o.probability for o in outcomes)
        self.logger.info(f"16 branches, total probability {total:.12f}")
        self._write_json("branches", config, p, {
            "gate": g.to_dict(),
            "schedule": schedule.to_dict(),
            "branches": [o.to_dict() for o in outcomes],
        })
        return 0

    def cmd_optimize(self, config: RunConfig) -> int:
        p = config.bath_params(self.settings)
        g = self._gate(config)
        q = config.input_qubit(default=g.reference_input)
        if config.window is None:
            raise ConfigurationError("BAD_CONFIG", "no window given (--window t_lo,t_hi)")
        report = optimize_schedule(
            g, q, self._mode(config, MeasurementMode.SIMULTANEOUS), config.window, p,
            step=config.step or self.settings.SCHEDULER_STEP,
            refine_tol=config.refine_tol or self.settings.SCHEDULER_REFINE_TOL,
            **self._conventions(config),
        )
        self._write_json("optimize", config, p, report.to_dict())
        self.report_generator.render_summary("Optimum", {
            "schedule": list(report.best_schedule.times),
            "gate fidelity": report.best_fidelity,
            "evaluations": report.evaluations,
        })
        return 0

    def cmd_extrema(self, config: RunConfig, target: str) -> int:
        p = config.bath_params(self.settings)
        grid = self._grid(config, "0:50")
        if target == "cluster":
            q = config.input_qubit(default=InputQubit.from_tag("zero"))
            curve = fidelity_curve(post_first_measurement(q), grid, p)
        else:
            g = self._gate(config)
            q = config.input_qubit(default=g.reference_input)
            curve = gate_fidelity_curve(
                g, q, self._mode(config, MeasurementMode.SIMULTANEOUS), grid, p,
                delta=config.delta, **self._conventions(config)
            )
        report = find_extrema(curve, config.refine_tol or self.settings.SCHEDULER_REFINE_TOL)
        self._write_json("extrema", config, p, report.to_dict())
        return 0

    def cmd_check_oscillation(self, config: RunConfig, state_file: str) -> int:
        try:
            with open(state_file, "r", encoding="utf-8") as f:
                psi = state_from_json(f.read())
        except OSError as e:
            raise ConfigurationError("BAD_STATE_FILE", f"cannot read {state_file}: {e}")
        verdict = oscillation_condition(psi)
        self._write_json("check-oscillation", config, None, verdict.to_dict())
        return 0

    def cmd_reproduce_paper(self, config: RunConfig, tolerance: float) -> int:
        p = config.bath_params(self.settings)
        try:
            literal = load_bath_profile("literal-thermal", self.settings.profiles_dir)
        except ConfigurationError:
            self.logger.warning("literal-thermal profile not found; skipping its report")
            literal = None
        report = reproduce_paper(p, tolerance=tolerance, literal_thermal=literal)
        payload = report.to_dict()
        self._write_json("reproduce-paper", config, p, payload)
        self.report_generator.render_acceptance(payload)
        return 0 if report.passed else ACCEPTANCE_FAILED

    def run(self, argv=None) -> int:
        """Main entry point; returns the process exit status"""
        parser = self.create_parser()
        try:
            args = parser.parse_args(argv)
        except SystemExit as e:
            return int(e.code or 0)

        self.setup_logging(
            getattr(args, "log_level", None) or self.settings.LOG_LEVEL,
            getattr(args, "log_format", None) or self.settings.LOG_FORMAT,
        )
        if not args.command:
            parser.print_help(sys.stderr)
            return 2

        cmd_map = {
            'decoherence': lambda c: self.cmd_decoherence(c),
            'state-fidelity': lambda c: self.cmd_state_fidelity(c),
            'gate': lambda c: self.cmd_gate(c),
            'gate-curve': lambda c: self.cmd_gate_curve(c),
            'branches': lambda c: self.cmd_branches(c),
            'optimize': lambda c: self.cmd_optimize(c),
            'extrema': lambda c: self.cmd_extrema(c, args.target),
            'check-oscillation': lambda c: self.cmd_check_oscillation(c, args.state_file),
            'reproduce-paper': lambda c: self.cmd_reproduce_paper(c, args.tolerance),
        }

        try:
            config = self.build_config(args)
            return cmd_map[args.command](config)
        except DephasingError as e:
            self.logger.error(str(e))
            return e.exit_code


def main():
    """CLI entry point"""
    cli = DephasingCLI()
    try:
        sys.exit(cli.run())
    except KeyboardInterrupt:
        console.print("\n[yellow]Interrupted by user[/yellow]")
        sys.exit(130)
    except Exception as e:
        logging.getLogger(__name__).exception("Unexpected error")
        console.print(f"[bold red]Error:[/bold red] {str(e)}")
        sys.exit(1)


if __name__ == '__main__':
    main()
