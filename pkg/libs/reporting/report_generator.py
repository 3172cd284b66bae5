"""
Report Generator

Writes simulation results as CSV and JSON data files with a metadata sidecar,
and renders console summaries with rich.

Data files carry no timestamps, so equal inputs give byte-identical files.
"""

import csv
import io
import json
import logging
import math
import sys
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Union

from rich import box
from rich.console import Console
from rich.panel import Panel
from rich.table import Table

logger = logging.getLogger(__name__)

REPORT_VERSION = "1.0"


def format_float(x: Any) -> str:
    """Shortest round-trip text for a double; integers and strings pass through"""
    if isinstance(x, bool) or isinstance(x, str):
        return str(x)
    if isinstance(x, int):
        return str(x)
    value = float(x)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return repr(value)


class ReportGenerator:
    """
    Writes command output in the supported formats

    Supported formats:
    - CSV: header row, shortest round-trip floats
    - JSON: indent 2, trailing newline
    - Sidecar: <stem>.meta.json with command, arguments and a UTC timestamp
    """

    def __init__(
        self,
        output_dir: Optional[Union[str, Path]] = None,
        console: Optional[Console] = None,
        package_version: str = "unknown",
    ):
        """
        Initialize report generator

        Args:
            output_dir: Default directory for data files (None: stdout)
            console: Console for summaries (stderr by default)
            package_version: Version recorded in metadata sidecars
        """
        self.output_dir = Path(output_dir) if output_dir else None
        self.console = console or Console(stderr=True)
        self.package_version = package_version

    def resolve_destination(
        self, explicit: Optional[Union[str, Path]], command: str, suffix: str
    ) -> Optional[Path]:
        """
        Where a command's data goes

        Args:
            explicit: --output value, wins when given ("-" means stdout)
            command: Command name used as the file stem
            suffix: File suffix without dot

        Returns:
            Path, or None for stdout
        """
        if explicit:
            return None if str(explicit) == "-" else Path(explicit)
        if self.output_dir is not None:
            return self.output_dir / f"{command}.{suffix}"
        return None

    def _emit(self, text: str, destination: Optional[Path]) -> Optional[Path]:
        if destination is None:
            sys.stdout.write(text)
            sys.stdout.flush()
            return None
        destination.parent.mkdir(parents=True, exist_ok=True)
        with open(destination, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        logger.info(f"Wrote {destination}")
        return destination

    def write_csv(
        self,
        header: Sequence[str],
        rows: Iterable[Sequence[Any]],
        destination: Optional[Path] = None,
    ) -> Optional[Path]:
        """Write a header row and data rows; floats in shortest round-trip form"""
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_float(v) for v in row])
        return self._emit(buffer.getvalue(), destination)

    def write_json(self, payload: Any, destination: Optional[Path] = None) -> Optional[Path]:
        text = json.dumps(payload, indent=2, sort_keys=False, allow_nan=True) + "\n"
        return self._emit(text, destination)

    def write_metadata(
        self,
        destination: Optional[Path],
        command: str,
        arguments: Dict[str, Any],
        bath: Optional[Dict[str, Any]] = None,
    ) -> Optional[Path]:
        """Generate the <stem>.meta.json sidecar; nothing is written for stdout output"""
        if destination is None:
            return None
        metadata = {
            "command": command,
            "arguments": arguments,
            "bath": bath,
            "data_file": destination.name,
            "package_version": self.package_version,
            "report_version": REPORT_VERSION,
            "generated_at": datetime.now(timezone.utc).isoformat(),
        }
        sidecar = destination.with_name(f"{destination.stem}.meta.json")
        with open(sidecar, "w", encoding="utf-8") as f:
            json.dump(metadata, f, indent=2, default=str)
            f.write("\n")
        logger.debug(f"Wrote metadata {sidecar}")
        return sidecar

    def render_summary(self, title: str, mapping: Dict[str, Any]):
        lines = []
        for key, value in mapping.items():
            shown = format_float(value) if isinstance(value, float) else value
            lines.append(f"[bold]{key}:[/bold] {shown}")
        self.console.print(Panel.fit("\n".join(lines), title=title, border_style="cyan"))

    def render_acceptance(self, report: Dict[str, Any]):
        """Table of acceptance checks from an AcceptanceReport dictionary"""
        table = Table(title="Acceptance checks", box=box.SIMPLE_HEAVY)
        table.add_column("#", justify="right", style="dim")
        table.add_column("Check")
        table.add_column("Expected", justify="right")
        table.add_column("Observed", justify="right")
        table.add_column("Verdict", justify="center")

        for check in report["checks"]:
            table.add_row(*self._acceptance_row(check))
        self.console.print(table)

        if report.get("literal_thermal"):
            literal = Table(title="Literal thermal profile (reported only)", box=box.SIMPLE)
            literal.add_column("Check")
            literal.add_column("Quoted", justify="right")
            literal.add_column("Observed", justify="right")
            for check in report["literal_thermal"]:
                literal.add_row(check["name"], f"{check['expected']:.4g}",
                                f"{check['observed']:.4f}")
            self.console.print(literal)

        convention = report.get("convention") or "none"
        if report.get("flagged"):
            self.console.print(
                "[bold yellow]FLAGGED:[/bold yellow] no convention reproduces the NOT "
                "distinct-times table; positions checked instead of values"
            )
        for unmet in report.get("unmet", []):
            self.console.print(
                f"[bold red]UNMET:[/bold red] {unmet['name']}: expected "
                f"{unmet['expected']:.4g}, observed {unmet['observed']:.4g} "
                f"(off by {unmet['discrepancy']:+.3f})"
            )
        verdict = "[green]PASS[/green]" if report["passed"] else "[red]FAIL[/red]"
        self.console.print(f"Convention: [cyan]{convention}[/cyan]   Result: {verdict}")

    @staticmethod
    def _acceptance_row(check: Dict[str, Any]) -> List[str]:
        symbol = {"approx": "±", "le": "≤", "gt": ">", "lt": "<"}[check["comparison"]]
        expected = f"{check['expected']:.4g}"
        if check["comparison"] == "approx":
            expected += f" {symbol} {check['tolerance']:.2g}"
        elif check["comparison"] == "le":
            expected = f"{symbol} {check['expected'] + check['tolerance']:.4g}"
        else:
            expected = f"{symbol} {expected}"
        if not check["asserted"]:
            verdict = "[dim]info[/dim]"
        else:
            verdict = "[green]✓[/green]" if check["passed"] else "[red]✗[/red]"
        observed = check["observed"]
        shown = f"{observed:.4f}" if isinstance(observed, float) else str(observed)
        return [str(check["criterion"]), check["name"], expected, shown, verdict]
