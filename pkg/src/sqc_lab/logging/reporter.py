"""Report assembly, serialization and exit codes for check runs."""

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from rich.console import Console
from rich.table import Table

from sqc_lab import ARTIFACT_VERSION
from sqc_lab.engine.dump import DUMP_COLUMNS, format_vector
from sqc_lab.engine.estimators import Witness

PASS = "pass"
FAIL = "fail"
HYPOTHESIS_FAILURE = "hypothesis-failure"
STATUSES = (PASS, FAIL, HYPOTHESIS_FAILURE)

REPORT_FORMATS = ("json", "csv")


@dataclass
class CheckRecord:
    """Result of a single check as it appears in a report."""

    name: str
    params: dict[str, float]
    status: str  # pass | fail | hypothesis-failure
    sigma: float | None
    witness: Witness | None
    n_samples: int
    seed: int
    runtime_ms: float
    details: dict[str, Any] = field(default_factory=dict)

    def to_json(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "params": self.params,
            "status": self.status,
            "sigma": self.sigma,
            "witness": None if self.witness is None else self.witness.to_json(),
            "n_samples": self.n_samples,
            "seed": self.seed,
            "runtime_ms": self.runtime_ms,
            "details": self.details,
        }

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "CheckRecord":
        if data["status"] not in STATUSES:
            raise ValueError(f"Unknown check status: {data['status']}")
        return cls(
            name=data["name"],
            params={key: float(value) for key, value in data["params"].items()},
            status=data["status"],
            sigma=None if data["sigma"] is None else float(data["sigma"]),
            witness=None if data["witness"] is None else Witness.from_json(data["witness"]),
            n_samples=int(data["n_samples"]),
            seed=int(data["seed"]),
            runtime_ms=float(data["runtime_ms"]),
            details=data.get("details", {}),
        )


@dataclass
class Report:
    suite: str
    checks: list[CheckRecord] = field(default_factory=list)
    artifact_version: str = ARTIFACT_VERSION

    def to_json(self) -> dict[str, Any]:
        return {
            "suite": self.suite,
            "artifact_version": self.artifact_version,
            "checks": [check.to_json() for check in self.checks],
        }


def to_builtin(value: Any) -> Any:
    """json.dumps fallback for numpy scalars and arrays."""
    if isinstance(value, np.generic | np.ndarray):
        return value.tolist()
    if isinstance(value, tuple):
        return list(value)
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")


def witness_row(witness: Witness) -> dict[str, Any]:
    f_x, f_y, f_mid = witness.f_values
    return {
        "x": witness.x.tolist(),
        "y": witness.y.tolist(),
        "lambda": witness.lam,
        "f_x": f_x,
        "f_y": f_y,
        "f_mid": f_mid,
        "defect": witness.defect,
        "ratio": witness.ratio,
    }


def report_to_csv(report: Report) -> str:
    """One row per check witness: the check name, then the defect-dump columns."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(("name", *DUMP_COLUMNS))
    for check in report.checks:
        if check.witness is None:
            continue
        row = witness_row(check.witness)
        writer.writerow(
            [check.name]
            + [format_vector(row[c]) if isinstance(row[c], list) else repr(row[c]) for c in DUMP_COLUMNS]
        )
    return buffer.getvalue()


def emit_report(report: Report, fmt: str = "json") -> bytes:
    """Serialize a report as UTF-8 JSON or CSV.

    Args:
        report: The report.
        fmt: "json" or "csv".

    Returns:
        The encoded report; identical inputs give identical bytes.

    Raises:
        ValueError: If fmt is not a known format.
    """
    if fmt == "json":
        text = json.dumps(report.to_json(), indent=2, ensure_ascii=False, default=to_builtin) + "\n"
    elif fmt == "csv":
        text = report_to_csv(report)
    else:
        raise ValueError(f"Unknown report format '{fmt}'; expected one of {', '.join(REPORT_FORMATS)}")
    return text.encode("utf-8")


def parse_report(data: bytes) -> Report:
    """Inverse of emit_report(report, "json")."""
    raw = json.loads(data.decode("utf-8"))
    return Report(
        suite=raw["suite"],
        artifact_version=raw["artifact_version"],
        checks=[CheckRecord.from_json(check) for check in raw["checks"]],
    )


def hypothesis_warnings(report: Report) -> list[str]:
    return [
        f"WARNING: {check.name}: theorem hypothesis fails empirically; conclusion checked on the empirical modulus"
        for check in report.checks
        if check.status == HYPOTHESIS_FAILURE
    ]


def exit_code(report: Report) -> int:
    """0 when no check fails (hypothesis failures included), 1 otherwise."""
    return 1 if any(check.status == FAIL for check in report.checks) else 0


def print_summary(report: Report, console: Console | None = None) -> None:
    """Print a table of check outcomes to stderr."""
    console = console or Console(stderr=True)
    table = Table(
        title=f"{report.suite} ({report.artifact_version})",
        show_header=True,
        header_style="bold magenta",
        border_style="bright_black",
        padding=(0, 1),
    )
    table.add_column("Check", style="cyan", min_width=24)
    table.add_column("Status", justify="center")
    table.add_column("σ", justify="right", style="yellow")
    table.add_column("Samples", justify="right", style="dim")
    table.add_column("Time", justify="right", style="dim")

    styles = {PASS: "green", FAIL: "bold red", HYPOTHESIS_FAILURE: "yellow"}
    for check in report.checks:
        table.add_row(
            check.name,
            f"[{styles[check.status]}]{check.status}[/]",
            "-" if check.sigma is None else f"{check.sigma:.6g}",
            str(check.n_samples),
            f"{check.runtime_ms:.0f}ms",
        )
    console.print(table)
