"""Row model and document emitters shared by the CLI commands.

JSON is the normative format; CSV and Markdown render the same row model.
Every number entering a document is rounded to 12 significant digits first,
so the pass flags stored in a document are consistent with the numbers a
reader can see, and parsing an emitted JSON document reproduces it exactly.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from typing import Any

SCHEMA_VERSION = "1"

FORMATS = ("json", "csv", "md")

# row provenance: a constant quoted at source precision, an exact internal
# identity, or a statistical Monte Carlo bound
ROW_SOURCES = ("paper", "identity", "mc")


def round_sig(value: float, digits: int = 12) -> float:
    """Round to the given number of significant digits."""
    return float(f"{float(value):.{digits}g}")


@dataclass(frozen=True)
class VerifyRow:
    """One named comparison: computed value against a reference."""

    name: str
    computed: float
    reference: float
    tolerance: float
    source: str
    passed: bool

    def as_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "computed": self.computed,
            "reference": self.reference,
            "tolerance": self.tolerance,
            "source": self.source,
            "pass": self.passed,
        }


def make_row(
    name: str, computed: float, reference: float, tolerance: float, source: str
) -> VerifyRow:
    """Build a row, rounding first so the stored pass flag matches the numbers."""
    if source not in ROW_SOURCES:
        raise ValueError(f"source must be one of {ROW_SOURCES}, got {source!r}")
    computed = round_sig(computed)
    reference = round_sig(reference)
    tolerance = round_sig(tolerance)
    return VerifyRow(
        name=name,
        computed=computed,
        reference=reference,
        tolerance=tolerance,
        source=source,
        passed=abs(computed - reference) <= tolerance,
    )


def _rounded(value: Any) -> Any:
    """Round every float inside a JSON-like structure to 12 significant digits."""
    if isinstance(value, bool):
        return value
    if isinstance(value, float):
        return round_sig(value)
    if isinstance(value, dict):
        return {k: _rounded(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_rounded(v) for v in value]
    return value


@dataclass(frozen=True)
class ReportDocument:
    """Either a row table (verify, mc) or a trace object (demo, encode, decode)."""

    command: str
    params: dict[str, Any]
    rows: tuple[VerifyRow, ...] | None = None
    trace: dict[str, Any] | None = None
    schema_version: str = SCHEMA_VERSION

    def __post_init__(self) -> None:
        if (self.rows is None) == (self.trace is None):
            raise ValueError("a document carries either rows or a trace, not both")

    @property
    def overall_pass(self) -> bool | None:
        if self.rows is None:
            return None
        return all(row.passed for row in self.rows)

    def as_dict(self) -> dict[str, Any]:
        doc: dict[str, Any] = {
            "schema_version": self.schema_version,
            "command": self.command,
            "params": _rounded(self.params),
        }
        if self.rows is not None:
            doc["rows"] = [row.as_dict() for row in self.rows]
            doc["overall_pass"] = self.overall_pass
        else:
            doc["trace"] = _rounded(self.trace)
        return doc


def amplitude_pairs(amplitudes) -> list[list[float]]:
    """Serialize complex amplitudes as [re, im] pairs."""
    return [[float(a.real), float(a.imag)] for a in amplitudes]


def _format_number(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def to_json(document: ReportDocument) -> str:
    return json.dumps(document.as_dict(), indent=2) + "\n"


def to_csv(document: ReportDocument) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    if document.rows is not None:
        writer.writerow(["name", "computed", "reference", "tolerance", "source", "pass"])
        for row in document.rows:
            writer.writerow(
                [
                    row.name,
                    _format_number(row.computed),
                    _format_number(row.reference),
                    _format_number(row.tolerance),
                    row.source,
                    _format_number(row.passed),
                ]
            )
    else:
        writer.writerow(["key", "value"])
        for key, value in _flatten(_rounded(document.trace)):
            writer.writerow([key, value])
    return buffer.getvalue()


def _flatten(value: Any, prefix: str = ""):
    if isinstance(value, dict):
        for key, sub in value.items():
            yield from _flatten(sub, f"{prefix}{key}." if prefix else f"{key}.")
    elif isinstance(value, list):
        yield (prefix.rstrip("."), json.dumps(value))
    else:
        yield (prefix.rstrip("."), _format_number(value))


def to_markdown(document: ReportDocument) -> str:
    lines = [f"# {document.command}", ""]
    if document.rows is not None:
        lines.append("| name | computed | reference | tolerance | source | pass |")
        lines.append("| --- | --- | --- | --- | --- | --- |")
        for row in document.rows:
            lines.append(
                "| {} | {} | {} | {} | {} | {} |".format(
                    row.name,
                    _format_number(row.computed),
                    _format_number(row.reference),
                    _format_number(row.tolerance),
                    row.source,
                    _format_number(row.passed),
                )
            )
        lines.append("")
        lines.append(f"overall pass: {_format_number(document.overall_pass)}")
    else:
        lines.append("| key | value |")
        lines.append("| --- | --- |")
        for key, value in _flatten(_rounded(document.trace)):
            lines.append(f"| {key} | {value} |")
    return "\n".join(lines) + "\n"


def render(document: ReportDocument, fmt: str) -> str:
    if fmt == "json":
        return to_json(document)
    if fmt == "csv":
        return to_csv(document)
    if fmt == "md":
        return to_markdown(document)
    raise ValueError(f"unknown format {fmt!r}")
