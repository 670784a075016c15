from __future__ import annotations

import csv
import io
import json
import sys
from collections.abc import Sequence
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Any, TextIO

from ..config import QuadConfig
from ..log import get_logger
from ..planner import ErrorBoundReport, QuadraturePlan
from .rate_fit import RateFit
from .study_service import CSV_FIELDS, StudyRecord

logger = get_logger("emit")


@dataclass
class EmitError(Exception):
    message: str
    path: str = ""
    cause: str = ""
    exit_code: int = 4

    def __str__(self) -> str:
        if self.path:
            return f"{self.message}: {self.path} ({self.cause})"
        return self.message


class OutputFormat(str, Enum):
    CSV = "csv"
    JSON = "json"

    @classmethod
    def from_str(cls, value: "OutputFormat | str") -> "OutputFormat":
        if isinstance(value, OutputFormat):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise EmitError(f"Unsupported output format: {value}")


def _payload_dict(payload: Any) -> Any:
    if isinstance(payload, tuple) and len(payload) == 2:
        plan, report = payload
        if isinstance(plan, QuadraturePlan) and isinstance(report, ErrorBoundReport):
            return {"plan": plan.to_dict(), "report": report.to_dict()}
    if isinstance(payload, (list, tuple)):
        return [_payload_dict(item) for item in payload]
    if hasattr(payload, "to_dict"):
        return payload.to_dict()
    if isinstance(payload, dict):
        return payload
    raise EmitError(f"cannot serialize {type(payload).__name__}")


def _flatten(payload: dict[str, Any], prefix: str = "") -> dict[str, str]:
    flat: dict[str, str] = {}
    for key, value in payload.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            flat.update(_flatten(value, f"{name}."))
        elif isinstance(value, list):
            flat[name] = ";".join(str(item) for item in value)
        else:
            flat[name] = "" if value is None else str(value)
    return flat


def render_json(payload: Any) -> str:
    return json.dumps(_payload_dict(payload), indent=2, ensure_ascii=False) + "\n"


def render_csv(payload: Any) -> str:
    """Study records use the fixed column set; anything else becomes key/value rows."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    if isinstance(payload, (list, tuple)) and all(
        isinstance(item, StudyRecord) for item in payload
    ):
        writer.writerow(CSV_FIELDS)
        for record in payload:
            writer.writerow(record.csv_row())
        return buffer.getvalue()

    data = _payload_dict(payload)
    rows = data if isinstance(data, list) else [data]
    flat_rows = [_flatten(row) for row in rows]
    header: list[str] = []
    for row in flat_rows:
        header.extend(key for key in row if key not in header)
    writer.writerow(header)
    for row in flat_rows:
        writer.writerow([row.get(key, "") for key in header])
    return buffer.getvalue()


def render(payload: Any, fmt: OutputFormat | str) -> str:
    if OutputFormat.from_str(fmt) is OutputFormat.CSV:
        return render_csv(payload)
    return render_json(payload)


def emit(
    payload: StudyRecord | Sequence[StudyRecord] | RateFit | Any,
    fmt: OutputFormat | str,
    path: Path | str | None = None,
    *,
    stream: TextIO | None = None,
) -> None:
    """Write ``payload`` to ``path``, or to ``stream`` (stdout) without a path."""
    text = render(payload, fmt)
    if path is None:
        (stream or sys.stdout).write(text)
        return
    target = Path(path)
    try:
        target.parent.mkdir(parents=True, exist_ok=True)
        with target.open("w", encoding="utf-8", newline="") as handle:
            handle.write(text)
    except OSError as exc:
        raise EmitError(
            "failed to write output", path=str(target), cause=str(exc)
        ) from exc
    logger.info("[emit] wrote %s (%d bytes)", target, len(text.encode("utf-8")))


class EmitService:
    """Resolves bare file names against the configured output directory."""

    def __init__(self, config: QuadConfig) -> None:
        self.config = config

    def resolve_path(self, path: Path | str) -> Path:
        target = Path(path)
        if target.is_absolute() or target.parent != Path("."):
            return target
        return self.config.output_dir / target

    def emit(
        self,
        payload: Any,
        fmt: OutputFormat | str,
        path: Path | str | None = None,
        *,
        stream: TextIO | None = None,
    ) -> Path | None:
        if path is None:
            emit(payload, fmt, None, stream=stream)
            return None
        target = self.resolve_path(path)
        emit(payload, fmt, target)
        return target
