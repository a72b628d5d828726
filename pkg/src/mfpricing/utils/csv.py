"""Flat-file output: comma separated, LF line endings, reals with 17 significant
digits, metadata as leading `# key=value` lines.
"""

from __future__ import annotations

import io
import math
from collections.abc import Mapping
from pathlib import Path
from typing import Any

import pandas as pd

__all__ = ["FLOAT_FORMAT", "format_real", "read_csv", "render_csv", "write_csv"]

FLOAT_FORMAT = "%.17g"


def format_real(value: Any) -> str:
    """Render a metadata value the way the table cells are rendered."""
    if isinstance(value, bool) or value is None:
        return str(value)
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return FLOAT_FORMAT % value
    return str(value)


def render_csv(frame: pd.DataFrame, metadata: Mapping[str, Any] | None = None) -> str:
    header = "".join(f"# {key}={format_real(value)}\n" for key, value in (metadata or {}).items())
    body = frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return header + body


def write_csv(path: Path | str, frame: pd.DataFrame, metadata: Mapping[str, Any] | None = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    # newline="" keeps LF on every platform
    with path.open("w", encoding="utf-8", newline="") as fh:
        fh.write(render_csv(frame, metadata))
    return path


def read_csv(path: Path | str) -> tuple[pd.DataFrame, dict[str, str]]:
    """Inverse of `write_csv`. Metadata values are returned as strings."""
    metadata: dict[str, str] = {}
    lines = []
    for line in Path(path).read_text(encoding="utf-8").splitlines(keepends=True):
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition("=")
            metadata[key.strip()] = value.strip()
        else:
            lines.append(line)
    return pd.read_csv(io.StringIO("".join(lines))), metadata
