"""Output files with a provenance header block."""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, float) and obj != obj:
        return None
    if isinstance(obj, float) and obj in (float("inf"), float("-inf")):
        return str(obj)
    return obj


def header_lines(header: dict) -> str:
    return "".join(f"# {k}: {v}\n" for k, v in header.items())


def write_csv(path: Path, header: dict, columns: Sequence[str], rows: Iterable[Sequence]) -> Path:
    buf = io.StringIO()
    buf.write(header_lines(header))
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    path.write_text(buf.getvalue())
    return path


def write_text(path: Path, header: dict, body: str) -> Path:
    path.write_text(header_lines(header) + body)
    return path


def write_json(path: Path, header: dict, payload: dict) -> Path:
    data = {"header": header, **_jsonable(payload)}
    path.write_text(json.dumps(data, indent=2, sort_keys=True, allow_nan=False) + "\n")
    return path


def read_csv_body(path: Path) -> list[list[str]]:
    """Rows of a headered CSV file, skipping the ``#`` block."""
    lines = [ln for ln in Path(path).read_text().splitlines() if not ln.startswith("#")]
    return list(csv.reader(lines))
