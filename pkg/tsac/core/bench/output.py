"""Atomic CSV/JSON writers and readers for run artifacts."""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import os
import tempfile
from collections.abc import Iterable
from pathlib import Path
from typing import Any

import numpy as np

from tsac.core.errors import OutputError
from tsac.core.sim.episode import CSV_HEADER, StepRecord

logger = logging.getLogger(__name__)


def atomic_write_text(path: Path, text: str) -> None:
    """
    Write text to a temporary file next to path, then rename it over path.

    Raises:
        OutputError: the directory or file could not be written.
    """
    tmp_name: str | None = None
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with tempfile.NamedTemporaryFile(
            "w", encoding="utf-8", dir=path.parent, prefix=f".{path.name}.", suffix=".tmp", delete=False
        ) as f:
            tmp_name = f.name
            f.write(text)
        os.replace(tmp_name, path)
    except OSError as e:
        if tmp_name is not None and os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise OutputError(f"cannot write {path}: {e}") from e
    logger.info("Wrote %s", path)


def jsonable(value: Any) -> Any:
    """Convert numpy values and non-finite floats into plain JSON values."""
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return jsonable(value.tolist())
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer, int)):
        return int(value)
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return value if math.isfinite(value) else None
    return value


def dump_json(data: Any) -> str:
    return json.dumps(jsonable(data), indent=2, sort_keys=True) + "\n"


def write_json(path: Path, data: Any) -> None:
    atomic_write_text(path, dump_json(data))


def steps_csv(records: Iterable[StepRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for record in records:
        writer.writerow(record.csv_row())
    return buf.getvalue()


def write_steps_csv(path: Path, records: Iterable[StepRecord]) -> None:
    atomic_write_text(path, steps_csv(records))


def step_dicts(records: Iterable[StepRecord]) -> list[dict[str, Any]]:
    return [dict(zip(CSV_HEADER, (r.t, r.cost, r.cum_regret, r.state_norm, r.policy_id,
                                  r.est_error, r.lambda_min_v, r.optimistic)))
            for r in records]


def read_json(path: Path) -> Any:
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except OSError as e:
        raise OutputError(f"cannot read {path}: {e}") from e


def read_regret_csv(path: Path) -> np.ndarray:
    """Cumulative regret column of a step CSV."""
    try:
        with open(path, "r", encoding="utf-8", newline="") as f:
            rows = list(csv.DictReader(f))
    except OSError as e:
        raise OutputError(f"cannot read {path}: {e}") from e
    return np.array([float(row["cum_regret"]) for row in rows])


def read_regret_curve(path: Path) -> np.ndarray:
    """Cumulative regret from a step CSV or a run JSON with embedded steps."""
    if path.suffix == ".csv":
        return read_regret_csv(path)
    data = read_json(path)
    steps = data.get("steps") if isinstance(data, dict) else None
    if not steps:
        raise OutputError(f"{path} has no per-step records")
    return np.array([float(s["cum_regret"]) for s in steps])
