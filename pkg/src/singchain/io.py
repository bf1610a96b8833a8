"""CSV and JSON helpers shared by the command line and the acceptance runner."""

from __future__ import annotations

import csv
import json
from collections.abc import Sequence
from pathlib import Path

import numpy as np

from .errors import ParameterError


def fmt(x: float) -> str:
    """17 significant digits, enough to round-trip a double."""
    return f"{float(x):.17g}"


def write_csv(path: str | Path, header: Sequence[str], columns: Sequence[np.ndarray]) -> None:
    cols = [np.asarray(c, float) for c in columns]
    if len(cols) != len(header) or len({len(c) for c in cols}) > 1:
        raise ParameterError("header and columns do not match")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in zip(*cols):
            w.writerow([fmt(v) for v in row])


def read_csv(path: str | Path, required: Sequence[str] = ()) -> dict[str, np.ndarray]:
    """Read a numeric CSV with a header row into named float columns."""
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise ParameterError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise ParameterError(f"{path} is empty")
    header = [h.strip() for h in rows[0]]
    missing = [r for r in required if r not in header]
    if missing:
        raise ParameterError(f"{path} lacks columns {missing}")
    try:
        data = np.array([[float(v) for v in row] for row in rows[1:] if row], float).reshape(-1, len(header))
    except ValueError as exc:
        raise ParameterError(f"{path}: malformed numeric data ({exc})") from exc
    return {h: data[:, i] for i, h in enumerate(header)}


def read_json(path: str | Path) -> dict:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ParameterError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParameterError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise ParameterError(f"{path}: expected a JSON object")
    return data


def _default(o):
    if isinstance(o, complex):
        return [o.real, o.imag]
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def dumps(data) -> str:
    return json.dumps(data, indent=2, sort_keys=True, default=_default) + "\n"


def write_json(path: str | Path, data) -> None:
    Path(path).write_text(dumps(data))


def to_complex(v, name: str = "value") -> complex:
    """Accept ``[re, im]``, a bare real, or a complex."""
    if isinstance(v, (list, tuple)):
        if len(v) != 2:
            raise ParameterError(f"{name}: complex values are [re, im]")
        return complex(float(v[0]), float(v[1]))
    if isinstance(v, (int, float, complex)):
        return complex(v)
    raise ParameterError(f"{name}: cannot parse {v!r} as a complex number")
