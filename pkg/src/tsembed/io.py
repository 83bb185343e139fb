"""CSV/JSON serialization. Floats are written with 17 significant digits so they round-trip."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .timescale import DomainError, GridFunction, TimeScale


def fmt(x) -> str:
    if x is None:
        return ""
    return format(float(x), ".17g")


def jsonable(obj):
    if isinstance(obj, dict):
        return {k: jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        return f if np.isfinite(f) else None
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def write_json(path: str | Path, data: dict) -> None:
    Path(path).write_text(json.dumps(jsonable(data), indent=2, sort_keys=True) + "\n")


def timescale_to_json(ts: TimeScale) -> str:
    return json.dumps({"points": [float(p) for p in ts.points]})


def timescale_from_json(text: str) -> TimeScale:
    data = json.loads(text)
    if not isinstance(data, dict) or "points" not in data:
        raise DomainError('time scale JSON must be an object with a "points" array')
    return TimeScale(data["points"])


def timescale_to_csv(ts: TimeScale) -> str:
    return "".join(fmt(p) + "\n" for p in ts.points)


def timescale_from_csv(text: str) -> TimeScale:
    rows = [line.split(",")[0].strip() for line in text.splitlines() if line.strip()]
    try:
        return TimeScale([float(r) for r in rows])
    except ValueError:
        # tolerate a header line
        return TimeScale([float(r) for r in rows[1:]])


def load_timescale(path: str | Path) -> TimeScale:
    path = Path(path)
    if not path.exists():
        raise DomainError(f"no such scale file: {path}")
    text = path.read_text()
    if path.suffix.lower() == ".json" or text.lstrip().startswith("{"):
        return timescale_from_json(text)
    return timescale_from_csv(text)


def write_columns(path: str | Path, header: list[str], columns: list) -> None:
    """Write equal-length columns; ``None`` entries become empty cells."""
    n = max(len(c) for c in columns)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for i in range(n):
            w.writerow([_cell(c, i) for c in columns])


def _cell(col, i):
    if i >= len(col) or col[i] is None:
        return ""
    if isinstance(col[i], (int, np.integer)):
        return str(int(col[i]))
    return fmt(col[i])


def gridfunction_to_csv(path: str | Path, ts: TimeScale, f: GridFunction) -> None:
    r = ts.index_range(f.check(ts).domain_kind)
    write_columns(path, ["index", "t", "value"], [list(r), ts.points[r.start:r.stop], f.values])


def gridfunction_from_csv(path: str | Path, ts: TimeScale) -> GridFunction:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    idx = [int(r["index"]) for r in rows]
    for kind in ("full", "kappa", "kappa2", "kappa_kappa"):
        if idx == list(ts.index_range(kind)):
            return GridFunction([float(r["value"]) for r in rows], kind)
    raise DomainError("CSV indices do not match any domain of the given scale")
