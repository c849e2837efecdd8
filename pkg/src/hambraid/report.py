"""Deterministic artifact emission: CSV tables, JSON documents and the run manifest."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import platform
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

SIG_DIGITS = 12


def fmt_float(x: float) -> str:
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.{SIG_DIGITS}g}"


def fmt_cell(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return fmt_float(v)
    if hasattr(v, "item") and not isinstance(v, (list, tuple, dict)):
        return fmt_cell(v.item())
    if isinstance(v, (list, tuple)):
        return " ".join(fmt_cell(x) for x in v)
    return str(v)


def to_jsonable(v: Any) -> Any:
    """Round floats to 12 significant digits; non-finite floats become strings."""
    if isinstance(v, bool) or v is None or isinstance(v, (int, str)):
        return v
    if isinstance(v, float):
        return float(fmt_float(v)) if math.isfinite(v) else fmt_float(v)
    if hasattr(v, "tolist"):
        return to_jsonable(v.tolist())
    if hasattr(v, "item"):
        return to_jsonable(v.item())
    if isinstance(v, dict):
        return {str(k): to_jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [to_jsonable(x) for x in v]
    if hasattr(v, "value") and isinstance(getattr(v, "value"), str):
        return v.value
    return str(v)


def dumps_json(obj: Any) -> str:
    return json.dumps(to_jsonable(obj), indent=2, allow_nan=False) + "\n"


def dumps_csv(columns: Sequence[str], rows: Sequence[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([fmt_cell(r.get(c)) for c in columns])
    return buf.getvalue()


@dataclass
class Table:
    columns: list
    rows: list = field(default_factory=list)


@dataclass
class Bundle:
    """Named tables and documents of one run."""

    command: str
    tables: dict = field(default_factory=dict)      # name -> Table
    documents: dict = field(default_factory=dict)   # name -> JSON-able object
    exit_code: int = 0


def _versions() -> dict:
    import numba
    import numpy
    return {"python": platform.python_version(), "numpy": numpy.__version__, "numba": numba.__version__}


def emit_report(bundle: Bundle, out_dir, fmt: str = "both", *, scenario=None, seed=None,
                timings=None) -> list:
    """Write the bundle; returns the written paths in order.

    Every file except ``timings.json`` is a pure function of the bundle and
    scenario.  The manifest lists the other artifacts with their hashes.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files: dict = {}
    if fmt in ("csv", "both"):
        for name, table in bundle.tables.items():
            files[f"{name}.csv"] = dumps_csv(table.columns, table.rows)
    if fmt in ("json", "both"):
        for name, table in bundle.tables.items():
            files[f"{name}.json"] = dumps_json([{c: r.get(c) for c in table.columns} for r in table.rows])
    for name, doc in bundle.documents.items():
        files[f"{name}.json"] = dumps_json(doc)
    manifest = {
        "command": bundle.command,
        "exit_code": bundle.exit_code,
        "config_hash": None if scenario is None else scenario.config_hash(),
        "scenario": None if scenario is None else scenario.data,
        "seed": seed,
        "versions": _versions(),
        "artifacts": {k: hashlib.sha256(v.encode()).hexdigest() for k, v in sorted(files.items())},
        "timings_file": "timings.json",
    }
    files["manifest.json"] = dumps_json(manifest)
    written = []
    for name in sorted(files):
        p = out / name
        p.write_text(files[name])
        written.append(p)
    if timings is not None:
        p = out / "timings.json"
        p.write_text(json.dumps({k: round(v, 3) for k, v in timings.items()}, indent=2) + "\n")
        written.append(p)
    return written
