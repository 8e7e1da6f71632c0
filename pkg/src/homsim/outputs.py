"""Serialisation of sweep records: CSV, JSON and plain plot-data files."""
from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from pathlib import Path

from . import __version__
from .sweep import RunRecord

SCHEMA = 1
FORMATS = ("csv", "json", "both")


class IoFailure(OSError):
    """Raised when an output file cannot be written."""


def _fmt(value) -> str:
    if isinstance(value, float):
        return format(value, ".15e")
    if isinstance(value, int) and not isinstance(value, bool):
        return str(value)
    return "" if value is None else str(value)


def _atomic_write(path: Path, text: str) -> None:
    # write-then-rename keeps a half-written file from ever appearing
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def records_to_csv(records: list[RunRecord]) -> str:
    params, scalars = [], []
    for r in records:
        params += [k for k in r.params if k not in params]
        scalars += [k for k in r.scalars if k not in scalars]
    width = max((len(r.index) for r in records), default=0)
    header = [f"index.{i}" for i in range(width)] + [f"param.{p}" for p in params]
    header += [f"result.{s}" for s in scalars] + ["status", "reason"]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n", quoting=csv.QUOTE_MINIMAL)
    w.writerow(header)
    for r in records:
        row = [_fmt(i) for i in r.index] + [""] * (width - len(r.index))
        row += [_fmt(r.params.get(p)) for p in params]
        row += [_fmt(r.scalars.get(s)) for s in scalars]
        row += [r.status, r.reason]
        w.writerow(row)
    return buf.getvalue()


def records_to_json(records: list[RunRecord], config: dict | None = None) -> str:
    doc = {
        "schema": SCHEMA,
        "version": __version__,
        "config": config or {},
        "records": [r.to_dict() for r in records],
    }
    return json.dumps(doc, indent=1, sort_keys=True) + "\n"


def records_from_json(text: str) -> tuple[list[RunRecord], dict]:
    doc = json.loads(text)
    return [RunRecord.from_dict(d) for d in doc["records"]], doc.get("config", {})


def curve_to_text(x, y, xlabel="x", ylabel="y") -> str:
    lines = [f"# {xlabel}\t{ylabel}"]
    lines += [f"{format(float(a), '.15e')}\t{format(float(b), '.15e')}" for a, b in zip(x, y)]
    return "\n".join(lines) + "\n"


def emit_outputs(records: list[RunRecord], out_dir, fmt: str = "both", stem: str = "run",
                 config: dict | None = None, curves: dict | None = None) -> list[Path]:
    """Write ``stem.csv`` and/or ``stem.json`` plus one ``stem_<curve>.dat`` per curve.

    ``curves`` maps a name to ``(x, y)`` or ``(x, y, xlabel, ylabel)``.
    Returns the written paths.
    """
    if not records:
        raise ValueError("no records to write")
    if fmt not in FORMATS:
        raise ValueError(f"format must be one of {FORMATS}")
    out = Path(out_dir)
    written = []
    if fmt in ("csv", "both"):
        p = out / f"{stem}.csv"
        _atomic_write(p, records_to_csv(records))
        written.append(p)
    if fmt in ("json", "both"):
        p = out / f"{stem}.json"
        _atomic_write(p, records_to_json(records, config))
        written.append(p)
    for name, data in (curves or {}).items():
        x, y, *labels = data
        p = out / f"{stem}_{name}.dat"
        _atomic_write(p, curve_to_text(x, y, *labels))
        written.append(p)
    return written


def write_timings(records: list[RunRecord], out_dir, stem: str = "run") -> Path:
    """Wall times live in their own file so the main outputs stay reproducible."""
    lines = ["index,wall_time_s"] + [
        f"\"{' '.join(map(str, r.index))}\",{r.wall_time:.6f}" for r in records
    ]
    p = Path(out_dir) / f"{stem}_timings.csv"
    _atomic_write(p, "\n".join(lines) + "\n")
    return p
