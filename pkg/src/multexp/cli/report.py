"""CSV / JSON-lines emitters. Header lines carry config, version and timing; bodies are deterministic."""

from __future__ import annotations

import csv
import io
import json
import math
from datetime import datetime, timezone

FORMATS = ("csv", "jsonl")


def _clean(v):
    if isinstance(v, float):
        return None if math.isnan(v) else ("inf" if v == math.inf else "-inf" if v == -math.inf else v)
    if hasattr(v, "item"):
        return _clean(v.item())
    return v


def _csv_cell(v):
    v = _clean(v)
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def render(rows: list[dict], config: dict, version: str, fmt: str, wall_clock: float,
           started: datetime | None = None) -> str:
    """Full report text: header (config, version, timing) followed by the body."""
    if fmt not in FORMATS:
        raise ValueError(f"format must be one of {FORMATS}")
    started = started or datetime.now(timezone.utc)
    header = {"tool": "multexp", "version": version, "config": config,
              "started_utc": started.isoformat(timespec="seconds"), "wall_clock_s": round(wall_clock, 6)}
    if fmt == "jsonl":
        lines = [json.dumps({"type": "header", **header}, sort_keys=True)]
        lines += [json.dumps({"type": "row", **{k: _clean(v) for k, v in r.items()}}, sort_keys=False)
                  for r in rows]
        return "\n".join(lines) + "\n"
    out = io.StringIO()
    out.write(f"# multexp {version}\n")
    out.write(f"# config: {json.dumps(config, sort_keys=True)}\n")
    out.write(f"# started_utc: {header['started_utc']}\n")
    out.write(f"# wall_clock_s: {header['wall_clock_s']}\n")
    out.write(body_csv(rows))
    return out.getvalue()


def body_csv(rows: list[dict]) -> str:
    cols: list[str] = []
    for r in rows:
        for k in r:
            if k not in cols:
                cols.append(k)
    out = io.StringIO()
    wr = csv.writer(out, lineterminator="\n")
    wr.writerow(cols)
    for r in rows:
        wr.writerow([_csv_cell(r.get(c)) for c in cols])
    return out.getvalue()


def report_body(text: str, fmt: str) -> str:
    """Strip the timing header so two runs can be compared byte for byte."""
    lines = text.splitlines(keepends=True)
    if fmt == "csv":
        return "".join(l for l in lines if not l.startswith("#"))
    return "".join(lines[1:])
