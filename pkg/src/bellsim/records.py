"""Output records and their JSON / CSV serialisation.

Floats are written with 17 significant digits so repeated runs can be
compared byte for byte.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Any, Optional

CSV_COLUMNS = ("scenario", "seed", "n", "result", "stderr", "oracle", "tolerance", "pass", "wall_time", "params", "details")


@dataclass
class OutputRecord:
    scenario: str
    seed: Optional[int]
    n: int
    result: float
    oracle: Optional[float]
    tolerance: Optional[float]
    passed: bool
    stderr: Optional[float] = None
    params: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)
    wall_time: Optional[float] = None

    def as_dict(self) -> dict:
        d = {
            "scenario": self.scenario,
            "seed": self.seed,
            "n": self.n,
            "result": self.result,
            "stderr": self.stderr,
            "oracle": self.oracle,
            "tolerance": self.tolerance,
            "pass": self.passed,
            "params": self.params,
            "details": self.details,
        }
        if self.wall_time is not None:
            d["wall_time"] = self.wall_time
        return d


def _encode(v: Any) -> str:
    if isinstance(v, bool) or v is None:
        return json.dumps(v)
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        if not math.isfinite(v):
            return "null"
        s = format(v, ".17g")
        # keep floats recognisable as floats
        return s if any(ch in s for ch in ".en") else s + ".0"
    if isinstance(v, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_encode(x)}" for k, x in v.items()) + "}"
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_encode(x) for x in v) + "]"
    if hasattr(v, "item"):  # numpy scalar
        return _encode(v.item())
    return json.dumps(v)


def to_json(record: OutputRecord) -> str:
    return _encode(record.as_dict())


def to_csv(records) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in records:
        d = r.as_dict()
        row = []
        for col in CSV_COLUMNS:
            v = d.get(col)
            if col in ("params", "details"):
                row.append(_encode(v))
            elif isinstance(v, float):
                row.append(_encode(v))
            elif v is None:
                row.append("")
            else:
                row.append(str(v).lower() if isinstance(v, bool) else str(v))
        w.writerow(row)
    return buf.getvalue()
