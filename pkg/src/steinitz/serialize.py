"""Instance and report file formats.

Instances are single JSON documents::

    {"dim": 3, "gauge": {"p": 2.0}, "vectors": [[...], ...], "meta": {...}}

Floats are emitted with Python's shortest round-trip representation (at most
17 significant digits), so a load of a dump reproduces every coordinate
bit-for-bit. NaN and Inf are rejected on parse. Bench tables are plain CSV
with '.' decimal separators and a fixed column order.
"""

from __future__ import annotations

import csv
import io
import json
import math
from typing import Any

import numpy as np

from .core import Gauge, VectorFamily

BENCH_COLUMNS = ["d", "n", "eps", "t", "algo", "achieved", "bound", "C_W", "inv_t", "inv_sigma_t", "pass", "ms"]


def gauge_to_json(g: Gauge) -> dict:
    return {"p": "inf" if math.isinf(g.p) else g.p}


def gauge_from_json(obj) -> Gauge:
    if not isinstance(obj, dict) or "p" not in obj:
        raise ValueError("gauge must be an object with a 'p' field")
    p = obj["p"]
    if p == "inf":
        return Gauge.linf()
    return Gauge.lp(float(p))


def family_to_dict(family: VectorFamily, meta: dict | None = None) -> dict:
    return {
        "dim": family.dim,
        "gauge": gauge_to_json(family.gauge),
        "vectors": [[float(x) for x in row] for row in family.vectors],
        "meta": dict(meta or {}),
    }


def family_from_dict(doc: dict) -> tuple[VectorFamily, dict]:
    for key in ("dim", "gauge", "vectors"):
        if key not in doc:
            raise ValueError(f"instance document is missing {key!r}")
    dim = int(doc["dim"])
    gauge = gauge_from_json(doc["gauge"])
    vectors = np.asarray(doc["vectors"], dtype=np.float64)
    if vectors.ndim != 2 or vectors.shape[1] != dim:
        raise ValueError("vectors do not form an (n, dim) matrix")
    if not np.all(np.isfinite(vectors)):
        raise ValueError("instance contains non-finite coordinates")
    return VectorFamily(vectors, gauge), dict(doc.get("meta") or {})


def _reject_constant(name: str):
    raise ValueError(f"non-finite JSON constant {name!r} is not allowed")


def loads_json(text: str) -> Any:
    return json.loads(text, parse_constant=_reject_constant)


def dumps_json(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def load_instance(path: str) -> tuple[VectorFamily, dict]:
    with open(path, "r", encoding="utf-8") as fh:
        doc = loads_json(fh.read())
    if not isinstance(doc, dict):
        raise ValueError("instance file must hold a JSON object")
    return family_from_dict(doc)


def save_instance(path: str, family: VectorFamily, meta: dict | None = None) -> None:
    write_text(path, dumps_json(family_to_dict(family, meta)))


def write_text(path: str, text: str) -> None:
    """Write to a file, or to stdout when path is '-'."""
    if path == "-":
        import sys

        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def rows_to_csv(rows: list[dict], columns: list[str]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({c: _csv_cell(row.get(c, "")) for c in columns})
    return buf.getvalue()


def _csv_cell(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return repr(x)
    return str(x)
