"""JSON Lines records and CSV curve files."""

from __future__ import annotations

import csv
import json
import math
from typing import Iterable, List, Optional

import numpy as np

SCHEMA_VERSION = "1.0"
CURVE_HEADER = ["t", "successes", "trials", "p_hat", "ci_low", "ci_high"]
SCALING_HEADER = ["n", "trials", "summary"]


class SchemaError(ValueError):
    pass


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        obj = float(obj)
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        return obj
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    return obj


def make_record(command: str, params: dict, payload, trial_index: Optional[int] = None,
                wall_time_ms: Optional[float] = None) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "params": _plain(params),
        "trial_index": trial_index,
        "payload": _plain(payload),
        "wall_time_ms": wall_time_ms,
    }


def dumps(record: dict) -> str:
    # repr-based float output is the shortest string that round-trips exactly
    return json.dumps(_plain(record), sort_keys=True, ensure_ascii=False, allow_nan=False)


def write_jsonl(fh, records: Iterable[dict]):
    for rec in records:
        fh.write(dumps(rec) + "\n")


def read_jsonl(path) -> List[dict]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            rec = json.loads(line)
            major = str(rec.get("schema_version", "")).split(".")[0]
            if major != SCHEMA_VERSION.split(".")[0]:
                raise SchemaError(f"unsupported schema version {rec.get('schema_version')!r}")
            out.append(rec)
    return out


def write_csv(fh, header, rows):
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])


def curve_rows(curve) -> list:
    return [[r.t, r.successes, r.trials, r.p_hat, r.ci_low, r.ci_high] for r in curve.rows]


def read_curve_csv(path) -> List[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != CURVE_HEADER:
            raise SchemaError(f"unexpected header {reader.fieldnames}")
        return [{"t": float(r["t"]), "successes": int(r["successes"]), "trials": int(r["trials"]),
                 "p_hat": float(r["p_hat"]), "ci_low": float(r["ci_low"]),
                 "ci_high": float(r["ci_high"])} for r in reader]
