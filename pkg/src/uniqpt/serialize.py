"""Structured-text (de)serialization.

Matrices travel as JSON with complex entries encoded as [re, im] pairs,
row-major, alongside dim and basis-kind metadata.  Measurement records travel
as CSV with a '#'-prefixed metadata header.  Floats are written with repr()
so a spec reproduces its output byte for byte.
"""
from __future__ import annotations

import io
import json

import numpy as np

from .errors import InvalidArgumentError

FORMAT_VERSION = 1


def matrix_to_obj(m: np.ndarray) -> list:
    m = np.asarray(m, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def obj_to_matrix(obj) -> np.ndarray:
    arr = np.asarray(obj, dtype=float)
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise InvalidArgumentError("matrix object must be rows of [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def dump_matrix(m: np.ndarray, dim: int, kind: str = "matrix", **meta) -> str:
    doc = {
        "format_version": FORMAT_VERSION,
        "kind": kind,
        "dim": dim,
        **meta,
        "data": matrix_to_obj(m),
    }
    return json.dumps(doc, indent=1)


def load_matrix(text: str) -> tuple[np.ndarray, dict]:
    doc = json.loads(text)
    if "data" not in doc or "dim" not in doc:
        raise InvalidArgumentError("missing 'data' or 'dim' field")
    m = obj_to_matrix(doc.pop("data"))
    return m, doc


def dump_matrix_stack(ms: np.ndarray, dim: int, labels, kind: str, **meta) -> str:
    doc = {
        "format_version": FORMAT_VERSION,
        "kind": kind,
        "dim": dim,
        "labels": list(labels),
        **meta,
        "data": [matrix_to_obj(m) for m in ms],
    }
    return json.dumps(doc, indent=1)


def load_matrix_stack(text: str) -> tuple[np.ndarray, list, dict]:
    doc = json.loads(text)
    ms = np.array([obj_to_matrix(o) for o in doc.pop("data")])
    return ms, list(doc.pop("labels", [])), doc


def fmt_float(x: float) -> str:
    """Shortest round-trip decimal form; deterministic across runs."""
    return repr(float(x))


def write_csv(fh: io.TextIOBase, meta: dict, columns: list[str], rows) -> None:
    """CSV with '# key: value' metadata lines before the column header."""
    for k, v in meta.items():
        fh.write(f"# {k}: {v}\n")
    fh.write(",".join(columns) + "\n")
    for row in rows:
        fh.write(",".join(fmt_float(v) if isinstance(v, float) else str(v) for v in row) + "\n")


def read_csv(fh: io.TextIOBase) -> tuple[dict, list[str], list[list[str]]]:
    meta: dict = {}
    columns: list[str] = []
    rows: list[list[str]] = []
    for line in fh:
        line = line.rstrip("\n")
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if ":" in body:
                k, v = body.split(":", 1)
                meta[k.strip()] = v.strip()
            continue
        if not columns:
            columns = line.split(",")
        else:
            rows.append(line.split(","))
    return meta, columns, rows


__all__ = [
    "FORMAT_VERSION",
    "matrix_to_obj",
    "obj_to_matrix",
    "dump_matrix",
    "load_matrix",
    "dump_matrix_stack",
    "load_matrix_stack",
    "fmt_float",
    "write_csv",
    "read_csv",
]
