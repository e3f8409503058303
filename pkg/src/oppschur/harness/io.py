"""JSON files for matrices, block matrices, families and vectors.

A matrix object is ``{"rows", "cols", "partition"?, "entries"}`` with row-major
``[re, im]`` pairs.  Python's float repr is the shortest round-trip form, so
serialize -> parse -> serialize is the identity.
"""

from __future__ import annotations

import json
import math
from typing import Any, Union

import numpy as np

from ..errors import InputFormatError
from ..hadamard import BlockFamily
from ..linalg import BlockMatrix, BlockPartition


def _num(x: Any, where: str) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise InputFormatError(f"{where}: expected a number, got {x!r}")
    x = float(x)
    if not math.isfinite(x):
        raise InputFormatError(f"{where}: non-finite value")
    return x


def matrix_to_obj(x: Union[np.ndarray, BlockMatrix]) -> dict:
    part = None
    if isinstance(x, BlockMatrix):
        part = list(x.partition.sizes)
        x = x.data
    x = np.asarray(x, dtype=np.complex128)
    if x.ndim == 1:
        x = x.reshape(-1, 1)
    obj = {
        "rows": int(x.shape[0]),
        "cols": int(x.shape[1]),
        "entries": [[[float(z.real), float(z.imag)] for z in row] for row in x],
    }
    if part is not None:
        obj["partition"] = part
    return obj


def matrix_from_obj(obj: Any, where: str = "matrix") -> Union[np.ndarray, BlockMatrix]:
    if not isinstance(obj, dict):
        raise InputFormatError(f"{where}: expected an object")
    unknown = set(obj) - {"rows", "cols", "partition", "entries"}
    if unknown:
        raise InputFormatError(f"{where}: unknown keys {sorted(unknown)}")
    for key in ("rows", "cols", "entries"):
        if key not in obj:
            raise InputFormatError(f"{where}: missing {key!r}")
    rows, cols = obj["rows"], obj["cols"]
    if not (isinstance(rows, int) and isinstance(cols, int)) or isinstance(rows, bool) \
            or isinstance(cols, bool) or rows < 1 or cols < 1:
        raise InputFormatError(f"{where}: rows and cols must be positive integers")
    ent = obj["entries"]
    if not isinstance(ent, list) or len(ent) != rows:
        raise InputFormatError(f"{where}: entries must have {rows} rows")
    out = np.empty((rows, cols), dtype=np.complex128)
    for r, row in enumerate(ent):
        if not isinstance(row, list) or len(row) != cols:
            raise InputFormatError(f"{where}: row {r} must have {cols} entries")
        for c, z in enumerate(row):
            if not isinstance(z, list) or len(z) != 2:
                raise InputFormatError(f"{where}: entry ({r},{c}) must be [re, im]")
            out[r, c] = complex(_num(z[0], where), _num(z[1], where))
    if "partition" in obj:
        part = obj["partition"]
        if not isinstance(part, list) or not part or not all(
            isinstance(k, int) and not isinstance(k, bool) and k >= 1 for k in part
        ):
            raise InputFormatError(f"{where}: partition must be a list of positive integers")
        if rows != cols or sum(part) != rows:
            raise InputFormatError(f"{where}: partition {part} does not fit a {rows}x{cols} matrix")
        return BlockMatrix(out, BlockPartition(tuple(part)))
    return out


def family_to_obj(family: BlockFamily) -> dict:
    return {"factors": [matrix_to_obj(f) for f in family.factors]}


def family_from_obj(obj: Any) -> BlockFamily:
    if not isinstance(obj, dict) or not isinstance(obj.get("factors"), list) or not obj["factors"]:
        raise InputFormatError("family: expected {\"factors\": [matrix, ...]}")
    facs = []
    for p, f in enumerate(obj["factors"], start=1):
        m = matrix_from_obj(f, f"factor {p}")
        if not isinstance(m, BlockMatrix):
            raise InputFormatError(f"factor {p}: a partition is required")
        facs.append(m)
    if len({f.s for f in facs}) != 1:
        raise InputFormatError("family: factors have different block counts")
    return BlockFamily(tuple(facs))


def vectors_from_obj(obj: Any) -> list[np.ndarray]:
    if not isinstance(obj, dict) or not isinstance(obj.get("vectors"), list) or not obj["vectors"]:
        raise InputFormatError("expected {\"vectors\": [matrix, ...]}")
    out = []
    for k, v in enumerate(obj["vectors"], start=1):
        m = matrix_from_obj(v, f"vector {k}")
        m = m.data if isinstance(m, BlockMatrix) else m
        if 1 not in m.shape:
            raise InputFormatError(f"vector {k}: must be a single row or column")
        out.append(m.ravel())
    return out


def dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True)


def loads(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputFormatError(f"malformed JSON: {exc}") from exc


def read_json(path: str) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return loads(fh.read())
    except OSError as exc:
        raise InputFormatError(f"cannot read {path}: {exc.strerror}") from exc
