"""JSON and CSV formats for matrices, polynomials and reports.

Matrix: ``{"n": 3, "entries": [[[re, im], ...], ...]}``, row-major.
Polynomial: ``{"coeffs": [[re, im], ...]}``, ascending powers of ``t``.
Floats are written with 17 significant digits so that they round-trip.
"""
import json
import math
from pathlib import Path

import numpy as np

from .linalg_core import check_matrix
from .poly import Polynomial

__all__ = [
    "dumps",
    "matrix_from_dict",
    "matrix_to_dict",
    "polynomial_from_dict",
    "polynomial_to_dict",
    "read_matrix",
    "write_csv",
    "write_matrix",
]


def _float(x):
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite number {x}")
    s = format(x, ".17g")
    if "e" not in s and "." not in s and "n" not in s:
        s += ".0"
    return s


def dumps(obj):
    """Serialize like :func:`json.dumps`, but with 17-digit floats.

    Complex numbers become ``[re, im]``, arrays become nested lists and
    polynomials become their ``{"coeffs": ...}`` form.
    """
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return f"[{_float(obj.real)}, {_float(obj.imag)}]"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, Polynomial):
        return dumps(polynomial_to_dict(obj))
    if isinstance(obj, np.ndarray):
        return dumps(obj.tolist())
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {dumps(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(dumps(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _pair(v):
    if isinstance(v, (list, tuple)) and len(v) == 2:
        return complex(float(v[0]), float(v[1]))
    if isinstance(v, (int, float)):
        return complex(v)
    raise ValueError(f"expected [re, im], got {v!r}")


def matrix_to_dict(A):
    A = check_matrix(A)
    return {"n": A.shape[0], "entries": [[complex(v) for v in row] for row in A]}


def matrix_from_dict(d):
    try:
        n = int(d["n"])
        rows = d["entries"]
    except (KeyError, TypeError) as exc:
        raise ValueError("matrix JSON needs keys 'n' and 'entries'") from exc
    if len(rows) != n or any(len(r) != n for r in rows):
        raise ValueError(f"matrix JSON 'entries' is not {n} x {n}")
    return check_matrix(np.array([[_pair(v) for v in row] for row in rows], dtype=np.complex128))


def polynomial_to_dict(f):
    return {"coeffs": [complex(c) for c in f.to_monomial().coeffs]}


def polynomial_from_dict(d):
    try:
        coeffs = d["coeffs"]
    except (KeyError, TypeError) as exc:
        raise ValueError("polynomial JSON needs key 'coeffs'") from exc
    return Polynomial([_pair(c) for c in coeffs])


def read_matrix(path):
    with open(path) as fh:
        return matrix_from_dict(json.load(fh))


def write_matrix(path, A):
    Path(path).write_text(dumps(matrix_to_dict(A)) + "\n")


def write_csv(stream, header, rows):
    """Comma-separated, header row, LF line endings, 17-digit floats."""

    def cell(v):
        if isinstance(v, (float, np.floating)):
            return _float(v)
        return str(v)

    stream.write(",".join(header) + "\n")
    for row in rows:
        stream.write(",".join(cell(v) for v in row) + "\n")
