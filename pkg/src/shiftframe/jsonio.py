"""Canonical JSON: sorted keys, compact separators, shortest round-trip floats.

Complex numbers serialize as ``[re, im]`` pairs.  Infinite floats become the
string ``"inf"`` so the output stays strict JSON.
"""

from __future__ import annotations

import hashlib
import json
import math

import numpy as np

from .errors import SchemaError


def to_plain(obj):
    """Recursively convert numpy scalars/arrays and complex values to JSON types."""
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_plain(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [_float(obj.real), _float(obj.imag)]
    if isinstance(obj, (float, np.floating)):
        return _float(obj)
    return obj


def _float(x):
    x = float(x)
    if math.isnan(x):
        return None
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x + 0.0  # folds -0.0 into 0.0


def dumps(obj) -> str:
    return json.dumps(to_plain(obj), sort_keys=True, separators=(",", ":"), allow_nan=False)


def digest(obj) -> str:
    return hashlib.sha256(dumps(obj).encode()).hexdigest()


def loads(text: str, source: str = "<input>"):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc.msg} (line {exc.lineno}, column {exc.colno})", source) from None


def load_file(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise SchemaError(f"cannot read file: {exc.strerror}", str(path)) from None
    return loads(text, str(path))


def write_file(path, obj) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(obj))
        fh.write("\n")


def parse_complex(v, where: str) -> complex:
    if isinstance(v, bool):
        raise SchemaError("expected a number or [re, im] pair", where)
    if isinstance(v, (int, float)):
        return complex(float(v), 0.0)
    if isinstance(v, list) and len(v) == 2 and all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in v):
        return complex(float(v[0]), float(v[1]))
    raise SchemaError("expected a number or [re, im] pair", where)


def parse_vector(v, n: int, where: str) -> np.ndarray:
    if not isinstance(v, list) or len(v) != n:
        raise SchemaError(f"expected a list of {n} complex entries", where)
    return np.array([parse_complex(x, f"{where}[{i}]") for i, x in enumerate(v)], dtype=complex)


def parse_complex_array(v, shape: tuple, where: str) -> np.ndarray:
    """Nested lists with the given logical shape; leaves are [re, im] pairs
    or plain reals."""
    try:
        arr = np.asarray(v, dtype=float)
    except (TypeError, ValueError):
        arr = None
    if arr is not None and arr.shape == tuple(shape) + (2,):
        return arr[..., 0] + 1j * arr[..., 1]
    if arr is not None and arr.shape == tuple(shape):
        return arr.astype(complex)
    # mixed leaves: validate and convert one entry at a time
    return np.array(_parse_nested(v, tuple(shape), where), dtype=complex).reshape(shape)


def _parse_nested(v, shape, where):
    if not shape:
        return parse_complex(v, where)
    if not isinstance(v, list) or len(v) != shape[0]:
        raise SchemaError(f"expected a list of length {shape[0]}", where)
    return [_parse_nested(x, shape[1:], f"{where}[{i}]") for i, x in enumerate(v)]
