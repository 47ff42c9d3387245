"""Shared JSON encoding of matrices and the objects built from them.

A matrix is ``{"rows": r, "cols": c, "re": [[...]], "im": [[...]]}``; ``im``
may be omitted for real matrices.
"""

import json
from pathlib import Path

import numpy as np

from .errors import DimensionMismatch, FermiCondError
from .symbols import BlockSymbol


def matrix_to_json(m) -> dict:
    m = np.asarray(m, dtype=complex)
    if m.ndim == 1:
        m = m.reshape(-1, 1)
    out = {"rows": int(m.shape[0]), "cols": int(m.shape[1]), "re": m.real.tolist()}
    if np.any(m.imag != 0):
        out["im"] = m.imag.tolist()
    return out


def matrix_from_json(obj) -> np.ndarray:
    try:
        rows, cols = int(obj["rows"]), int(obj["cols"])
        re = np.asarray(obj["re"], dtype=float).reshape(rows, cols)
        im = np.asarray(obj.get("im", np.zeros((rows, cols))), dtype=float).reshape(rows, cols)
    except (KeyError, TypeError, ValueError) as exc:
        raise FermiCondError(f"malformed matrix JSON: {exc}") from exc
    m = re + 1j * im
    if not np.all(np.isfinite(m)):
        raise FermiCondError("matrix JSON has non-finite entries")
    return m


def block_to_json(block: BlockSymbol) -> dict:
    return {"a": matrix_to_json(block.a), "b": matrix_to_json(block.b), "c": matrix_to_json(block.c)}


def block_from_json(obj) -> BlockSymbol:
    try:
        parts = obj["a"], obj["b"], obj["c"]
    except (KeyError, TypeError) as exc:
        raise FermiCondError(f"block JSON needs keys a, b, c: {exc}") from exc
    return BlockSymbol(*(matrix_from_json(p) for p in parts))


def conditioner_from_json(obj) -> np.ndarray:
    if "l" not in obj:
        raise FermiCondError('conditioner JSON needs key "l"')
    return matrix_from_json(obj["l"])


def cp_map_to_json(r, s) -> dict:
    return {"r": matrix_to_json(r), "s": matrix_to_json(s)}


def density_from_json(obj):
    """Density matrix or state vector with a ``"dims": [d1, d2]`` annotation.

    Returns ``(array, (d1, d2))``; a single row or column is a state vector.
    """
    if "dims" not in obj:
        raise FermiCondError('density JSON needs a "dims" annotation')
    d1, d2 = (int(d) for d in obj["dims"])
    m = matrix_from_json(obj)
    if 1 in m.shape and m.size == d1 * d2:
        return m.reshape(-1), (d1, d2)
    if m.shape != (d1 * d2, d1 * d2):
        raise DimensionMismatch(f"matrix shape {m.shape} does not match dims {(d1, d2)}")
    return m, (d1, d2)


def load_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise FermiCondError(f"cannot read {path}: {exc}") from exc
