"""JSON channel files and reports.

A channel file is ``{"d_in": n, "d_out": m, "kraus": [matrix, ...]}`` plus an
optional ``"metadata"`` object. Matrices are row-major nested lists and each
complex entry is ``[re, im]``.
"""
from __future__ import annotations

import hashlib
import json
import math
import os
import tempfile

import numpy as np

from ._config import ValidationError
from .channels import KrausMap

__all__ = [
    "encode_matrix",
    "decode_matrix",
    "channel_to_dict",
    "channel_from_dict",
    "read_channel",
    "write_channel",
    "write_json_atomic",
    "digest",
]


def encode_matrix(m) -> list:
    m = np.asarray(m, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.atleast_2d(m)]


def _scalar(z) -> complex:
    if isinstance(z, (int, float)):
        re, im = float(z), 0.0
    elif isinstance(z, (list, tuple)) and len(z) == 2:
        re, im = float(z[0]), float(z[1])
    else:
        raise ValidationError(f"complex entries must be [re, im], got {z!r}")
    if not (math.isfinite(re) and math.isfinite(im)):
        raise ValidationError("matrix entries must be finite")
    return complex(re, im)


def decode_matrix(rows) -> np.ndarray:
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise ValidationError("a matrix must be a nonempty list of rows")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise ValidationError("ragged matrix")
    return np.array([[_scalar(z) for z in r] for r in rows], dtype=complex)


def channel_to_dict(phi: KrausMap, metadata: dict | None = None) -> dict:
    out = {
        "d_in": phi.d_in,
        "d_out": phi.d_out,
        "kraus": [encode_matrix(k) for k in phi.kraus],
    }
    if metadata:
        out["metadata"] = metadata
    return out


def channel_from_dict(data: dict) -> KrausMap:
    try:
        d_in = int(data["d_in"])
        d_out = int(data["d_out"])
        ops = [decode_matrix(k) for k in data["kraus"]]
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed channel file: {exc}") from exc
    if not ops:
        raise ValidationError("channel file has no Kraus operators")
    for k in ops:
        if k.shape != (d_out, d_in):
            raise ValidationError(f"Kraus operator of shape {k.shape}, expected {(d_out, d_in)}")
    return KrausMap(np.stack(ops))


def _reject_constant(name):
    raise ValidationError(f"non-finite number {name} in JSON input")


def read_channel(path) -> tuple[KrausMap, dict]:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh, parse_constant=_reject_constant)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path}: invalid JSON ({exc})") from exc
    return channel_from_dict(data), data.get("metadata", {})


def write_json_atomic(path, obj) -> None:
    """Write JSON next to ``path`` and rename it into place."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".chancomp-", suffix=".json", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            json.dump(obj, fh, indent=1, allow_nan=False)
            fh.write("\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_channel(path, phi: KrausMap, metadata: dict | None = None) -> None:
    write_json_atomic(path, channel_to_dict(phi, metadata))


def digest(obj) -> str:
    """SHA-256 of the canonical JSON encoding of ``obj``."""
    blob = json.dumps(obj, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()
