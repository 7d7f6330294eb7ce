"""JSON/CSV encoding and atomic file output."""

from __future__ import annotations

import csv
import enum
import io
import json
import os
import tempfile
from dataclasses import fields, is_dataclass
from pathlib import Path

import numpy as np

from .dynamics import QubitState


def encode(obj):
    """Convert library values into JSON-ready structures.

    Complex numbers become {"re": x, "im": y}; qubit states become
    {"a0": ..., "a1": ...}; dataclasses become dicts in field order.
    """
    if isinstance(obj, (bool, str, int)) or obj is None:
        return obj
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": float(obj.real), "im": float(obj.imag)}
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, QubitState):
        return {"a0": encode(obj.a0), "a1": encode(obj.a1)}
    if isinstance(obj, np.ndarray):
        return [encode(v) for v in obj.tolist()]
    if is_dataclass(obj):
        return {f.name: encode(getattr(obj, f.name)) for f in fields(obj)}
    if isinstance(obj, dict):
        return {str(k): encode(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [encode(v) for v in obj]
    raise TypeError(f"cannot encode {type(obj).__name__}")


def decode_complex(d) -> complex:
    return complex(d["re"], d["im"])


def json_text(payload) -> str:
    return json.dumps(encode(payload), indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def _umask() -> int:
    mask = os.umask(0)
    os.umask(mask)
    return mask


def write_atomic(path, text: str) -> Path:
    """Write to a temp file beside ``path`` and rename it into place."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        # mkstemp creates 0600; give the result ordinary permissions
        os.chmod(tmp, 0o666 & ~_umask())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path
