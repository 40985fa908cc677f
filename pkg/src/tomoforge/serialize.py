"""JSON exchange formats.

Matrices travel as ``{"rows": r, "cols": c, "re": [...], "im": [...]}`` in
row-major order.
"""

import json

import numpy as np

from .errors import ShapeError


def matrix_to_json(a):
    a = np.asarray(a, dtype=complex)
    if a.ndim == 1:
        a = a.reshape(1, -1)
    r, c = a.shape
    return {
        "rows": int(r),
        "cols": int(c),
        "re": [float(x) for x in a.real.ravel()],
        "im": [float(x) for x in a.imag.ravel()],
    }


def matrix_from_json(obj):
    try:
        r, c = int(obj["rows"]), int(obj["cols"])
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj.get("im", [0.0] * (r * c)), dtype=float)
    except (KeyError, TypeError) as exc:
        raise ShapeError(f"malformed matrix object: {exc}") from None
    if re.size != r * c or im.size != r * c:
        raise ShapeError(f"matrix has {re.size} entries, expected {r}x{c}")
    return (re + 1j * im).reshape(r, c)


def record_to_json(record):
    return {
        "frame": matrix_to_json(record.frame),
        "expectations": [float(x) for x in record.expectations],
    }


def record_from_json(obj):
    from .reconstruct import MeasurementRecord

    return MeasurementRecord(
        frame=matrix_from_json(obj["frame"]),
        expectations=np.asarray(obj["expectations"], dtype=float),
    )


def dumps(obj):
    """Deterministic serialisation used for every file the package writes."""
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"
