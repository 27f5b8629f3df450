"""Deterministic JSON writer with fixed 17-significant-digit reals.

The stdlib encoder prints the shortest round-tripping repr of a float, which
can have fewer than 17 digits; every real here goes through ``fmt_real``.
"""
import json
import math

import numpy as np


def fmt_real(x):
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite real {x!r}")
    return format(x, "#.17g")


def _encode(obj, indent, level):
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt_real(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, (list, tuple)):
        items = [_encode(v, indent, level + 1) for v in obj]
        # scalar lists stay on one line; nested structures get broken out
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in obj):
            return "[" + ", ".join(items) + "]"
        pad = " " * (indent * (level + 1))
        return "[\n" + ",\n".join(pad + s for s in items) + "\n" + " " * (indent * level) + "]"
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        pad = " " * (indent * (level + 1))
        body = ",\n".join(
            f"{pad}{json.dumps(str(k))}: {_encode(v, indent, level + 1)}" for k, v in obj.items()
        )
        return "{\n" + body + "\n" + " " * (indent * level) + "}"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent=2):
    """Serialize ``obj`` to JSON text; output ends with a newline."""
    return _encode(obj, indent, 0) + "\n"


def dump(obj, path, indent=2):
    with open(path, "w") as fh:
        fh.write(dumps(obj, indent))
