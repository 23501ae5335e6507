"""Deterministic report serialization.

Every float is rendered with 17 significant digits in lowercase scientific
notation so that reports are byte-identical across runs and thread settings;
dictionaries serialize in insertion order.
"""

from __future__ import annotations

import json
import math

from .errors import ParameterError


def fmt_float(x: float) -> str:
    x = float(x)
    if not math.isfinite(x):
        raise ParameterError("reports must not contain non-finite numbers")
    if x == 0.0:
        x = 0.0  # normalize -0.0
    return "%.16e" % x


def complex_pair(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def render_json(obj, indent: int = 0) -> str:
    """Canonical JSON with fixed float formatting and insertion-order keys."""
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return fmt_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, complex):
        return render_json(complex_pair(obj), indent)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        parts = [
            "%s%s: %s" % (inner, json.dumps(str(k)), render_json(v, indent + 1))
            for k, v in obj.items()
        ]
        return "{\n" + ",\n".join(parts) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not len(obj):
            return "[]"
        parts = ["%s%s" % (inner, render_json(v, indent + 1)) for v in obj]
        return "[\n" + ",\n".join(parts) + "\n" + pad + "]"
    # numpy scalars and similar
    if hasattr(obj, "item"):
        return render_json(obj.item(), indent)
    raise ParameterError("cannot serialize %r" % type(obj))


def csv_field(value) -> str:
    """One CSV cell: floats canonical, bools lowercase, None empty."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return fmt_float(value)
    if isinstance(value, int):
        return str(value)
    text = str(value)
    if any(ch in text for ch in ",\"\n"):
        return '"' + text.replace('"', '""') + '"'
    return text


def csv_line(fields) -> str:
    return ",".join(csv_field(f) for f in fields)
