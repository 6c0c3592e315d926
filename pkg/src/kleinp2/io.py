"""JSON and CSV conventions: complex numbers are [re, im] pairs."""

from __future__ import annotations

import csv
import io
import json
import math

import numpy as np


def cpx(z) -> list:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def _scalar(x) -> complex:
    if isinstance(x, (list, tuple)):
        if len(x) != 2:
            raise ValueError(f"complex entries are [re, im] pairs, got {x!r}")
        return complex(float(x[0]), float(x[1]))
    if isinstance(x, str):
        return complex(x.replace(" ", "").replace("i", "j"))
    return complex(x)


def vector_from_json(v) -> np.ndarray:
    return np.array([_scalar(x) for x in v], dtype=complex)


def matrix_from_json(m) -> np.ndarray:
    if isinstance(m, dict):
        m = m.get("matrix", m.get("lift"))
    return np.array([[_scalar(x) for x in row] for row in m], dtype=complex)


def dumps(obj) -> str:
    """Deterministic JSON: sorted keys, repr floats, non-finite values as strings."""
    return json.dumps(_clean(obj), sort_keys=True, indent=2) + "\n"


def _clean(x):
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, np.ndarray):
        return _clean(x.tolist())
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, complex):
        return _clean(cpx(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x + 0.0          # no negative zeros
    if hasattr(x, "to_json"):
        return _clean(x.to_json())
    if hasattr(x, "value") and isinstance(getattr(x, "value"), str):
        return x.value
    return x


CHARTS = ("z1=1", "z2=1", "z3=1")


def cloud_rows(points: np.ndarray, word_length) -> list[tuple]:
    """Each point in the affine chart of its largest coordinate.

    Returns rows (chart, re1, im1, re2, im2, word_length) where the pair is
    the other two coordinates, in increasing index order, divided by the
    chart coordinate.
    """
    pts = np.asarray(points, dtype=complex).reshape(-1, 3)
    rows = []
    for x, wl in zip(pts, np.asarray(word_length)):
        k = int(np.argmax(np.abs(x)))
        rest = [x[i] / x[k] for i in range(3) if i != k]
        rows.append((CHARTS[k], rest[0].real, rest[0].imag, rest[1].real, rest[1].imag, int(wl)))
    return rows


def cloud_csv(points: np.ndarray, word_length) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["chart", "re1", "im1", "re2", "im2", "word_length"])
    for r in cloud_rows(points, word_length):
        w.writerow([r[0], *(repr(float(v)) for v in r[1:5]), r[5]])
    return buf.getvalue()


def p1_csv(points: np.ndarray, word_length) -> str:
    """P^1 cloud as (re, im, word_length); the point at infinity is written as inf."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["re", "im", "word_length"])
    for v, wl in zip(np.asarray(points, dtype=complex).reshape(-1, 2), np.asarray(word_length)):
        if abs(v[1]) <= 1e-300 or abs(v[1]) < 1e-14 * abs(v[0]):
            w.writerow(["inf", "inf", int(wl)])
        else:
            z = v[0] / v[1]
            w.writerow([repr(float(z.real)), repr(float(z.imag)), int(wl)])
    return buf.getvalue()
