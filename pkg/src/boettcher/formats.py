"""File formats and deterministic serialization.

Machine outputs are reproducible byte for byte: every float is printed with
17 significant digits, JSON keys keep insertion order, PPM pixels come from
an integer-only palette, and files are written atomically (temp file in the
target directory, then rename).
"""

from __future__ import annotations

import json
import os
import tempfile

import numpy as np

from .julia import EscapeGrid, PointCloud
from .sphere import is_infinity


def fmt_float(x: float) -> str:
    return format(float(x), ".17g")


def dumps_json(obj, indent: int | None = None) -> str:
    """JSON with 17-significant-digit floats and complex/infinity encoding."""

    def render(o, depth):
        pad = "" if indent is None else "\n" + " " * (indent * (depth + 1))
        end = "" if indent is None else "\n" + " " * (indent * depth)
        sep = "," if indent is None else ","
        if o is None:
            return "null"
        if isinstance(o, bool):
            return "true" if o else "false"
        if isinstance(o, (int, np.integer)):
            return str(int(o))
        if isinstance(o, (float, np.floating)):
            return fmt_float(o)
        if isinstance(o, (complex, np.complexfloating)):
            return render({"re": float(o.real), "im": float(o.imag)}, depth)
        if is_infinity(o):
            return '"inf"'
        if isinstance(o, str):
            return json.dumps(o)
        if isinstance(o, dict):
            if not o:
                return "{}"
            items = [f'{json.dumps(str(k))}: {render(v, depth + 1)}'
                     for k, v in o.items()]
            return "{" + pad + (sep + pad).join(items) + end + "}"
        if isinstance(o, (list, tuple, np.ndarray)):
            seq = list(o)
            if not seq:
                return "[]"
            items = [render(v, depth + 1) for v in seq]
            return "[" + pad + (sep + pad).join(items) + end + "]"
        raise TypeError(f"cannot serialize {type(o).__name__}")

    return render(obj, 0)


def atomic_write_bytes(path: str, data: bytes) -> None:
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_text(path: str, text: str) -> None:
    atomic_write_bytes(path, text.encode("utf-8"))


def escape_gray(count: int, max_iter: int) -> int:
    """Monotone escape-count shade; bounded pixels are black (0)."""
    if count > max_iter:
        return 0
    return 40 + (215 * count) // max(1, max_iter)


def ppm_bytes(grid: EscapeGrid) -> bytes:
    """Binary P6 image of an escape grid with the documented gray palette."""
    h, w = grid.data.shape
    header = f"P6\n{w} {h}\n255\n".encode("ascii")
    counts = grid.data
    shades = np.where(counts > grid.max_iter, 0,
                      40 + (215 * counts.astype(np.int64)) // max(1, grid.max_iter))
    shades = shades.astype(np.uint8)
    rgb = np.repeat(shades[:, :, None], 3, axis=2)
    return header + rgb.tobytes()


def cloud_csv(cloud: PointCloud) -> str:
    lines = ["re,im"]
    for z in cloud.points:
        lines.append(f"{fmt_float(z.real)},{fmt_float(z.imag)}")
    return "\n".join(lines) + "\n"
