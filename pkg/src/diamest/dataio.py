"""JSON Lines dataset files.

One object per point, ``{"x": [1, -1, ...], "y": 1}``, optionally preceded
by a header ``{"n": N, "space": "boolean"}``.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import IO

from .core import Dataset, DimensionError


class DataFormatError(ValueError):
    pass


def loads(text: str) -> Dataset:
    n = None
    space = "boolean"
    xs, ys = [], []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise DataFormatError(f"line {lineno}: {exc.msg}") from None
        if not isinstance(obj, dict):
            raise DataFormatError(f"line {lineno}: expected an object")
        if "x" not in obj:
            if xs:
                raise DataFormatError(f"line {lineno}: header must come first")
            n = obj.get("n")
            space = obj.get("space", "boolean")
            continue
        x, y = obj["x"], obj.get("y")
        if space == "boolean" and not all(isinstance(v, int) and not isinstance(v, bool) and v in (1, -1) for v in x):
            raise DataFormatError(f"line {lineno}: boolean coordinates must be the integers 1 or -1")
        if y not in (1, -1) or isinstance(y, bool):
            raise DataFormatError(f"line {lineno}: label must be 1 or -1")
        xs.append(x)
        ys.append(y)
    if n is None:
        if not xs:
            raise DataFormatError("empty dataset needs a header with n")
        n = len(xs[0])
    try:
        return Dataset.from_points(list(zip(xs, ys)), n=n, space=space)
    except (DimensionError, ValueError) as exc:
        raise DataFormatError(str(exc)) from None


def load(path: str | Path) -> Dataset:
    return loads(Path(path).read_text())


def dumps(d: Dataset, header: bool | None = None) -> str:
    """Serialize; the header is written when asked or when it cannot be inferred."""
    if header is None:
        header = d.k == 0 or d.space != "boolean"
    lines = []
    if header:
        lines.append(json.dumps({"n": d.n, "space": d.space}))
    for p in d.points():
        lines.append(json.dumps({"x": list(p.x), "y": p.y}))
    return "".join(line + "\n" for line in lines)


def dump(d: Dataset, fp: IO[str] | str | Path, header: bool | None = None) -> None:
    if isinstance(fp, (str, Path)):
        Path(fp).write_text(dumps(d, header))
    else:
        fp.write(dumps(d, header))
