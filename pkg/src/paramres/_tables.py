"""Deterministic table output: '.17g' floats, comma separator, LF line ends."""

from __future__ import annotations

import io
import json
from typing import Iterable, Sequence


def _cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v + 0.0, ".17g")
    if isinstance(v, int):
        return str(v)
    return str(v)


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    with io.open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_cell(v) for v in row) + "\n")


def _json_default(v):
    if hasattr(v, "item"):
        return v.item()
    raise TypeError(f"not JSON-serializable: {type(v)!r}")


def write_json(path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    """Same table as a JSON list of records keyed by the header strings."""
    records = [dict(zip(header, row)) for row in rows]
    with io.open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(records, fh, indent=1, sort_keys=False, default=_json_default)
        fh.write("\n")
