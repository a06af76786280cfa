"""CSV and JSON writers shared by the command line tools.

Every file is written atomically: content goes to a temporary file in
the destination directory and is renamed into place, so an interrupted
run never leaves a truncated file behind. CSV cells use repr() floats
(full round-trip precision, '.' decimal separator), LF line endings,
and always start with a header row.
"""

from __future__ import annotations

import json
import os
import tempfile
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .beamformer import RegionBoundary
from .errors import InvalidInputError

REGION_HEADER = [
    "alpha21",
    "r21",
    "r12",
    "p1",
    "p2",
    "B_re[0]",
    "B_re[1]",
    "B_re[2]",
    "B_re[3]",
    "B_im[0]",
    "B_im[1]",
    "B_im[2]",
    "B_im[3]",
    "p_relay",
]

RATE_PAIR_HEADER = ["r21", "r12"]
TAU_HEADER = ["tau", "r21", "r12"]


def _fmt(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def atomic_write_text(path: str, text: str) -> None:
    """Write text to path through a same-directory temp file + rename."""
    target = os.path.abspath(path)
    directory = os.path.dirname(target)
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def format_csv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    lines = [",".join(header)]
    for row in rows:
        if len(row) != len(header):
            raise InvalidInputError(
                f"row has {len(row)} cells, header has {len(header)}"
            )
        lines.append(",".join(_fmt(cell) for cell in row))
    return "\n".join(lines) + "\n"


def write_csv(path: str, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    atomic_write_text(path, format_csv(header, rows))


def region_rows(
    boundary: RegionBoundary, scheme: Optional[str] = None
) -> Tuple[List[str], List[list]]:
    """Rows in the boundary CSV layout; scheme name appended when given.

    The eight B_* cells hold the reduced 2x2 beamformer row-major
    (B[0,0], B[0,1], B[1,0], B[1,1]), real parts then imaginary parts.
    """
    header = list(REGION_HEADER) + (["scheme"] if scheme is not None else [])
    rows = []
    for point in boundary.points:
        if point.beamformer is None:
            raise InvalidInputError("boundary point carries no relay matrix")
        flat = np.asarray(point.beamformer.B, dtype=complex).reshape(-1)
        row = [
            point.alpha21,
            point.rates.r21,
            point.rates.r12,
            point.p1,
            point.p2,
            *[float(v) for v in flat.real],
            *[float(v) for v in flat.imag],
            point.p_relay,
        ]
        if scheme is not None:
            row.append(scheme)
        rows.append(row)
    return header, rows


def write_region_csv(
    path: str, boundary: RegionBoundary, scheme: Optional[str] = None
) -> None:
    header, rows = region_rows(boundary, scheme)
    write_csv(path, header, rows)


def write_manifest(path: str, manifest: dict) -> None:
    atomic_write_text(path, json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def read_config(path: str) -> dict:
    """Flat key=value config file; '#' starts a comment, blank lines skipped."""
    values = {}
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise InvalidInputError(
                    f"{path}:{lineno}: expected key=value, got {line!r}"
                )
            key, value = line.split("=", 1)
            values[key.strip()] = value.strip()
    return values
