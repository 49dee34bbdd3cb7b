"""Delimited trace files: '# key = value' header, CSV body, 17 significant
digits so float64 round-trips exactly."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .constants import UNIT_CONVENTION
from .errors import ConfigParseError

FORMAT_VERSION = "1"
_FLOAT_FMT = "%.17e"


@dataclass
class TraceFile:
    """Header metadata plus named columns of equal length.

    Numeric columns are float64; string columns (status flags) are kept as
    lists of str and written verbatim.
    """

    header: dict = field(default_factory=dict)
    columns: dict = field(default_factory=dict)

    def __post_init__(self):
        lengths = {len(v) for v in self.columns.values()}
        if len(lengths) > 1:
            raise ValueError(f"ragged columns: lengths {sorted(lengths)}")

    def n_rows(self) -> int:
        return len(next(iter(self.columns.values()))) if self.columns else 0

    def to_text(self) -> str:
        lines = [f"# format_version = {FORMAT_VERSION}", f"# units = {UNIT_CONVENTION}"]
        for key, val in self.header.items():
            lines.append(f"# {key} = {val}")
        names = list(self.columns)
        lines.append(",".join(names))
        cols = [self.columns[n] for n in names]
        for i in range(self.n_rows()):
            cells = []
            for col in cols:
                v = col[i]
                cells.append(_FLOAT_FMT % v if isinstance(v, (float, np.floating)) else str(v))
            lines.append(",".join(cells))
        return "\n".join(lines) + "\n"

    def write(self, path: Path | str) -> Path:
        path = Path(path)
        path.write_text(self.to_text(), encoding="utf-8", newline="\n")
        return path


def read_trace(path: Path | str) -> TraceFile:
    """Parse a trace file back into header dict and columns."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    header: dict = {}
    i = 0
    for i, line in enumerate(lines):
        if not line.startswith("#"):
            break
        body = line[1:].strip()
        if "=" not in body:
            raise ConfigParseError(f"malformed header line {line!r}", i + 1)
        key, _, val = body.partition("=")
        header[key.strip()] = val.strip()
    else:
        raise ConfigParseError("no column row found", len(lines))
    names = lines[i].split(",")
    raw_rows = [line.split(",") for line in lines[i + 1:] if line]
    for j, row in enumerate(raw_rows):
        if len(row) != len(names):
            raise ConfigParseError(f"row has {len(row)} cells, expected {len(names)}", i + 2 + j)
    columns: dict = {}
    for ci, name in enumerate(names):
        cells = [row[ci] for row in raw_rows]
        try:
            columns[name] = np.array([float(c) for c in cells])
        except ValueError:
            columns[name] = cells
    return TraceFile(header, columns)
