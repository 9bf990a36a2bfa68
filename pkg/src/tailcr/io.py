"""Single-column CSV input and table output."""
import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import CsvParseError
from .region import Region

NA = "NA"


@dataclass(frozen=True)
class Dataset:
    values: np.ndarray
    source: str
    name: str

    @property
    def n(self):
        return self.values.size


def _parse_float(cell):
    try:
        return float(cell)
    except ValueError:
        return None


def load_csv(path, skip_invalid=False, name=None):
    """Read one positive number per record.

    A non-numeric first line is treated as a header. Nonpositive or
    non-finite values fail the load unless ``skip_invalid`` is set, in which
    case they are dropped.

    Raises:
        CsvParseError: with the offending line number.
    """
    path = Path(path)
    values = []
    skipped = 0
    with path.open(newline="", encoding="utf-8-sig") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            cells = [c.strip() for c in row]
            if not cells or all(c == "" for c in cells):
                continue
            if len(cells) > 1:
                raise CsvParseError(
                    f"expected a single column, found {len(cells)}; extract the loss column first",
                    lineno)
            v = _parse_float(cells[0])
            if v is None:
                if lineno == 1 and not values:
                    continue
                if skip_invalid:
                    skipped += 1
                    continue
                raise CsvParseError(f"not a number: {cells[0]!r}", lineno)
            if not (math.isfinite(v) and v > 0):
                if skip_invalid:
                    skipped += 1
                    continue
                raise CsvParseError(f"value {cells[0]!r} is not finite and positive", lineno)
            values.append(v)
    if not values:
        raise CsvParseError(f"no values in {path}")
    return Dataset(values=np.asarray(values, dtype=float), source=str(path),
                   name=name or path.stem)


def format_value(v):
    """Round-trip text for a cell: ``repr`` for floats, ``NA`` for nan."""
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return NA if math.isnan(v) else repr(v)
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return "" if v is None else str(v)


REGION_COLUMNS = ["method", "level", "lo", "hi", "x_hat", "length",
                  "residual_lo", "residual_hi"]


def region_rows(regions):
    return [[r.method, r.level, r.lo, r.hi, r.center, r.length, *r.endpoint_residuals]
            for r in regions]


def write_csv(table, path_or_file):
    """Write an ExperimentTable (or a list of Regions) with a header row."""
    if isinstance(table, (list, tuple)) and (not table or isinstance(table[0], Region)):
        columns, rows = REGION_COLUMNS, region_rows(table)
    else:
        columns, rows = table.columns, table.rows
    if hasattr(path_or_file, "write"):
        _write(path_or_file, columns, rows)
    else:
        with open(path_or_file, "w", newline="", encoding="utf-8") as fh:
            _write(fh, columns, rows)


def _write(fh, columns, rows):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([format_value(v) for v in row])


def read_table(path):
    """Read a CSV written by ``write_csv`` back into columns and typed rows."""
    from .sim import ExperimentTable

    def conv(cell):
        if cell == NA:
            return math.nan
        for typ in (int, float):
            try:
                return typ(cell)
            except ValueError:
                pass
        return cell

    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        columns = next(reader)
        rows = [[conv(c) for c in row] for row in reader]
    return ExperimentTable(columns, rows)
