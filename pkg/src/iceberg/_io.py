"""CSV plumbing shared by the loaders."""

import csv
import hashlib
import os
from pathlib import Path

import numpy as np
import pandas as pd

from .errors import InputError, ParseError


def read_table(path, columns, numeric=()):
    """Read a headed CSV whose header must be exactly ``columns``.

    Text columns stay strings (FIPS and SOC codes keep their leading zeros);
    ``numeric`` columns are converted to float64 with the first unparseable
    cell reported by line number.
    """
    path = Path(path)
    if not path.exists():
        raise InputError(f"{path}: file not found")
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            header = fh.readline().rstrip("\r\n").split(",")
    except UnicodeDecodeError as exc:
        raise ParseError(f"not valid UTF-8 ({exc.reason})", path, 1) from None
    header = [h.strip() for h in header]
    if header != list(columns):
        unknown = [h for h in header if h not in columns]
        missing = [c for c in columns if c not in header]
        detail = []
        if unknown:
            detail.append(f"unknown columns {unknown}")
        if missing:
            detail.append(f"missing columns {missing}")
        if not detail:
            detail.append(f"columns out of order, expected {list(columns)}")
        raise ParseError("bad header: " + "; ".join(detail), path, 1)

    dtypes = {c: str for c in columns if c not in numeric}
    try:
        df = pd.read_csv(path, dtype=dtypes, keep_default_na=False,
                         na_filter=False, skipinitialspace=True,
                         encoding="utf-8", engine="c", low_memory=False)
    except pd.errors.ParserError as exc:
        raise ParseError(str(exc).strip(), path) from None
    except UnicodeDecodeError as exc:
        raise ParseError(f"not valid UTF-8 ({exc.reason})", path) from None

    for col in numeric:
        if df[col].dtype.kind in "iuf":
            df[col] = df[col].astype(np.float64)
            continue
        converted = pd.to_numeric(df[col], errors="coerce")
        bad = np.flatnonzero(converted.isna().to_numpy())
        if bad.size:
            row = int(bad[0])
            raise ParseError(f"column {col!r}: cannot parse {df[col].iloc[row]!r} as a number",
                             path, row + 2)
        df[col] = converted.astype(np.float64)
    for col in numeric:
        values = df[col].to_numpy()
        bad = np.flatnonzero(~np.isfinite(values))
        if bad.size:
            row = int(bad[0])
            raise ParseError(f"column {col!r}: non-finite value {float(values[row])!r}", path, row + 2)
    for col in dtypes:
        df[col] = df[col].str.strip()
        empty = np.flatnonzero((df[col] == "").to_numpy())
        if empty.size:
            raise ParseError(f"column {col!r}: empty value", path, int(empty[0]) + 2)
    return df


def file_digest(path):
    """sha256 hex digest of a file's bytes."""
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def write_csv(path, header, rows):
    """Write rows of already-formatted strings; ``\\n`` line endings always."""
    tmp = f"{path}.tmp{os.getpid()}"
    with open(tmp, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    os.replace(tmp, path)


def fmt_float(x):
    """Shortest round-tripping text for a float."""
    return repr(float(x))
