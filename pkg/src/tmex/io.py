"""JSON and CSV input/output with file and key context in error messages."""

import csv
import json
import re

import numpy as np

from .exceptions import ConfigError, DataError
from .measurement import PairedDataset

_ZHAT = re.compile(r"^zhat_(\d+)_(\d+)$")
_Z = re.compile(r"^z(\d+)$")


def fmt(x):
    """Format a float with 17 significant digits (exact round trip for doubles)."""
    return format(float(x), ".17g")


def read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise DataError(f"{path}: no such file") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def load_with(path, loader):
    """Parse ``path`` as JSON and build an object with ``loader``, prefixing errors with the file name."""
    data = read_json(path)
    try:
        return loader(data)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"{path}: bad entry {exc}") from None


def write_json(obj, path=None):
    text = json.dumps(obj, indent=2, sort_keys=True)
    if path is None:
        return text
    with open(path, "w") as fh:
        fh.write(text + "\n")
    return text


def write_rows(rows, path):
    """Write rows of strings/numbers; floats get 17 significant digits."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        for row in rows:
            w.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])


def write_dataset(ds, path):
    rows = [ds.header()] + [[fmt(v) for v in row] for row in np.hstack([ds.z, ds.zhat])]
    write_rows(rows, path)


def _parse_header(path, header):
    n_latents, blocks = 0, []
    for k, name in enumerate(header):
        m_z, m_h = _Z.match(name), _ZHAT.match(name)
        if m_z and not blocks:
            if int(m_z.group(1)) != n_latents + 1:
                raise DataError(f"{path}: column {k + 1} is {name!r}, expected 'z{n_latents + 1}'")
            n_latents += 1
        elif m_h:
            j, c = int(m_h.group(1)), int(m_h.group(2))
            if j == len(blocks) + 1 and c == 1:
                blocks.append(1)
            elif blocks and j == len(blocks) and c == blocks[-1] + 1:
                blocks[-1] += 1
            else:
                raise DataError(f"{path}: column {k + 1} ({name!r}) is out of order")
        else:
            raise DataError(f"{path}: unexpected column {name!r} at position {k + 1}")
    if n_latents == 0 or not blocks:
        raise DataError(f"{path}: need at least one z column and one zhat column")
    return n_latents, blocks


def read_dataset(path):
    """Read a paired dataset CSV (columns ``z1..zN`` then ``zhat_j_k``)."""
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except FileNotFoundError:
        raise DataError(f"{path}: no such file") from None
    if not rows:
        raise DataError(f"{path}: empty file")
    n_latents, dims = _parse_header(path, rows[0])
    width = len(rows[0])
    values = np.empty((len(rows) - 1, width))
    for line, row in enumerate(rows[1:], start=2):
        if len(row) != width:
            raise DataError(f"{path}, line {line}: expected {width} fields, got {len(row)}")
        try:
            values[line - 2] = [float(v) for v in row]
        except ValueError as exc:
            raise DataError(f"{path}, line {line}: {exc}") from None
    if not np.all(np.isfinite(values)):
        raise DataError(f"{path}: non-finite values")
    offsets = tuple(np.concatenate([[0], np.cumsum(dims)]).astype(int).tolist())
    return PairedDataset(values[:, :n_latents], values[:, n_latents:], offsets)


def read_table(path):
    """Read a generic numeric CSV with a header; returns ``(names, values)``."""
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except FileNotFoundError:
        raise DataError(f"{path}: no such file") from None
    if len(rows) < 2:
        raise DataError(f"{path}: no data rows")
    try:
        values = np.array([[float(v) for v in r] for r in rows[1:]])
    except ValueError as exc:
        raise DataError(f"{path}: {exc}") from None
    return rows[0], values
