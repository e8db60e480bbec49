"""Dataset container and its CSV / JSON serializations.

A dataset holds one or more named series, each a set of equal-length
numeric columns.  Both formats are written in long form: every row carries
its series label, and columns a series lacks are written as ``nan``.

CSV layout::

    # dataset: figure-05
    # meta.<key>: <json value>
    series,x [1/k],t [m/(hbar*k^2)]
    world_line,0.5,0.49999999999999994

Each column name in the header row carries its unit in brackets when one
is known.

Floats use 17 significant digits so that parsing the file recovers every
value exactly.  Metadata keys are sorted, so output depends only on the
data and is byte-identical across runs.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List

import numpy as np

__all__ = ["Series", "Dataset", "write_csv", "read_csv", "write_json", "read_json", "dumps"]


@dataclass
class Series:
    name: str
    columns: Dict[str, np.ndarray]

    def __post_init__(self):
        cols = {k: np.atleast_1d(np.asarray(v, dtype=float)) for k, v in self.columns.items()}
        lengths = {v.size for v in cols.values()}
        if len(lengths) > 1:
            raise ValueError("series %r has columns of unequal length %s" % (self.name, sorted(lengths)))
        self.columns = cols

    def __len__(self):
        return next(iter(self.columns.values())).size if self.columns else 0

    def __getitem__(self, key):
        return self.columns[key]


@dataclass
class Dataset:
    name: str
    series: List[Series] = field(default_factory=list)
    units: Dict[str, str] = field(default_factory=dict)
    metadata: Dict[str, Any] = field(default_factory=dict)

    def add(self, name: str, **columns) -> Series:
        s = Series(name, columns)
        self.series.append(s)
        return s

    def __getitem__(self, name: str) -> Series:
        for s in self.series:
            if s.name == name:
                return s
        raise KeyError(name)

    def names(self) -> List[str]:
        return [s.name for s in self.series]

    def columns(self) -> List[str]:
        out: List[str] = []
        for s in self.series:
            for c in s.columns:
                if c not in out:
                    out.append(c)
        return out


def _fmt(v: float) -> str:
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return "%.17g" % v


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else None
    return v


def dumps(ds: Dataset, fmt: str = "csv") -> str:
    """Serialize ``ds`` to a string in ``fmt`` ('csv' or 'json')."""
    if fmt == "csv":
        buf = io.StringIO()
        write_csv(ds, buf)
        return buf.getvalue()
    if fmt == "json":
        buf = io.StringIO()
        write_json(ds, buf)
        return buf.getvalue()
    raise ValueError("unknown format %r" % fmt)


def write_csv(ds: Dataset, stream) -> None:
    stream.write("# dataset: %s\n" % ds.name)
    for k in sorted(ds.metadata):
        stream.write("# meta.%s: %s\n" % (k, json.dumps(_jsonable(ds.metadata[k]), sort_keys=True)))
    cols = ds.columns()
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(["series"] + ["%s [%s]" % (c, ds.units[c]) if c in ds.units else c for c in cols])
    for s in ds.series:
        data = [s.columns.get(c) for c in cols]
        for i in range(len(s)):
            w.writerow([s.name] + [_fmt(float(d[i])) if d is not None else "nan" for d in data])


def read_csv(stream) -> Dataset:
    """Parse a file written by :func:`write_csv` (series with nan-only columns keep them)."""
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    name, meta, units = "", {}, {}
    lines = []
    for line in stream:
        if line.startswith("#"):
            body = line[1:].strip()
            key, _, val = body.partition(": ")
            if key == "dataset":
                name = val
            elif key.startswith("meta."):
                meta[key[5:]] = json.loads(val)
        else:
            lines.append(line)
    rows = list(csv.reader(lines))
    header, body = rows[0], rows[1:]
    cols = []
    for h in header[1:]:
        col, sep, unit = h.partition(" [")
        cols.append(col)
        if sep:
            units[col] = unit[:-1]
    order: List[str] = []
    acc: Dict[str, List[List[float]]] = {}
    for r in body:
        if r[0] not in acc:
            order.append(r[0])
            acc[r[0]] = []
        acc[r[0]].append([float(v) for v in r[1:]])
    ds = Dataset(name=name, units=units, metadata=meta)
    for s in order:
        arr = np.array(acc[s], dtype=float).reshape(-1, len(cols))
        ds.add(s, **{c: arr[:, j] for j, c in enumerate(cols)})
    return ds


def write_json(ds: Dataset, stream) -> None:
    obj = {
        "dataset": ds.name,
        "metadata": _jsonable(ds.metadata),
        "units": dict(ds.units),
        "series": {s.name: {c: _jsonable(v) for c, v in s.columns.items()} for s in ds.series},
    }
    json.dump(obj, stream, sort_keys=True, indent=1)
    stream.write("\n")


def read_json(stream) -> Dataset:
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    obj = json.load(stream)
    ds = Dataset(name=obj["dataset"], units=obj.get("units", {}), metadata=obj.get("metadata", {}))
    for sname, cols in obj["series"].items():
        ds.add(sname, **{c: np.array([np.nan if v is None else v for v in vals], dtype=float)
                         for c, vals in cols.items()})
    return ds
