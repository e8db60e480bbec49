import io

import numpy as np
import pytest

from clustor.io import Dataset, dumps, read_csv, read_json, write_csv, write_json


def _sample():
    ds = Dataset("demo", units={"x": "1/k", "t": "m/(hbar*k^2)"}, metadata={"b": 2, "a": [1.5, float("nan")]})
    ds.add("line", x=np.linspace(0, 1, 5) / 3.0, t=np.exp(np.linspace(0, 1, 5)))
    ds.add("points", x=np.array([0.1, 1e-300, -7.25]), sign=np.array([1.0, -1.0, 1.0]))
    return ds


def _same(a, b):
    assert a.name == b.name
    assert a.names() == b.names()
    for s in a.series:
        for c, v in s.columns.items():
            assert np.array_equal(v, b[s.name][c])


def test_csv_round_trip_exact():
    ds = _sample()
    back = read_csv(dumps(ds, "csv"))
    assert back.units == ds.units
    assert back.metadata["b"] == 2
    # long format: series lacking a column come back with it filled by nan
    assert np.all(np.isnan(back["line"]["sign"]))
    for s in ds.series:
        for c, v in s.columns.items():
            assert np.array_equal(v, back[s.name][c])


def test_json_round_trip_exact():
    ds = _sample()
    buf = io.StringIO()
    write_json(ds, buf)
    back = read_json(buf.getvalue())
    _same(ds, back)
    assert back.metadata["a"][1] is None


def test_output_is_deterministic():
    assert dumps(_sample(), "csv") == dumps(_sample(), "csv")
    assert dumps(_sample(), "json") == dumps(_sample(), "json")


def test_csv_header_layout():
    buf = io.StringIO()
    write_csv(_sample(), buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "# dataset: demo"
    assert lines[1].startswith("# meta.a: ")
    assert lines[3] == "series,x [1/k],t [m/(hbar*k^2)],sign"


def test_unequal_columns_rejected():
    with pytest.raises(ValueError):
        Dataset("bad").add("s", x=[1.0, 2.0], y=[1.0])


def test_unknown_format():
    with pytest.raises(ValueError):
        dumps(_sample(), "xml")
