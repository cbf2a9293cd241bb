import numpy as np
import pytest

from tmex import io
from tmex.exceptions import ConfigError, DataError
from tmex.measurement import PairedDataset


def test_fmt_round_trips():
    for x in (0.1, 1 / 3, -2.5e-300, 123456789.123456789):
        assert float(io.fmt(x)) == x


def test_dataset_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    ds = PairedDataset(rng.normal(size=(20, 2)), rng.normal(size=(20, 3)), (0, 1, 3))
    io.write_dataset(ds, tmp_path / "d.csv")
    back = io.read_dataset(tmp_path / "d.csv")
    assert back.block_offsets == (0, 1, 3)
    np.testing.assert_array_equal(back.z, ds.z)
    np.testing.assert_array_equal(back.zhat, ds.zhat)


@pytest.mark.parametrize("header, message", [
    ("z2,zhat_1_1", "expected 'z1'"),
    ("z1,zhat_2_1", "out of order"),
    ("z1,zhat_1_2", "out of order"),
    ("z1,x,zhat_1_1", "unexpected column"),
    ("z1", "at least one"),
])
def test_bad_headers(tmp_path, header, message):
    path = tmp_path / "d.csv"
    path.write_text(header + "\n" + ",".join(["1"] * len(header.split(","))) + "\n")
    with pytest.raises(DataError, match=message):
        io.read_dataset(path)


def test_bad_rows_report_line(tmp_path):
    path = tmp_path / "d.csv"
    path.write_text("z1,zhat_1_1\n1,2\n3\n")
    with pytest.raises(DataError, match="line 3"):
        io.read_dataset(path)
    path.write_text("z1,zhat_1_1\n1,2\n3,abc\n")
    with pytest.raises(DataError, match="line 3"):
        io.read_dataset(path)
    path.write_text("z1,zhat_1_1\n1,nan\n")
    with pytest.raises(DataError, match="non-finite"):
        io.read_dataset(path)


def test_missing_files(tmp_path):
    with pytest.raises(DataError):
        io.read_dataset(tmp_path / "none.csv")
    with pytest.raises(DataError):
        io.read_json(tmp_path / "none.json")


def test_json_errors_carry_context(tmp_path):
    path = tmp_path / "x.json"
    path.write_text('{"a": 1,,}')
    with pytest.raises(ConfigError, match="line 1, column 9"):
        io.read_json(path)
    path.write_text('{"a": 1}')
    with pytest.raises(ConfigError, match="x.json: bad entry"):
        io.load_with(path, lambda d: d["b"])


def test_read_table(tmp_path):
    path = tmp_path / "t.csv"
    path.write_text("a,b\n1,2\n3,4\n")
    names, values = io.read_table(path)
    assert names == ["a", "b"] and values.tolist() == [[1, 2], [3, 4]]
