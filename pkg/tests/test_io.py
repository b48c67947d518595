import numpy as np
import pytest

from speccoh.errors import InvalidInput
from speccoh.io import (
    read_panel,
    read_panel_binary,
    read_panel_csv,
    write_panel,
    write_panel_binary,
    write_panel_csv,
)
from conftest import complex_panel


class TestCsvFormat:
    def test_round_trip_is_exact(self, rng, tmp_path):
        panel = complex_panel(rng, 3, 17)
        path = tmp_path / "panel.csv"
        write_panel_csv(panel, path)
        back = read_panel_csv(path)
        assert (back.data == panel.data).all()

    def test_header_names(self, rng, tmp_path):
        panel = complex_panel(rng, 2, 4)
        path = tmp_path / "panel.csv"
        write_panel_csv(panel, path)
        header = path.read_text().splitlines()[0]
        assert header == "series_1_re,series_1_im,series_2_re,series_2_im"

    def test_short_row_names_line(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("series_1_re,series_1_im\n0.0,0.0\n1.0\n")
        with pytest.raises(InvalidInput, match="line 3"):
            read_panel_csv(path)

    def test_bad_float_names_line(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("series_1_re,series_1_im\n0.0,zero\n")
        with pytest.raises(InvalidInput, match="line 2"):
            read_panel_csv(path)

    def test_odd_header_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("a,b,c\n1,2,3\n")
        with pytest.raises(InvalidInput):
            read_panel_csv(path)

    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text("")
        with pytest.raises(InvalidInput):
            read_panel_csv(path)

    def test_no_data_rows(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("series_1_re,series_1_im\n")
        with pytest.raises(InvalidInput):
            read_panel_csv(path)


class TestBinaryFormat:
    def test_round_trip_bit_exact(self, rng, tmp_path):
        panel = complex_panel(rng, 4, 9)
        path = tmp_path / "panel.bin"
        write_panel_binary(panel, path)
        back = read_panel_binary(path)
        assert back.data.tobytes() == panel.data.tobytes()

    def test_layout(self, rng, tmp_path):
        panel = complex_panel(rng, 2, 3)
        path = tmp_path / "panel.bin"
        write_panel_binary(panel, path)
        blob = path.read_bytes()
        assert blob[:4] == b"MSSC"
        assert len(blob) == 12 + 16 * 2 * 3

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "bad.bin"
        path.write_bytes(b"XXXX" + bytes(8))
        with pytest.raises(InvalidInput, match="magic"):
            read_panel_binary(path)

    def test_truncated_payload(self, rng, tmp_path):
        panel = complex_panel(rng, 2, 3)
        path = tmp_path / "panel.bin"
        write_panel_binary(panel, path)
        path.write_bytes(path.read_bytes()[:-8])
        with pytest.raises(InvalidInput, match="bytes"):
            read_panel_binary(path)


def test_dispatch(rng, tmp_path):
    panel = complex_panel(rng, 2, 5)
    for fmt in ("csv", "binary"):
        path = tmp_path / f"panel.{fmt}"
        write_panel(panel, path, fmt)
        back = read_panel(path, fmt)
        assert (back.data == panel.data).all()
    with pytest.raises(InvalidInput):
        write_panel(panel, tmp_path / "x", "json")
    with pytest.raises(InvalidInput):
        read_panel(tmp_path / "panel.csv", "json")
