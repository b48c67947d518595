"""Panel serialization: CSV and a compact binary container.

CSV layout: one header row, then one row per time step with the real and
imaginary parts of each series interleaved (``series_1_re,series_1_im,...``).
Values are written with 17 significant digits so float64 round-trips exactly.

Binary layout (all little-endian): the 4-byte magic ``MSSC``, two uint32
fields holding the series count and sample count, then the panel entries
row-major as pairs of float64 (real, imaginary).  Reading back is bit-exact.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .errors import InvalidInput
from .spectral import TimeSeriesPanel

MAGIC = b"MSSC"
CSV_FORMAT = "csv"
BINARY_FORMAT = "binary"
FORMATS = (CSV_FORMAT, BINARY_FORMAT)


def write_panel_csv(panel: TimeSeriesPanel, path: str | Path) -> None:
    m = panel.num_series
    header = ",".join(f"series_{i + 1}_re,series_{i + 1}_im" for i in range(m))
    columns = panel.data.T  # rows become time steps
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(header + "\n")
        for row in columns:
            cells = []
            for value in row:
                cells.append(f"{value.real:.17g}")
                cells.append(f"{value.imag:.17g}")
            fh.write(",".join(cells) + "\n")


def read_panel_csv(path: str | Path) -> TimeSeriesPanel:
    with open(path, "r", encoding="ascii") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise InvalidInput(f"{path}: empty file")
    header = lines[0].split(",")
    if len(header) < 2 or len(header) % 2 != 0:
        raise InvalidInput(f"{path}: header must hold an re/im column pair per series")
    num_series = len(header) // 2
    rows: list[list[float]] = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        cells = line.split(",")
        if len(cells) != 2 * num_series:
            raise InvalidInput(
                f"{path}: line {lineno} has {len(cells)} fields, expected {2 * num_series}"
            )
        try:
            rows.append([float(cell) for cell in cells])
        except ValueError as exc:
            raise InvalidInput(f"{path}: line {lineno}: {exc}") from exc
    if not rows:
        raise InvalidInput(f"{path}: no data rows")
    flat = np.asarray(rows, dtype=np.float64)
    data = (flat[:, 0::2] + 1j * flat[:, 1::2]).T
    return TimeSeriesPanel(data)


def write_panel_binary(panel: TimeSeriesPanel, path: str | Path) -> None:
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<II", panel.num_series, panel.num_samples))
        fh.write(np.ascontiguousarray(panel.data, dtype="<c16").tobytes())


def read_panel_binary(path: str | Path) -> TimeSeriesPanel:
    blob = Path(path).read_bytes()
    if len(blob) < 12 or blob[:4] != MAGIC:
        raise InvalidInput(f"{path}: not a panel container (bad magic)")
    num_series, num_samples = struct.unpack("<II", blob[4:12])
    expected = 12 + 16 * num_series * num_samples
    if len(blob) != expected:
        raise InvalidInput(
            f"{path}: payload holds {len(blob) - 12} bytes, expected {expected - 12}"
        )
    data = np.frombuffer(blob[12:], dtype="<c16").reshape(num_series, num_samples)
    return TimeSeriesPanel(data.astype(np.complex128))


def write_panel(panel: TimeSeriesPanel, path: str | Path, fmt: str) -> None:
    if fmt == CSV_FORMAT:
        write_panel_csv(panel, path)
    elif fmt == BINARY_FORMAT:
        write_panel_binary(panel, path)
    else:
        raise InvalidInput(f"unknown panel format {fmt!r}")


def read_panel(path: str | Path, fmt: str) -> TimeSeriesPanel:
    if fmt == CSV_FORMAT:
        return read_panel_csv(path)
    if fmt == BINARY_FORMAT:
        return read_panel_binary(path)
    raise InvalidInput(f"unknown panel format {fmt!r}")
