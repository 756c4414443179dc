"""Binary file formats.

ASG1 (sinogram)::

    b"ASG1" | u32 n_angles | u32 n_p | f64 p_max | f64[n_angles * n_p]   (angle-major)

AFG1 (grid field)::

    b"AFG1" | u32 n_x | u32 n_y | f64 L | f64[n_x * n_y]   (y-major, x-minor)

All numbers little-endian.  PGM output is binary ``P5`` with 8-bit gray,
min-max normalized.
"""

from __future__ import annotations

import os
import struct

import numpy as np

from .fields import GridField
from .geometry import SinogramGrid
from .radon import Sinogram

_HEADER = struct.Struct("<4sIId")


class FormatError(ValueError):
    """File content does not match the expected layout."""


def _write(path, magic, n1, n2, extent, values):
    payload = np.ascontiguousarray(values, dtype="<f8").tobytes()
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(magic, n1, n2, extent))
        fh.write(payload)


def _read(path, magic):
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < _HEADER.size:
        raise FormatError(f"{os.fspath(path)}: file too short for a header")
    tag, n1, n2, extent = _HEADER.unpack_from(blob)
    if tag != magic:
        raise FormatError(f"{os.fspath(path)}: bad magic {tag!r}, expected {magic!r}")
    expected = _HEADER.size + 8 * n1 * n2
    if len(blob) != expected:
        raise FormatError(f"{os.fspath(path)}: size {len(blob)} bytes, expected {expected}")
    values = np.frombuffer(blob, dtype="<f8", offset=_HEADER.size).astype(np.float64)
    return n1, n2, extent, values


def write_sinogram(path, sino: Sinogram) -> None:
    g = sino.grid
    _write(path, b"ASG1", g.n_angles, g.n_p, g.p_max, sino.values)


def read_sinogram(path) -> Sinogram:
    n_angles, n_p, p_max, values = _read(path, b"ASG1")
    try:
        grid = SinogramGrid(n_angles, n_p, p_max)
    except ValueError as exc:
        raise FormatError(f"{os.fspath(path)}: invalid grid header ({exc})") from None
    return Sinogram(grid, values.reshape(n_angles, n_p))


def write_field(path, field: GridField) -> None:
    _write(path, b"AFG1", field.n_x, field.n_y, field.L, field.values)


def read_field(path) -> GridField:
    n_x, n_y, L, values = _read(path, b"AFG1")
    try:
        return GridField(values.reshape(n_y, n_x), L)
    except ValueError as exc:
        raise FormatError(f"{os.fspath(path)}: invalid field header ({exc})") from None


def to_gray8(values: np.ndarray) -> np.ndarray:
    lo, hi = float(values.min()), float(values.max())
    if hi <= lo:
        return np.zeros(values.shape, np.uint8)
    return np.rint((values - lo) / (hi - lo) * 255.0).astype(np.uint8)


def write_pgm(path, values: np.ndarray) -> None:
    """Row 0 of ``values`` is written as the bottom image row (y up)."""
    img = to_gray8(np.asarray(values, float))[::-1]
    with open(path, "wb") as fh:
        fh.write(b"P5\n%d %d\n255\n" % (img.shape[1], img.shape[0]))
        fh.write(img.tobytes())


def read_pgm(path) -> np.ndarray:
    with open(path, "rb") as fh:
        blob = fh.read()
    tokens, pos = [], 0
    while len(tokens) < 4:
        while pos < len(blob) and blob[pos:pos + 1].isspace():
            pos += 1
        end = pos
        while end < len(blob) and not blob[end:end + 1].isspace():
            end += 1
        if end == pos:
            raise FormatError(f"{os.fspath(path)}: truncated PGM header")
        tokens.append(blob[pos:end])
        pos = end
    if tokens[0] != b"P5" or tokens[3] != b"255":
        raise FormatError(f"{os.fspath(path)}: not an 8-bit binary PGM")
    w, h = int(tokens[1]), int(tokens[2])
    data = blob[pos + 1:]  # single whitespace byte ends the header
    if len(data) != w * h:
        raise FormatError(f"{os.fspath(path)}: pixel payload has wrong size")
    return np.frombuffer(data, np.uint8).reshape(h, w)[::-1]
