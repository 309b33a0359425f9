"""Tensor and image file formats.

TEN1: ``b"TEN1"``, one ``u8`` rank, rank ``u64`` little-endian extents,
then float64 little-endian samples in C order.
PGM: binary ``P5`` greyscale with maxval 255.
"""

from __future__ import annotations

import os
import re
import struct
from pathlib import Path

import numpy as np

__all__ = [
    "FormatError",
    "write_ten1",
    "read_ten1",
    "write_pgm",
    "read_pgm",
    "read_array",
    "write_array",
    "pgm_frames_to_ten1",
]

MAGIC = b"TEN1"


class FormatError(ValueError):
    """Raised for malformed or unsupported files."""


def write_ten1(path, arr) -> None:
    arr = np.asarray(arr, dtype="<f8")
    if arr.ndim > 255:
        raise FormatError("TEN1 supports at most 255 axes")
    header = MAGIC + struct.pack("<B", arr.ndim) + struct.pack(f"<{arr.ndim}Q", *arr.shape)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(arr).tobytes())


def read_ten1(path) -> np.ndarray:
    data = Path(path).read_bytes()
    if data[:4] != MAGIC:
        raise FormatError(f"{path}: not a TEN1 file")
    if len(data) < 5:
        raise FormatError(f"{path}: truncated header")
    ndim = data[4]
    end = 5 + 8 * ndim
    if len(data) < end:
        raise FormatError(f"{path}: truncated header")
    shape = struct.unpack(f"<{ndim}Q", data[5:end])
    count = int(np.prod(shape, dtype=np.int64)) if ndim else 1
    if len(data) - end != 8 * count:
        raise FormatError(f"{path}: payload has {len(data) - end} bytes, expected {8 * count}")
    return np.frombuffer(data, dtype="<f8", offset=end).reshape(shape).astype(float)


_PGM_TOKEN = re.compile(rb"(?:\s|#[^\n]*\n?)*([^\s#]+)")


def read_pgm(path) -> np.ndarray:
    """Read a binary PGM (maxval <= 255) as a float array."""
    data = Path(path).read_bytes()
    pos = 0
    fields = []
    for _ in range(4):
        m = _PGM_TOKEN.match(data, pos)
        if not m:
            raise FormatError(f"{path}: truncated PGM header")
        fields.append(m.group(1))
        pos = m.end()
    if fields[0] != b"P5":
        raise FormatError(f"{path}: only binary P5 PGM is supported")
    try:
        width, height, maxval = (int(f) for f in fields[1:])
    except ValueError:
        raise FormatError(f"{path}: bad PGM header") from None
    if width <= 0 or height <= 0 or not 0 < maxval < 256:
        raise FormatError(f"{path}: unsupported PGM geometry or maxval {maxval}")
    pos += 1  # single whitespace byte before the raster
    raster = data[pos:pos + width * height]
    if len(raster) != width * height:
        raise FormatError(f"{path}: truncated PGM raster")
    return np.frombuffer(raster, dtype=np.uint8).reshape(height, width).astype(float)


def write_pgm(path, img) -> None:
    """Write a 2-D array as 8-bit PGM, rounding and clamping to 0..255."""
    img = np.asarray(img, dtype=float)
    if img.ndim != 2:
        raise FormatError("PGM images must be two-dimensional")
    px = np.clip(np.rint(img), 0, 255).astype(np.uint8)
    h, w = px.shape
    with open(path, "wb") as fh:
        fh.write(b"P5\n%d %d\n255\n" % (w, h))
        fh.write(px.tobytes())


def read_array(path) -> np.ndarray:
    """Load a PGM or TEN1 file, detected by its magic bytes."""
    with open(path, "rb") as fh:
        head = fh.read(4)
    if head == MAGIC:
        return read_ten1(path)
    if head[:2] == b"P5":
        return read_pgm(path)
    raise FormatError(f"{path}: neither PGM (P5) nor TEN1")


def write_array(path, arr) -> None:
    """PGM for ``.pgm`` paths holding 2-D data, TEN1 otherwise."""
    arr = np.asarray(arr)
    if str(path).lower().endswith(".pgm"):
        write_pgm(path, arr)
    else:
        write_ten1(path, arr)


def pgm_frames_to_ten1(directory, out_path) -> tuple[int, ...]:
    """Stack the ``*.pgm`` files of a directory (sorted by name) into a 3-D TEN1."""
    names = sorted(n for n in os.listdir(directory) if n.lower().endswith(".pgm"))
    if not names:
        raise FormatError(f"{directory}: no .pgm frames")
    frames = [read_pgm(os.path.join(directory, n)) for n in names]
    if len({f.shape for f in frames}) != 1:
        raise FormatError(f"{directory}: frames differ in size")
    vol = np.stack(frames)
    write_ten1(out_path, vol)
    return vol.shape
