"""Binary PGM (P5) reading and writing for square 8-bit grayscale images."""

from __future__ import annotations

import os
import re
from dataclasses import dataclass

import numpy as np

from .errors import PGMError

_TOKEN = re.compile(rb"\s*(?:#[^\n]*\n\s*)*(\S+)")


def is_power_of_two(n: int) -> bool:
    return n >= 2 and (n & (n - 1)) == 0


@dataclass(frozen=True, eq=False)
class GrayImage:
    """Square image of uint8 intensities with a power-of-two side."""

    pixels: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.pixels)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise PGMError(f"image must be square, got shape {arr.shape}")
        if not is_power_of_two(arr.shape[0]):
            raise PGMError(f"side not power of two: {arr.shape[0]}")
        if arr.dtype != np.uint8:
            if arr.size and (arr.min() < 0 or arr.max() > 255):
                raise PGMError("pixel values must lie in [0, 255]")
            if np.issubdtype(arr.dtype, np.floating) and not np.all(arr == np.round(arr)):
                raise PGMError("pixel values must be integers")
            arr = arr.astype(np.uint8)
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "pixels", arr)

    @property
    def side(self) -> int:
        return self.pixels.shape[0]

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.pixels
        return self.pixels.astype(dtype)

    def __eq__(self, other):
        if not isinstance(other, GrayImage):
            return NotImplemented
        return np.array_equal(self.pixels, other.pixels)

    def __repr__(self):
        return f"GrayImage(side={self.side})"


def load_pgm(data: bytes) -> GrayImage:
    """Decode a binary P5 PGM with maxval 255.

    Header tokens may be separated by any whitespace and interleaved with
    ``#`` comments; exactly one whitespace byte separates maxval from the
    raster, and trailing bytes after the raster are rejected.
    """
    pos = 0
    tokens = []
    for _ in range(4):
        m = _TOKEN.match(data, pos)
        if m is None:
            raise PGMError("malformed header: truncated")
        tokens.append(m.group(1))
        pos = m.end()
    magic, w, h, maxval = tokens
    if magic != b"P5":
        raise PGMError(f"malformed header: expected P5, got {magic[:8]!r}")
    try:
        width, height, maxv = int(w), int(h), int(maxval)
    except ValueError:
        raise PGMError("malformed header: non-integer field") from None
    if pos >= len(data) or data[pos : pos + 1] not in (b" ", b"\t", b"\n", b"\r"):
        raise PGMError("malformed header: missing separator before raster")
    pos += 1
    if maxv != 255:
        raise PGMError(f"maxval must be 255, got {maxv}")
    if width != height:
        raise PGMError(f"non-square image: {width}x{height}")
    if not is_power_of_two(width):
        raise PGMError(f"side not power of two: {width}")
    raster = data[pos:]
    if len(raster) != width * height:
        raise PGMError(f"raster has {len(raster)} bytes, expected {width * height}")
    pixels = np.frombuffer(raster, dtype=np.uint8).reshape(height, width)
    return GrayImage(pixels)


def save_pgm(img: GrayImage) -> bytes:
    header = b"P5\n%d %d\n255\n" % (img.side, img.side)
    return header + img.pixels.tobytes()


def read_pgm(path) -> GrayImage:
    with open(path, "rb") as fh:
        return load_pgm(fh.read())


def write_pgm(path, img: GrayImage) -> None:
    """Write atomically: the target is replaced only once the bytes are on disk."""
    atomic_write(path, save_pgm(img))


def atomic_write(path, data: bytes) -> None:
    path = os.fspath(path)
    tmp = f"{path}.tmp{os.getpid()}"
    try:
        with open(tmp, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    finally:
        if os.path.exists(tmp):
            os.remove(tmp)
