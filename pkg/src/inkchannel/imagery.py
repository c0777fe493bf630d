"""Core raster types, histograms, and bit-exact netpbm (PGM/PBM) file I/O.

Conventions used throughout the package:
  * grayscale lightness 0 = black, 255 = white
  * binary bit 1 = printed ink dot, rendered black (the PBM convention)
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = [
    "GrayImage",
    "BinaryImage",
    "Histogram",
    "NetpbmError",
    "read_gray",
    "write_gray",
    "read_binary",
    "write_binary",
    "binary_histogram",
    "block_lightness_histogram",
]


class NetpbmError(ValueError):
    """Raised for malformed, unsupported, or truncated PGM/PBM files."""


def _freeze(arr: np.ndarray) -> np.ndarray:
    out = np.ascontiguousarray(arr)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class GrayImage:
    """8-bit single-channel raster; ``pixels`` is a (height, width) uint8 array."""

    pixels: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.pixels)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"gray image must be 2-d and non-empty, got shape {arr.shape}")
        if arr.dtype != np.uint8:
            if not np.issubdtype(arr.dtype, np.integer):
                raise ValueError(f"gray pixels must be integers, got dtype {arr.dtype}")
            if arr.min() < 0 or arr.max() > 255:
                raise ValueError("gray pixel values must lie in 0..255")
            arr = arr.astype(np.uint8)
        object.__setattr__(self, "pixels", _freeze(arr.copy()))

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]


@dataclass(frozen=True)
class BinaryImage:
    """{0,1} raster; ``bits`` is a (height, width) uint8 array, 1 = ink dot."""

    bits: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.bits)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"binary image must be 2-d and non-empty, got shape {arr.shape}")
        if arr.dtype == np.bool_:
            arr = arr.astype(np.uint8)
        if not np.issubdtype(arr.dtype, np.integer):
            raise ValueError(f"binary bits must be integers, got dtype {arr.dtype}")
        if not np.isin(arr, (0, 1)).all():
            raise ValueError("binary bits must be 0 or 1")
        object.__setattr__(self, "bits", _freeze(arr.astype(np.uint8)))

    @property
    def width(self) -> int:
        return self.bits.shape[1]

    @property
    def height(self) -> int:
        return self.bits.shape[0]

    def ink_fraction(self) -> float:
        """Fraction of 1-bits (printed dots)."""
        return float(self.bits.mean())


@dataclass(frozen=True)
class Histogram:
    """Normalized probability vector over lightness bins."""

    bins: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.bins, dtype=np.float64)
        if arr.ndim != 1 or arr.size < 1:
            raise ValueError("histogram must be a non-empty 1-d probability vector")
        if (arr < 0).any():
            raise ValueError("histogram bins must be non-negative")
        total = float(arr.sum())
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"histogram must sum to 1 (got {total!r})")
        object.__setattr__(self, "bins", _freeze(arr.copy()))

    @property
    def bin_count(self) -> int:
        return self.bins.size


# ---------------------------------------------------------------------------
# netpbm parsing
# ---------------------------------------------------------------------------

_WHITESPACE = b" \t\r\n\x0b\x0c"


class _Cursor:
    """Byte cursor over a netpbm file; skips whitespace and '#' comments."""

    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def _skip_separators(self):
        data, n = self.data, len(self.data)
        while self.pos < n:
            b = data[self.pos]
            if b == 0x23:  # '#'
                eol = data.find(b"\n", self.pos)
                self.pos = n if eol < 0 else eol + 1
            elif b in _WHITESPACE:
                self.pos += 1
            else:
                return

    def token(self) -> bytes:
        self._skip_separators()
        start = self.pos
        data, n = self.data, len(self.data)
        while self.pos < n and data[self.pos] not in _WHITESPACE and data[self.pos] != 0x23:
            self.pos += 1
        if self.pos == start:
            raise NetpbmError("malformed header: unexpected end of file")
        return data[start : self.pos]

    def at_end(self) -> bool:
        self._skip_separators()
        return self.pos >= len(self.data)

    def int_token(self, what: str) -> int:
        tok = self.token()
        try:
            return int(tok)
        except ValueError:
            raise NetpbmError(f"malformed {what} {tok!r}") from None

    def raster_start(self) -> int:
        # binary raster begins after exactly one whitespace byte
        if self.pos >= len(self.data) or self.data[self.pos] not in _WHITESPACE:
            raise NetpbmError("malformed header: missing separator before raster")
        return self.pos + 1

    def bit_char(self) -> int | None:
        # P1 raster: '0'/'1' characters, whitespace/comments between them optional
        self._skip_separators()
        if self.pos >= len(self.data):
            return None
        ch = self.data[self.pos]
        self.pos += 1
        if ch == 0x30:
            return 0
        if ch == 0x31:
            return 1
        raise NetpbmError(f"malformed payload: unexpected byte {bytes([ch])!r} in P1 raster")


def _read_file(path) -> bytes:
    data = Path(path).read_bytes()
    if not data:
        raise NetpbmError("malformed header: empty file")
    return data


def read_gray(path) -> GrayImage:
    """Read a PGM file (P2 ASCII or P5 binary, maxval 255)."""
    data = _read_file(path)
    magic = data[:2]
    if magic not in (b"P2", b"P5"):
        raise NetpbmError(f"malformed header: not a PGM file (magic {magic!r})")
    cur = _Cursor(data)
    cur.pos = 2
    width = cur.int_token("header width")
    height = cur.int_token("header height")
    maxval = cur.int_token("header maxval")
    if width < 1 or height < 1:
        raise NetpbmError(f"malformed header: bad dimensions {width}x{height}")
    if maxval != 255:
        raise NetpbmError(f"unsupported maxval {maxval} (only 255)")
    count = width * height
    if magic == b"P5":
        start = cur.raster_start()
        raw = data[start : start + count]
        if len(raw) < count:
            raise NetpbmError(f"truncated payload: expected {count} bytes, got {len(raw)}")
        arr = np.frombuffer(raw, dtype=np.uint8).reshape(height, width)
    else:
        vals = np.empty(count, dtype=np.uint8)
        for i in range(count):
            if cur.at_end():
                raise NetpbmError(f"truncated payload: expected {count} samples, got {i}")
            v = cur.int_token("payload sample")
            if not 0 <= v <= 255:
                raise NetpbmError(f"malformed payload sample {v} (out of 0..255)")
            vals[i] = v
        arr = vals.reshape(height, width)
    return GrayImage(arr)


def write_gray(img: GrayImage, path, *, ascii_format: bool = False) -> None:
    """Write a PGM file; P5 by default, P2 with ``ascii_format=True``."""
    if ascii_format:
        lines = [f"P2\n{img.width} {img.height}\n255\n"]
        for row in img.pixels:
            lines.append(" ".join(str(int(v)) for v in row) + "\n")
        Path(path).write_bytes("".join(lines).encode("ascii"))
    else:
        header = f"P5\n{img.width} {img.height}\n255\n".encode("ascii")
        Path(path).write_bytes(header + img.pixels.tobytes())


def read_binary(path) -> BinaryImage:
    """Read a PBM file (P1 ASCII or P4 packed binary); 1 = black = ink."""
    data = _read_file(path)
    magic = data[:2]
    if magic not in (b"P1", b"P4"):
        raise NetpbmError(f"malformed header: not a PBM file (magic {magic!r})")
    cur = _Cursor(data)
    cur.pos = 2
    width = cur.int_token("header width")
    height = cur.int_token("header height")
    if width < 1 or height < 1:
        raise NetpbmError(f"malformed header: bad dimensions {width}x{height}")
    if magic == b"P4":
        start = cur.raster_start()
        row_bytes = (width + 7) // 8
        need = row_bytes * height
        raw = data[start : start + need]
        if len(raw) < need:
            raise NetpbmError(f"truncated payload: expected {need} bytes, got {len(raw)}")
        packed = np.frombuffer(raw, dtype=np.uint8).reshape(height, row_bytes)
        arr = np.unpackbits(packed, axis=1)[:, :width]
    else:
        arr = np.empty((height, width), dtype=np.uint8)
        for i in range(height * width):
            b = cur.bit_char()
            if b is None:
                raise NetpbmError(f"truncated payload: expected {height * width} bits, got {i}")
            arr[i // width, i % width] = b
    return BinaryImage(arr)


def write_binary(img: BinaryImage, path, *, ascii_format: bool = False) -> None:
    """Write a PBM file; P4 by default, P1 with ``ascii_format=True``."""
    if ascii_format:
        lines = [f"P1\n{img.width} {img.height}\n"]
        for row in img.bits:
            lines.append(" ".join(str(int(v)) for v in row) + "\n")
        Path(path).write_bytes("".join(lines).encode("ascii"))
    else:
        header = f"P4\n{img.width} {img.height}\n".encode("ascii")
        packed = np.packbits(img.bits, axis=1)  # MSB first, rows zero-padded
        Path(path).write_bytes(header + packed.tobytes())


# ---------------------------------------------------------------------------
# histograms
# ---------------------------------------------------------------------------

def binary_histogram(img: BinaryImage) -> Histogram:
    """Two-bin histogram [p(bit=0), p(bit=1)]; complement construction sums to 1 exactly."""
    p1 = img.ink_fraction()
    return Histogram(np.array([1.0 - p1, p1]))


def block_lightness_histogram(img: BinaryImage, block: int, bins: int) -> Histogram:
    """Histogram of per-tile mean ink density, binned uniformly over [0, 1].

    The image is partitioned into ``block`` x ``block`` tiles; edge tiles keep
    their true (smaller) size rather than being dropped.
    """
    if block < 1:
        raise ValueError("block size must be >= 1")
    if bins < 2:
        raise ValueError("bin count must be >= 2")
    if block > img.width and block > img.height:
        raise ValueError(f"block {block} larger than both image dimensions {img.width}x{img.height}")
    counts = np.zeros(bins, dtype=np.float64)
    bits = img.bits
    for y0 in range(0, img.height, block):
        for x0 in range(0, img.width, block):
            density = float(bits[y0 : y0 + block, x0 : x0 + block].mean())
            idx = min(int(density * bins), bins - 1)
            counts[idx] += 1.0
    return Histogram(counts / counts.sum())
