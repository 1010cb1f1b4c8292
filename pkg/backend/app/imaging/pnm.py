"""
PNM codec
Reads P2 (ASCII) and P5 (binary) graymaps, writes P2/P5 and P6 pixmaps.
Header comments ('#' to end of line) are accepted and never emitted; files
are always written with maxval 255.
"""

from pathlib import Path
from typing import Tuple, Union

import numpy as np

from app.errors import (
    PnmError,
    PnmHeaderError,
    PnmMaxvalError,
    PnmTruncatedError,
    PnmValueError,
)
from app.imaging.image import Image

WHITESPACE = b" \t\n\r\v\f"


class _HeaderReader:
    """Token scanner over the PNM header that tracks the byte offset."""

    def __init__(self, data: bytes, pos: int = 0):
        self.data = data
        self.pos = pos

    def _skip_space_and_comments(self):
        data = self.data
        while self.pos < len(data):
            c = data[self.pos:self.pos + 1]
            if c in WHITESPACE:
                self.pos += 1
            elif c == b"#":
                end = data.find(b"\n", self.pos)
                self.pos = len(data) if end < 0 else end + 1
            else:
                break

    def next_int(self, what: str, error=PnmHeaderError) -> Tuple[int, int]:
        """Return (value, offset of the token)."""
        self._skip_space_and_comments()
        start = self.pos
        if start >= len(self.data):
            raise PnmTruncatedError(f"missing {what}", start)
        while self.pos < len(self.data) and self.data[self.pos:self.pos + 1] not in WHITESPACE \
                and self.data[self.pos:self.pos + 1] != b"#":
            self.pos += 1
        token = self.data[start:self.pos]
        if not token.isdigit():
            raise error(f"expected {what}, found {token[:16]!r}", start)
        return int(token), start


def read_pnm(data: bytes) -> Image:
    """Decode a P2 or P5 graymap.

    Raises:
        PnmHeaderError: bad magic number or header token
        PnmMaxvalError: maxval outside [1, 255]
        PnmTruncatedError: payload shorter than width * height samples
        PnmValueError: sample above maxval or non-numeric ASCII sample
    """
    data = bytes(data)
    magic = data[:2]
    if magic not in (b"P2", b"P5"):
        raise PnmHeaderError(f"unsupported magic number {magic!r}", 0)

    reader = _HeaderReader(data, 2)
    width, off = reader.next_int("width")
    if width < 1:
        raise PnmHeaderError("width must be positive", off)
    height, off = reader.next_int("height")
    if height < 1:
        raise PnmHeaderError("height must be positive", off)
    maxval, off = reader.next_int("maxval")
    if not 1 <= maxval <= 255:
        raise PnmMaxvalError(f"maxval {maxval} not in [1, 255]", off)

    count = width * height
    if magic == b"P5":
        # exactly one whitespace byte separates the header from the raster
        if reader.pos >= len(data):
            raise PnmTruncatedError(f"expected {count} payload bytes, found 0", reader.pos)
        start = reader.pos + 1
        payload = data[start:start + count]
        if len(payload) < count:
            raise PnmTruncatedError(f"expected {count} payload bytes, found {len(payload)}", len(data))
        values = np.frombuffer(payload, dtype=np.uint8)
        if maxval < 255 and values.max() > maxval:
            bad = int(np.argmax(values > maxval))
            raise PnmValueError(f"sample {values[bad]} exceeds maxval {maxval}", start + bad)
    else:
        values = np.empty(count, dtype=np.uint8)
        for i in range(count):
            v, off = reader.next_int("sample", error=PnmValueError)
            if v > maxval:
                raise PnmValueError(f"sample {v} exceeds maxval {maxval}", off)
            values[i] = v
    return Image(values.reshape(height, width))


def write_pnm(img: Image, ascii: bool = False) -> bytes:
    """Encode as P2 (ascii=True) or P5."""
    header = f"{'P2' if ascii else 'P5'}\n{img.width} {img.height}\n255\n".encode("ascii")
    if not ascii:
        return header + img.pixels.tobytes()
    rows = (" ".join(str(v) for v in row) for row in img.pixels.tolist())
    return header + "".join(r + "\n" for r in rows).encode("ascii")


def write_ppm(rgb: np.ndarray) -> bytes:
    """Encode an (height, width, 3) uint8 array as P6."""
    rgb = np.asarray(rgb, dtype=np.uint8)
    if rgb.ndim != 3 or rgb.shape[2] != 3:
        raise ValueError(f"expected (height, width, 3) array, got {rgb.shape}")
    height, width = rgb.shape[:2]
    return f"P6\n{width} {height}\n255\n".encode("ascii") + rgb.tobytes()


def read_pnm_file(path: Union[str, Path]) -> Image:
    """read_pnm on a file; errors name the file."""
    data = Path(path).read_bytes()
    try:
        return read_pnm(data)
    except PnmError as e:
        raise e.with_source(str(path)) from e
