"""Minimal PNG and binary PGM/PPM codecs.

Reads 8-bit greyscale or RGB PNG (non-interlaced) and binary P5/P6 files
with maxval <= 255. Writes 8-bit PNG with a fixed Sub filter on every row and
fixed zlib settings, so identical pixels always encode to identical bytes.
"""

from __future__ import annotations

import os
import struct
import zlib

import numpy as np

from ..errors import FormatError, UnsupportedImageError, ValidationError

PNG_SIGNATURE = b"\x89PNG\r\n\x1a\n"
_COLOR_CHANNELS = {0: 1, 2: 3}
_ZLIB_LEVEL = 6


def _chunks(data: bytes, path):
    pos = len(PNG_SIGNATURE)
    while True:
        if pos + 8 > len(data):
            raise FormatError("truncated PNG: missing chunk header", path)
        length, ctype = struct.unpack(">I4s", data[pos:pos + 8])
        end = pos + 8 + length
        if end + 4 > len(data):
            raise FormatError(f"truncated PNG: chunk {ctype!r} runs past end of file", path)
        body = data[pos + 8:end]
        (crc,) = struct.unpack(">I", data[end:end + 4])
        if zlib.crc32(ctype + body) & 0xFFFFFFFF != crc:
            raise FormatError(f"CRC mismatch in chunk {ctype!r}", path)
        yield ctype, body
        if ctype == b"IEND":
            return
        pos = end + 4


def _unfilter(raw: bytes, height: int, width: int, bpp: int, path) -> np.ndarray:
    stride = width * bpp
    if len(raw) != height * (stride + 1):
        raise FormatError(f"image data has {len(raw)} bytes, expected {height * (stride + 1)}", path)
    rows = np.frombuffer(raw, dtype=np.uint8).reshape(height, stride + 1)
    if height and rows[:, 0].max() <= 1:
        # None/Sub only: rows are independent, so undo them all at once
        acc = np.cumsum(rows[:, 1:].reshape(height, width, bpp), axis=1, dtype=np.uint64)
        sub = (acc & 0xFF).astype(np.uint8).reshape(height, stride)
        return np.where(rows[:, :1] == 1, sub, rows[:, 1:])
    out = np.zeros((height, stride), dtype=np.uint8)
    prev = np.zeros(stride, dtype=np.uint8)
    for y in range(height):
        ftype = int(rows[y, 0])
        line = rows[y, 1:]
        if ftype == 0:
            cur = line.copy()
        elif ftype == 1:
            acc = np.cumsum(line.reshape(width, bpp).astype(np.uint64), axis=0)
            cur = (acc & 0xFF).astype(np.uint8).reshape(stride)
        elif ftype == 2:
            cur = line + prev
        elif ftype in (3, 4):
            cur = _unfilter_sequential(ftype, line, prev, bpp)
        else:
            raise FormatError(f"row {y} uses unknown filter type {ftype}", path)
        out[y] = cur
        prev = cur
    return out


def _unfilter_sequential(ftype: int, line: np.ndarray, prev: np.ndarray, bpp: int) -> np.ndarray:
    filt = line.tolist()
    up = prev.tolist()
    cur = [0] * len(filt)
    for i, f in enumerate(filt):
        a = cur[i - bpp] if i >= bpp else 0
        b = up[i]
        if ftype == 3:
            cur[i] = (f + ((a + b) >> 1)) & 0xFF
        else:
            c = up[i - bpp] if i >= bpp else 0
            p = a + b - c
            pa, pb, pc = abs(p - a), abs(p - b), abs(p - c)
            if pa <= pb and pa <= pc:
                pred = a
            elif pb <= pc:
                pred = b
            else:
                pred = c
            cur[i] = (f + pred) & 0xFF
    return np.array(cur, dtype=np.uint8)


def decode_png(data: bytes, path=None) -> np.ndarray:
    """Decode PNG bytes to a uint8 ``(H, W, C)`` array."""
    if not data.startswith(PNG_SIGNATURE):
        raise FormatError("not a PNG file", path)
    header = None
    idat = []
    for ctype, body in _chunks(data, path):
        if ctype == b"IHDR":
            if len(body) != 13:
                raise FormatError("malformed IHDR chunk", path)
            header = struct.unpack(">IIBBBBB", body)
        elif ctype == b"IDAT":
            idat.append(body)
    if header is None:
        raise FormatError("PNG has no IHDR chunk", path)
    width, height, depth, color, compression, filter_method, interlace = header
    if depth != 8:
        raise UnsupportedImageError(f"unsupported bit depth {depth}; only 8-bit images are read", path)
    if color not in _COLOR_CHANNELS:
        raise UnsupportedImageError(f"unsupported colour type {color}; only greyscale and RGB are read", path)
    if compression != 0 or filter_method != 0:
        raise FormatError("unknown compression or filter method", path)
    if interlace != 0:
        raise UnsupportedImageError("interlaced PNG is not supported", path)
    if width == 0 or height == 0:
        raise FormatError("PNG has zero width or height", path)
    try:
        raw = zlib.decompress(b"".join(idat))
    except zlib.error as exc:
        raise FormatError(f"corrupt image data: {exc}", path) from None
    channels = _COLOR_CHANNELS[color]
    pixels = _unfilter(raw, height, width, channels, path)
    return pixels.reshape(height, width, channels)


def _chunk(ctype: bytes, body: bytes) -> bytes:
    crc = zlib.crc32(ctype + body) & 0xFFFFFFFF
    return struct.pack(">I", len(body)) + ctype + body + struct.pack(">I", crc)


def encode_png(pixels: np.ndarray) -> bytes:
    """Encode a uint8 ``(H, W)`` or ``(H, W, C)`` array, C in {1, 3}."""
    pixels = np.asarray(pixels)
    if pixels.ndim == 2:
        pixels = pixels[:, :, None]
    if pixels.dtype != np.uint8:
        raise ValidationError(f"encode_png needs uint8 pixels, got {pixels.dtype}")
    height, width, channels = pixels.shape
    color = {1: 0, 3: 2}.get(channels)
    if color is None:
        raise ValidationError(f"cannot write {channels}-channel image; use 1 or 3 channels")
    rows = pixels.reshape(height, width * channels)
    filtered = rows.copy()
    filtered[:, channels:] = rows[:, channels:] - rows[:, :-channels]
    raw = np.concatenate([np.ones((height, 1), dtype=np.uint8), filtered], axis=1)
    header = struct.pack(">IIBBBBB", width, height, 8, color, 0, 0, 0)
    return (PNG_SIGNATURE + _chunk(b"IHDR", header)
            + _chunk(b"IDAT", zlib.compress(raw.tobytes(), _ZLIB_LEVEL)) + _chunk(b"IEND", b""))


def _pnm_tokens(data: bytes, count: int, path):
    tokens = []
    pos = 2
    while len(tokens) < count:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if pos < len(data) and data[pos:pos + 1] == b"#":
            while pos < len(data) and data[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace() and data[pos:pos + 1] != b"#":
            pos += 1
        if start == pos:
            raise FormatError("truncated PNM header", path)
        tok = data[start:pos]
        if not tok.isdigit():
            raise FormatError(f"bad PNM header field {tok!r}", path)
        tokens.append(int(tok))
    # exactly one whitespace byte separates the header from the raster
    return tokens, pos + 1


def decode_pnm(data: bytes, path=None) -> np.ndarray:
    magic = data[:2]
    if magic not in (b"P5", b"P6"):
        raise UnsupportedImageError(f"unsupported PNM variant {magic!r}; only binary P5/P6 are read", path)
    (width, height, maxval), start = _pnm_tokens(data, 3, path)
    if width == 0 or height == 0:
        raise FormatError("PNM has zero width or height", path)
    if not 0 < maxval <= 255:
        raise UnsupportedImageError(f"unsupported maxval {maxval}; only 8-bit PNM is read", path)
    channels = 1 if magic == b"P5" else 3
    size = width * height * channels
    body = data[start:start + size]
    if len(body) < size:
        raise FormatError(f"truncated PNM raster: {len(body)} of {size} bytes", path)
    return np.frombuffer(body, dtype=np.uint8).reshape(height, width, channels).copy()


def encode_pnm(pixels: np.ndarray) -> bytes:
    pixels = np.asarray(pixels, dtype=np.uint8)
    if pixels.ndim == 2:
        pixels = pixels[:, :, None]
    height, width, channels = pixels.shape
    magic = {1: b"P5", 3: b"P6"}.get(channels)
    if magic is None:
        raise ValidationError(f"cannot write {channels}-channel PNM")
    return magic + f"\n{width} {height}\n255\n".encode() + pixels.tobytes()


def to_uint8(img) -> np.ndarray:
    """Clamp to [0, 255] and round half away from zero."""
    arr = np.clip(np.asarray(img, dtype=np.float64), 0.0, 255.0)
    return np.floor(arr + 0.5).astype(np.uint8)


def load_image(path: str | os.PathLike) -> np.ndarray:
    """Read a PNG, PGM or PPM into a float64 ``(H, W, C)`` array in [0, 255]."""
    with open(path, "rb") as fh:
        data = fh.read()
    if data.startswith(PNG_SIGNATURE):
        pixels = decode_png(data, path)
    elif data[:1] == b"P":
        pixels = decode_pnm(data, path)
    else:
        raise UnsupportedImageError("unrecognised image format (expected PNG or binary PNM)", path)
    return pixels.astype(np.float64)


def save_image(img, path: str | os.PathLike) -> None:
    """Write ``img`` as an 8-bit PNG."""
    data = encode_png(to_uint8(img if np.ndim(img) == 3 else np.asarray(img)[:, :, None]))
    with open(path, "wb") as fh:
        fh.write(data)
