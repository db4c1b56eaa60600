"""Side files for colored and variable-order graphs.

``.colors``: magic ``BCOL1\\0``, u64 rows, u32 colors, then one row per graph
position of ``ceil(colors / 8)`` bytes, bits LSB-first.

``.lcs``: magic ``BLCS1\\0``, u64 n, then n little-endian u32 values.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .errors import BadMagicError, TruncatedError
from .reference import ColorMatrix

COLORS_MAGIC = b"BCOL1\0"
COLORS_HEADER = struct.Struct("<6sQI")
LCS_MAGIC = b"BLCS1\0"
LCS_HEADER = struct.Struct("<6sQ")


def row_bytes(colors: int) -> int:
    return (colors + 7) // 8


def colors_to_bytes(M: ColorMatrix) -> bytes:
    packed = np.packbits(M.bits, axis=1, bitorder="little") if M.colors else np.zeros((M.rows, 0), np.uint8)
    return COLORS_HEADER.pack(COLORS_MAGIC, M.rows, M.colors) + packed.tobytes()


def colors_from_bytes(raw: bytes) -> ColorMatrix:
    if raw[:6] != COLORS_MAGIC:
        raise BadMagicError("bad magic: not a .colors file")
    if len(raw) < COLORS_HEADER.size:
        raise TruncatedError("truncated .colors header")
    _, m, c = COLORS_HEADER.unpack_from(raw)
    rb = row_bytes(c)
    body = raw[COLORS_HEADER.size :]
    if len(body) != m * rb:
        raise TruncatedError("truncated: .colors body does not match header")
    packed = np.frombuffer(body, dtype=np.uint8).reshape(m, rb)
    bits = np.unpackbits(packed, axis=1, count=c, bitorder="little").astype(bool)
    return ColorMatrix(bits.reshape(m, c))


def save_colors(M: ColorMatrix, path: str | Path) -> None:
    Path(path).write_bytes(colors_to_bytes(M))


def load_colors(path: str | Path) -> ColorMatrix:
    return colors_from_bytes(Path(path).read_bytes())


def lcs_to_bytes(lcs) -> bytes:
    arr = np.asarray(lcs, dtype="<u4")
    return LCS_HEADER.pack(LCS_MAGIC, arr.shape[0]) + arr.tobytes()


def lcs_from_bytes(raw: bytes) -> np.ndarray:
    if raw[:6] != LCS_MAGIC:
        raise BadMagicError("bad magic: not a .lcs file")
    if len(raw) < LCS_HEADER.size:
        raise TruncatedError("truncated .lcs header")
    _, n = LCS_HEADER.unpack_from(raw)
    body = raw[LCS_HEADER.size :]
    if len(body) != 4 * n:
        raise TruncatedError("truncated: .lcs body does not match header")
    return np.frombuffer(body, dtype="<u4").astype(np.int64)


def save_lcs(lcs, path: str | Path) -> None:
    Path(path).write_bytes(lcs_to_bytes(lcs))


def load_lcs(path: str | Path) -> np.ndarray:
    return lcs_from_bytes(Path(path).read_bytes())
