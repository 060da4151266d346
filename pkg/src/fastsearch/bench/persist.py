"""Bit-exact binary persistence for direct indices.

Layout (all little-endian):

========  =====  =====================================================
offset    size   field
========  =====  =====================================================
0         8      magic ``FBSIDX1\\0``
8         2      format version (u16, currently 1)
10        1      precision (u8: 0 = single, 1 = double)
11        1      bucket-index bit width qbits (u8: 32 or 64)
12        1      gap q (u8)
13        3      reserved, zero
16        8      N, interval count (u64)
24        8      R, largest bucket (u64)
32        8      H as a raw IEEE-754 binary64 bit pattern (u64)
40        8      X0 as a raw IEEE-754 binary64 bit pattern (u64)
48        4(R+1) K table payload, u32 entries
...       4      CRC-32 of the K payload (u32)
========  =====  =====================================================

Scale factor and origin travel as raw bit patterns (single-precision
values widen exactly to binary64), so a round trip reproduces the index
bit for bit and searches behave identically.
"""

from __future__ import annotations

import struct
import zlib
from pathlib import Path

import numpy as np

from ..direct import DirectIndex, K_DTYPE
from ..errors import BadMagic, ChecksumMismatch, TruncatedFile, VersionMismatch

MAGIC = b"FBSIDX1\0"
VERSION = 1

_HEADER = struct.Struct("<8sHBBB3sQQQQ")
_PRECISION_CODE = {"single": 0, "double": 1}
_PRECISION_NAME = {0: "single", 1: "double"}


def save_index(idx: DirectIndex, path) -> int:
    """Write the index to ``path``; returns the byte count written."""
    h_bits = struct.unpack("<Q", struct.pack("<d", float(idx.h)))[0]
    x0_bits = struct.unpack("<Q", struct.pack("<d", float(idx.x0)))[0]
    header = _HEADER.pack(
        MAGIC,
        VERSION,
        _PRECISION_CODE[idx.precision],
        idx.qbits,
        idx.q,
        b"\0\0\0",
        idx.n,
        idx.r,
        h_bits,
        x0_bits,
    )
    payload = np.ascontiguousarray(idx.k, dtype="<u4").tobytes()
    crc = struct.pack("<I", zlib.crc32(payload))
    data = header + payload + crc
    Path(path).write_bytes(data)
    return len(data)


def load_index(path) -> DirectIndex:
    """Read an index back; fused records are not stored and come back empty."""
    data = Path(path).read_bytes()
    if len(data) < 8:
        raise TruncatedFile(f"{path}: shorter than the magic header")
    if data[:8] != MAGIC:
        raise BadMagic(f"{path}: not an index file")
    if len(data) < _HEADER.size:
        raise TruncatedFile(f"{path}: incomplete header")
    (_, version, prec_code, qbits, gap, _, n, r, h_bits, x0_bits) = _HEADER.unpack(
        data[: _HEADER.size]
    )
    if version != VERSION:
        raise VersionMismatch(f"{path}: format version {version}, expected {VERSION}")
    if prec_code not in _PRECISION_NAME or qbits not in (32, 64) or gap < 1:
        raise VersionMismatch(f"{path}: unrecognized header fields")
    payload_len = (r + 1) * 4
    end = _HEADER.size + payload_len
    if len(data) < end + 4:
        raise TruncatedFile(f"{path}: payload or checksum missing")
    payload = data[_HEADER.size : end]
    (crc_stored,) = struct.unpack("<I", data[end : end + 4])
    if zlib.crc32(payload) != crc_stored:
        raise ChecksumMismatch(f"{path}: K payload corrupted")

    precision = _PRECISION_NAME[prec_code]
    dtype = np.float32 if precision == "single" else np.float64
    (h64,) = struct.unpack("<d", struct.pack("<Q", h_bits))
    (x064,) = struct.unpack("<d", struct.pack("<Q", x0_bits))
    k = np.frombuffer(payload, dtype="<u4").astype(K_DTYPE)
    k.setflags(write=False)
    left_pad = np.full(gap - 1, dtype(x064), dtype=dtype)
    left_pad.setflags(write=False)
    return DirectIndex(
        x0=dtype(x064),
        h=dtype(h64),
        r=int(r),
        q=int(gap),
        k=k,
        qbits=int(qbits),
        n=int(n),
        precision=precision,
        left_pad=left_pad,
    )
