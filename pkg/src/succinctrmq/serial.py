"""Tagged, versioned byte-stream container and low-level packing helpers.

All multi-byte integers are little-endian.  A stream is::

    magic (4 bytes) | version (u16) | section count (u16) | sections...

where each section is ``tag (4 bytes) | length (u64) | payload``.
Bit payloads are padded to byte boundaries with zero bits.  See FORMAT.md
for the per-structure layouts.
"""

from __future__ import annotations

import struct

MAGIC = b"SRMQ"


class DecodeError(ValueError):
    """Raised when a serialized stream is malformed or truncated."""


def encode_varint(value: int) -> bytes:
    """LEB128 unsigned varint."""
    if value < 0:
        raise ValueError("varint must be non-negative")
    out = bytearray()
    while True:
        b = value & 0x7F
        value >>= 7
        if value:
            out.append(b | 0x80)
        else:
            out.append(b)
            return bytes(out)


def decode_varint(data: bytes, offset: int = 0) -> tuple[int, int]:
    """Return (value, next_offset)."""
    result = 0
    shift = 0
    pos = offset
    while True:
        if pos >= len(data):
            raise DecodeError("truncated varint")
        b = data[pos]
        pos += 1
        result |= (b & 0x7F) << shift
        if not b & 0x80:
            return result, pos
        shift += 7
        if shift > 70:
            raise DecodeError("varint too long")


def bits_to_bytes(bits) -> bytes:
    """Pack a 0/1 sequence MSB-first, zero-padded to a byte boundary."""
    out = bytearray((len(bits) + 7) // 8)
    for i, b in enumerate(bits):
        if b:
            out[i >> 3] |= 0x80 >> (i & 7)
    return bytes(out)


def bytes_to_bits(data: bytes, nbits: int) -> list[int]:
    """Inverse of bits_to_bytes."""
    if nbits > 8 * len(data):
        raise DecodeError("bit payload shorter than declared length")
    return [(data[i >> 3] >> (7 - (i & 7))) & 1 for i in range(nbits)]


def pack_uints(values, width_bytes: int = 8) -> bytes:
    fmt = {1: "B", 2: "H", 4: "I", 8: "Q"}[width_bytes]
    return struct.pack(f"<{len(values)}{fmt}", *values)


def unpack_uints(data: bytes, width_bytes: int = 8) -> list[int]:
    fmt = {1: "B", 2: "H", 4: "I", 8: "Q"}[width_bytes]
    count = len(data) // width_bytes
    return list(struct.unpack(f"<{count}{fmt}", data[: count * width_bytes]))


def write_stream(version: int, sections: list[tuple[bytes, bytes]]) -> bytes:
    out = bytearray()
    out += MAGIC
    out += struct.pack("<HH", version, len(sections))
    for tag, payload in sections:
        if len(tag) != 4:
            raise ValueError("section tag must be 4 bytes")
        out += tag
        out += struct.pack("<Q", len(payload))
        out += payload
    return bytes(out)


def read_stream(data: bytes) -> tuple[int, dict[bytes, bytes]]:
    if len(data) < 8 or data[:4] != MAGIC:
        raise DecodeError("bad magic")
    version, count = struct.unpack("<HH", data[4:8])
    pos = 8
    sections: dict[bytes, bytes] = {}
    for _ in range(count):
        if pos + 12 > len(data):
            raise DecodeError("truncated section header")
        tag = data[pos : pos + 4]
        (length,) = struct.unpack("<Q", data[pos + 4 : pos + 12])
        pos += 12
        if pos + length > len(data):
            raise DecodeError("truncated section payload")
        sections[tag] = data[pos : pos + length]
        pos += length
    return version, sections
