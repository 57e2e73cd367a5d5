"""Little-endian binary packing helpers for the persistence formats."""

from __future__ import annotations

import struct

from .errors import DataError


def pack_str(s: str) -> bytes:
    raw = s.encode("utf-8")
    if len(raw) > 0xFFFF:
        raise DataError(f"string too long to serialize ({len(raw)} bytes)")
    return struct.pack("<H", len(raw)) + raw


class Reader:
    """Cursor over a bytes buffer with truncation checks."""

    def __init__(self, data: bytes, origin: str):
        self.data = data
        self.pos = 0
        self.origin = origin

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise DataError(f"{self.origin}: truncated file")
        out = self.data[self.pos : self.pos + n]
        self.pos += n
        return out

    def unpack(self, fmt: str):
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))

    def unpack_str(self) -> str:
        (length,) = self.unpack("<H")
        return self.take(length).decode("utf-8")

    def expect_end(self):
        if self.pos != len(self.data):
            raise DataError(f"{self.origin}: {len(self.data) - self.pos} trailing bytes")
