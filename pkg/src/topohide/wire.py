"""Binary framing shared by every file format: 4-byte magic, u16 version, fields."""

from __future__ import annotations

import struct

from . import pairing as pg
from .errors import MalformedError

VERSION = 1


class Writer:
    def __init__(self, magic: bytes, version: int = VERSION):
        if len(magic) != 4:
            raise ValueError("magic must be 4 bytes")
        self.parts: list[bytes] = [magic, struct.pack(">H", version)]

    def u8(self, x: int) -> Writer:
        self.parts.append(struct.pack(">B", x))
        return self

    def u16(self, x: int) -> Writer:
        self.parts.append(struct.pack(">H", x))
        return self

    def u32(self, x: int) -> Writer:
        self.parts.append(struct.pack(">I", x))
        return self

    def raw(self, data: bytes) -> Writer:
        self.parts.append(data)
        return self

    def blob(self, data: bytes) -> Writer:
        self.parts.append(struct.pack(">I", len(data)))
        self.parts.append(data)
        return self

    def text(self, s: str) -> Writer:
        return self.blob(s.encode())

    def scalar(self, x: int) -> Writer:
        return self.raw(pg.encode_scalar(x))

    def point(self, elem) -> Writer:
        return self.raw(pg.encode_point(elem))

    def getvalue(self) -> bytes:
        return b"".join(self.parts)


class Reader:
    def __init__(self, data: bytes, magic: bytes, version: int = VERSION):
        self.data = memoryview(bytes(data))
        self.pos = 0
        got = self.take(4)
        if got != magic:
            raise MalformedError(f"bad magic {got!r}, expected {magic!r}")
        v = self.u16()
        if v != version:
            raise MalformedError(f"unsupported version {v}")

    def take(self, n: int) -> bytes:
        if n < 0 or self.pos + n > len(self.data):
            raise MalformedError("truncated input")
        out = bytes(self.data[self.pos:self.pos + n])
        self.pos += n
        return out

    def u8(self) -> int:
        return self.take(1)[0]

    def u16(self) -> int:
        return struct.unpack(">H", self.take(2))[0]

    def u32(self) -> int:
        return struct.unpack(">I", self.take(4))[0]

    def blob(self) -> bytes:
        return self.take(self.u32())

    def text(self) -> str:
        try:
            return self.blob().decode()
        except UnicodeDecodeError:
            raise MalformedError("invalid utf-8 text field") from None

    def scalar(self) -> int:
        return pg.decode_scalar(self.take(pg.SCALAR_BYTES))

    def g1(self):
        return pg.decode_g1(self.take(pg.G1_BYTES))

    def g2(self):
        return pg.decode_g2(self.take(pg.G2_BYTES))

    def gt(self):
        return pg.decode_gt(self.take(pg.GT_BYTES))

    def sub(self, magic: bytes) -> Reader:
        """Reader over a nested length-prefixed framed blob."""
        return Reader(self.blob(), magic)

    def done(self) -> None:
        if self.pos != len(self.data):
            raise MalformedError(f"{len(self.data) - self.pos} trailing bytes")
