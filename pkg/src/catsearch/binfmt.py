"""Framed binary container used by index and model files.

Layout::

    magic        8 bytes
    version      u16
    body_length  u64   (bytes between this field and the checksum)
    body         body_length bytes
    crc32        u32   (over every preceding byte)

All integers are little-endian and fixed width; strings are a u32 byte
length followed by UTF-8.
"""

from __future__ import annotations

import struct
import zlib

_PREAMBLE = struct.Struct("<8sHQ")
_CRC = struct.Struct("<I")


class FormatError(Exception):
    """A file could not be loaded."""


class BadMagicError(FormatError):
    pass


class VersionMismatchError(FormatError):
    pass


class TruncatedFileError(FormatError):
    pass


class ChecksumError(FormatError):
    pass


class Writer:
    def __init__(self):
        self._parts: list[bytes] = []

    def u8(self, v: int):
        self._parts.append(struct.pack("<B", v))

    def u32(self, v: int):
        self._parts.append(struct.pack("<I", v))

    def u64(self, v: int):
        self._parts.append(struct.pack("<Q", v))

    def f64(self, v: float):
        self._parts.append(struct.pack("<d", v))

    def raw(self, b: bytes):
        self._parts.append(b)

    def str(self, s: str):
        b = s.encode("utf-8")
        self.u32(len(b))
        self._parts.append(b)

    def getvalue(self) -> bytes:
        return b"".join(self._parts)


class Reader:
    def __init__(self, data: bytes):
        self._data = data
        self._pos = 0

    def _take(self, n: int) -> bytes:
        end = self._pos + n
        if end > len(self._data):
            raise TruncatedFileError(f"unexpected end of data at offset {self._pos}")
        b = self._data[self._pos:end]
        self._pos = end
        return b

    def u8(self) -> int:
        return self._take(1)[0]

    def u32(self) -> int:
        return struct.unpack("<I", self._take(4))[0]

    def u64(self) -> int:
        return struct.unpack("<Q", self._take(8))[0]

    def f64(self) -> float:
        return struct.unpack("<d", self._take(8))[0]

    def raw(self, n: int) -> bytes:
        return self._take(n)

    def str(self) -> str:
        n = self.u32()
        try:
            return self._take(n).decode("utf-8")
        except UnicodeDecodeError as e:
            raise FormatError(f"invalid UTF-8 string: {e}") from e

    def at_end(self) -> bool:
        return self._pos == len(self._data)


def frame(magic: bytes, version: int, body: bytes) -> bytes:
    assert len(magic) == 8
    head = _PREAMBLE.pack(magic, version, len(body)) + body
    return head + _CRC.pack(zlib.crc32(head))


def unframe(data: bytes, magic: bytes, version: int) -> bytes:
    """Validate a framed blob and return its body."""
    if len(data) < _PREAMBLE.size + _CRC.size:
        if not magic.startswith(data[:8]):
            raise BadMagicError("not a catsearch file (bad magic)")
        raise TruncatedFileError(f"file too short ({len(data)} bytes)")
    got_magic, got_version, body_len = _PREAMBLE.unpack_from(data)
    if got_magic != magic:
        raise BadMagicError(f"bad magic {got_magic!r}, expected {magic!r}")
    if got_version != version:
        raise VersionMismatchError(f"format version {got_version}, this build reads {version}")
    expected = _PREAMBLE.size + body_len + _CRC.size
    if len(data) < expected:
        raise TruncatedFileError(f"file is {len(data)} bytes, header declares {expected}")
    if len(data) > expected:
        raise ChecksumError(f"{len(data) - expected} unexpected trailing bytes")
    (crc,) = _CRC.unpack_from(data, expected - _CRC.size)
    if zlib.crc32(data[: expected - _CRC.size]) != crc:
        raise ChecksumError("checksum mismatch; file is corrupt")
    return data[_PREAMBLE.size: _PREAMBLE.size + body_len]
