"""Canonical byte encoding shared by hashing, signing and block serialization.

The encoding is bit-exact across platforms: byte-string fields are written
as a 4-byte big-endian length followed by the raw bytes, integers as 8-byte
big-endian unsigned values, enums as a single byte, and lists as a 4-byte
big-endian element count followed by the encoded elements. Strings are
encoded as UTF-8 byte strings. Hex renderings are always lowercase.
"""

from __future__ import annotations

U64_MAX = 2**64 - 1


class EncodingError(ValueError):
    """Raised when a byte buffer cannot be decoded as a canonical value."""


def write_bytes(out: bytearray, value: bytes) -> None:
    if len(value) > 0xFFFFFFFF:
        raise EncodingError("byte field too long")
    out += len(value).to_bytes(4, "big")
    out += value


def write_str(out: bytearray, value: str) -> None:
    write_bytes(out, value.encode("utf-8"))


def write_u64(out: bytearray, value: int) -> None:
    if not 0 <= value <= U64_MAX:
        raise EncodingError(f"integer out of u64 range: {value}")
    out += value.to_bytes(8, "big")


def write_u8(out: bytearray, value: int) -> None:
    if not 0 <= value <= 0xFF:
        raise EncodingError(f"enum out of byte range: {value}")
    out += value.to_bytes(1, "big")


def write_count(out: bytearray, value: int) -> None:
    if not 0 <= value <= 0xFFFFFFFF:
        raise EncodingError(f"list count out of range: {value}")
    out += value.to_bytes(4, "big")


class Reader:
    """Sequential decoder over one canonical byte buffer."""

    def __init__(self, buf: bytes):
        self._buf = buf
        self._pos = 0

    def _take(self, n: int) -> bytes:
        if self._pos + n > len(self._buf):
            raise EncodingError("unexpected end of buffer")
        chunk = self._buf[self._pos : self._pos + n]
        self._pos += n
        return chunk

    def read_bytes(self) -> bytes:
        length = int.from_bytes(self._take(4), "big")
        return self._take(length)

    def read_str(self) -> str:
        raw = self.read_bytes()
        try:
            return raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise EncodingError("invalid UTF-8 in string field") from exc

    def read_u64(self) -> int:
        return int.from_bytes(self._take(8), "big")

    def read_u8(self) -> int:
        return self._take(1)[0]

    def read_count(self) -> int:
        return int.from_bytes(self._take(4), "big")

    def expect_end(self) -> None:
        if self._pos != len(self._buf):
            raise EncodingError("trailing bytes after value")


def to_hex(data: bytes) -> str:
    return data.hex()


def from_hex(text: str, expected_len: int | None = None) -> bytes:
    try:
        raw = bytes.fromhex(text)
    except ValueError as exc:
        raise EncodingError(f"invalid hex string: {text!r}") from exc
    if text != raw.hex():
        raise EncodingError("hex string must be lowercase")
    if expected_len is not None and len(raw) != expected_len:
        raise EncodingError(f"expected {expected_len} bytes, got {len(raw)}")
    return raw
