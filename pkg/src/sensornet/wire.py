"""Byte-wise big-endian serialization and the protocol message layouts.

Multi-byte integers are always written most-significant byte first with an
explicit byte order, so the encoding is independent of host byte order and
of where in the buffer a field happens to start.

Layouts (all integers unsigned, big-endian)::

    FLOOD        kind originator:u64 seq:u16 ttl:u8 payload...
    TREE_BEACON  kind sink:u64 hops:u8
    TREE_DATA    kind originator:u64 payload...
    DSDV_UPDATE  kind count:u16 count*(dest:u64 next_hop:u64 hops:u16 seq:u32)
    DSDV_DATA    kind originator:u64 dest:u64 payload...
    DSR_RREQ     kind req_id:u16 target:u64 path_len:u8 path_len*u64
    DSR_RREP     kind req_id:u16 target:u64 path_len:u8 path_len*u64
    DSR_DATA     kind path_len:u8 path_len*u64 cursor:u8 payload...
    DSR_ACK      kind path_len:u8 path_len*u64 cursor:u8
    SECURE       kind ciphertext...
"""
from __future__ import annotations

import enum
import struct
from dataclasses import dataclass

from .kernel import MTU, ErrorCode, NetError

WIDTHS = (8, 16, 32, 64)


class WireError(ValueError):
    pass


class MsgKind(enum.IntEnum):
    FLOOD = 0x01
    TREE_BEACON = 0x02
    TREE_DATA = 0x03
    DSDV_UPDATE = 0x04
    DSDV_DATA = 0x05
    DSR_RREQ = 0x06
    DSR_RREP = 0x07
    DSR_DATA = 0x08
    DSR_ACK = 0x09
    SECURE = 0x0A


class WireBuffer:
    """Bounded byte buffer with a single read/write cursor.

    ``offset`` shifts where the cursor starts; the bytes before it are
    padding and are not part of :meth:`getvalue`.
    """

    def __init__(self, data: bytes | None = None, capacity: int = MTU, offset: int = 0):
        if data is None:
            self._buf = bytearray(offset + capacity)
            self._end = offset
        else:
            self._buf = bytearray(offset) + bytearray(data)
            self._end = len(self._buf)
        self._start = offset
        self.cursor = offset

    def __len__(self) -> int:
        return self._end - self._start

    @property
    def remaining(self) -> int:
        return self._end - self.cursor

    def getvalue(self) -> bytes:
        return bytes(self._buf[self._start:self._end])

    def write_uint(self, width: int, value: int) -> ErrorCode:
        if width not in WIDTHS:
            raise ValueError(f"unsupported width {width}")
        if not 0 <= value < (1 << width):
            raise ValueError(f"{value} does not fit in {width} bits")
        n = width // 8
        if self.cursor + n > len(self._buf):
            return ErrorCode.BUFFER_FULL
        self._buf[self.cursor:self.cursor + n] = value.to_bytes(n, "big")
        self.cursor += n
        self._end = max(self._end, self.cursor)
        return ErrorCode.OK

    def read_uint(self, width: int) -> int:
        if width not in WIDTHS:
            raise ValueError(f"unsupported width {width}")
        n = width // 8
        if self.cursor + n > self._end:
            raise WireError(f"underrun reading u{width} at offset {self.cursor - self._start}")
        value = int.from_bytes(self._buf[self.cursor:self.cursor + n], "big")
        self.cursor += n
        return value

    def write_bytes(self, data: bytes) -> ErrorCode:
        if self.cursor + len(data) > len(self._buf):
            return ErrorCode.BUFFER_FULL
        self._buf[self.cursor:self.cursor + len(data)] = data
        self.cursor += len(data)
        self._end = max(self._end, self.cursor)
        return ErrorCode.OK

    def read_bytes(self, n: int) -> bytes:
        if n < 0 or self.cursor + n > self._end:
            raise WireError(f"underrun reading {n} bytes at offset {self.cursor - self._start}")
        out = bytes(self._buf[self.cursor:self.cursor + n])
        self.cursor += n
        return out

    def read_rest(self) -> bytes:
        return self.read_bytes(self.remaining)

    def write_record(self, layout: struct.Struct, *values: int) -> ErrorCode:
        """Pack a fixed big-endian record (``layout`` must use ``>``)."""
        n = layout.size
        if self.cursor + n > len(self._buf):
            return ErrorCode.BUFFER_FULL
        layout.pack_into(self._buf, self.cursor, *values)
        self.cursor += n
        self._end = max(self._end, self.cursor)
        return ErrorCode.OK

    def read_record(self, layout: struct.Struct) -> tuple:
        n = layout.size
        if self.cursor + n > self._end:
            raise WireError(f"underrun reading {n}-byte record at offset {self.cursor - self._start}")
        values = layout.unpack_from(self._buf, self.cursor)
        self.cursor += n
        return values


@dataclass(frozen=True)
class Flood:
    originator: int
    seq: int
    ttl: int
    payload: bytes = b""
    kind = MsgKind.FLOOD


@dataclass(frozen=True)
class TreeBeacon:
    sink: int
    hops: int
    kind = MsgKind.TREE_BEACON


@dataclass(frozen=True)
class TreeData:
    originator: int
    payload: bytes = b""
    kind = MsgKind.TREE_DATA


@dataclass(frozen=True)
class DsdvAdvert:
    dest: int
    next_hop: int
    hops: int
    seq: int


@dataclass(frozen=True)
class DsdvUpdate:
    entries: tuple[DsdvAdvert, ...]
    kind = MsgKind.DSDV_UPDATE


@dataclass(frozen=True)
class DsdvData:
    originator: int
    dest: int
    payload: bytes = b""
    kind = MsgKind.DSDV_DATA


@dataclass(frozen=True)
class DsrRreq:
    req_id: int
    target: int
    path: tuple[int, ...]
    kind = MsgKind.DSR_RREQ


@dataclass(frozen=True)
class DsrRrep:
    req_id: int
    target: int
    path: tuple[int, ...]
    kind = MsgKind.DSR_RREP


@dataclass(frozen=True)
class DsrData:
    path: tuple[int, ...]
    cursor: int
    payload: bytes = b""
    kind = MsgKind.DSR_DATA


@dataclass(frozen=True)
class DsrAck:
    path: tuple[int, ...]
    cursor: int
    kind = MsgKind.DSR_ACK


@dataclass(frozen=True)
class Secure:
    ciphertext: bytes
    kind = MsgKind.SECURE


# dest:u64 next_hop:u64 hops:u16 seq:u32, no padding
DSDV_ADVERT = struct.Struct(">QQHI")
DSDV_ADVERT_SIZE = DSDV_ADVERT.size

HEADER_SIZE = {
    MsgKind.FLOOD: 1 + 8 + 2 + 1,
    MsgKind.TREE_DATA: 1 + 8,
    MsgKind.DSDV_DATA: 1 + 8 + 8,
    MsgKind.SECURE: 1,
}


def dsr_data_header_size(path_len: int) -> int:
    return 1 + 1 + 8 * path_len + 1


def _put(buf: WireBuffer, width: int, value: int) -> None:
    if buf.write_uint(width, value):
        raise NetError(ErrorCode.BUFFER_FULL, "message exceeds buffer")


def _put_bytes(buf: WireBuffer, data: bytes) -> None:
    if buf.write_bytes(data):
        raise NetError(ErrorCode.BUFFER_FULL, "message exceeds buffer")


def _put_path(buf: WireBuffer, path) -> None:
    _put(buf, 8, len(path))
    for node in path:
        _put(buf, 64, node)


def _get_path(buf: WireBuffer) -> tuple[int, ...]:
    n = buf.read_uint(8)
    return tuple(buf.read_uint(64) for _ in range(n))


def encode(msg, capacity: int = MTU, offset: int = 0) -> bytes:
    buf = WireBuffer(capacity=capacity, offset=offset)
    _put(buf, 8, int(msg.kind))
    if isinstance(msg, Flood):
        _put(buf, 64, msg.originator)
        _put(buf, 16, msg.seq)
        _put(buf, 8, msg.ttl)
        _put_bytes(buf, msg.payload)
    elif isinstance(msg, TreeBeacon):
        _put(buf, 64, msg.sink)
        _put(buf, 8, msg.hops)
    elif isinstance(msg, TreeData):
        _put(buf, 64, msg.originator)
        _put_bytes(buf, msg.payload)
    elif isinstance(msg, DsdvUpdate):
        _put(buf, 16, len(msg.entries))
        for e in msg.entries:
            if buf.write_record(DSDV_ADVERT, e.dest, e.next_hop, e.hops, e.seq):
                raise NetError(ErrorCode.BUFFER_FULL, "message exceeds buffer")
    elif isinstance(msg, DsdvData):
        _put(buf, 64, msg.originator)
        _put(buf, 64, msg.dest)
        _put_bytes(buf, msg.payload)
    elif isinstance(msg, (DsrRreq, DsrRrep)):
        _put(buf, 16, msg.req_id)
        _put(buf, 64, msg.target)
        _put_path(buf, msg.path)
    elif isinstance(msg, (DsrData, DsrAck)):
        _put_path(buf, msg.path)
        _put(buf, 8, msg.cursor)
        if isinstance(msg, DsrData):
            _put_bytes(buf, msg.payload)
    elif isinstance(msg, Secure):
        _put_bytes(buf, msg.ciphertext)
    else:
        raise TypeError(f"not a message: {msg!r}")
    return buf.getvalue()


def peek_kind(data: bytes) -> int | None:
    return data[0] if data else None


def decode(data: bytes, offset: int = 0):
    buf = WireBuffer(data, offset=offset)
    raw = buf.read_uint(8)
    try:
        kind = MsgKind(raw)
    except ValueError:
        raise WireError(f"unknown message kind 0x{raw:02X}") from None
    if kind is MsgKind.FLOOD:
        return Flood(buf.read_uint(64), buf.read_uint(16), buf.read_uint(8), buf.read_rest())
    if kind is MsgKind.TREE_BEACON:
        msg = TreeBeacon(buf.read_uint(64), buf.read_uint(8))
    elif kind is MsgKind.TREE_DATA:
        return TreeData(buf.read_uint(64), buf.read_rest())
    elif kind is MsgKind.DSDV_UPDATE:
        count = buf.read_uint(16)
        msg = DsdvUpdate(tuple(DsdvAdvert(*buf.read_record(DSDV_ADVERT)) for _ in range(count)))
    elif kind is MsgKind.DSDV_DATA:
        return DsdvData(buf.read_uint(64), buf.read_uint(64), buf.read_rest())
    elif kind is MsgKind.DSR_RREQ:
        msg = DsrRreq(buf.read_uint(16), buf.read_uint(64), _get_path(buf))
    elif kind is MsgKind.DSR_RREP:
        msg = DsrRrep(buf.read_uint(16), buf.read_uint(64), _get_path(buf))
    elif kind is MsgKind.DSR_DATA:
        path = _get_path(buf)
        return DsrData(path, buf.read_uint(8), buf.read_rest())
    elif kind is MsgKind.DSR_ACK:
        msg = DsrAck(_get_path(buf), buf.read_uint(8))
    else:
        return Secure(buf.read_rest())
    if buf.remaining:
        raise WireError(f"{buf.remaining} trailing bytes after {kind.name}")
    return msg
