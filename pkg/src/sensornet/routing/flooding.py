from __future__ import annotations

from dataclasses import replace

from ..kernel import BROADCAST, ErrorCode
from ..pstl import StaticMap
from ..wire import HEADER_SIZE, Flood, MsgKind, encode
from .base import RoutingBase

TTL_MAX = 16
SEQ_MOD = 1 << 16


def seq_newer(a: int, b: int) -> bool:
    """Serial-number comparison on the 16-bit sequence space."""
    return 0 < (a - b) % SEQ_MOD < SEQ_MOD // 2


class Flooding(RoutingBase):
    """Duplicate-suppressed flooding.

    Every node delivers each (originator, seq) once and rebroadcasts it
    while the TTL allows.  The receiver argument of ``send`` is ignored:
    all reachable nodes receive the message.
    """

    _header_size = HEADER_SIZE[MsgKind.FLOOD]
    supports_broadcast = True

    def __init__(self, radio, timer, clock=None, ttl: int = TTL_MAX, cache_capacity: int = 16):
        super().__init__(radio, timer, clock)
        self.ttl = ttl
        self.seq = 0
        # originator -> (highest seq, insertion stamp for eviction)
        self.seen = StaticMap(cache_capacity)
        self._stamp = 0

    def _remember(self, originator: int, seq: int) -> None:
        self._stamp += 1
        if self.seen.insert(originator, (seq, self._stamp)):
            oldest = min(self.seen.items(), key=lambda kv: kv[1][1])[0]
            self.seen.erase(oldest)
            self.seen.insert(originator, (seq, self._stamp))

    def is_new(self, originator: int, seq: int) -> bool:
        entry = self.seen.find(originator)
        return entry is None or seq_newer(seq, entry[0])

    def _send(self, receiver: int, payload: bytes) -> ErrorCode:
        self.seq = (self.seq + 1) % SEQ_MOD
        self._remember(self.id(), self.seq)
        return self.radio.send(BROADCAST, encode(Flood(self.id(), self.seq, self.ttl, payload)))

    def _handle(self, sender: int, msg) -> None:
        if not isinstance(msg, Flood) or msg.ttl == 0:
            return
        if not self.is_new(msg.originator, msg.seq):
            self.stats["duplicate"] += 1
            return
        self._remember(msg.originator, msg.seq)
        self._deliver(msg.originator, msg.payload)
        if msg.ttl > 1:
            self.stats["forwarded"] += 1
            self.radio.send(BROADCAST, encode(replace(msg, ttl=msg.ttl - 1)))

    def table_size(self) -> int:
        return len(self.seen)
