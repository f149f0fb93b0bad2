from __future__ import annotations

from dataclasses import dataclass

from ..kernel import BROADCAST, ErrorCode
from ..pstl import StaticMap
from ..wire import (
    DSDV_ADVERT_SIZE, HEADER_SIZE, DsdvAdvert, DsdvData, DsdvUpdate, MsgKind, encode,
)
from .base import RoutingBase

UPDATE_PERIOD = 1000
INFINITE_HOPS = 0xFFFF
SEQ_MOD = 1 << 32


@dataclass(frozen=True)
class DsdvEntry:
    dest: int
    next_hop: int
    hops: int
    seq: int

    @property
    def broken(self) -> bool:
        return self.seq % 2 == 1


class Dsdv(RoutingBase):
    """Destination-sequenced distance vector routing, full dumps only.

    Each update period a node bumps its own sequence number by two and
    broadcasts its whole table (split across as many DSDV_UPDATE frames
    as the MTU requires).  A route is replaced by a fresher sequence
    number, or by a shorter one with the same sequence number.  A
    neighbour silent for ``loss_periods`` update periods has every route
    through it marked broken with an odd sequence number.
    """

    _header_size = HEADER_SIZE[MsgKind.DSDV_DATA]

    def __init__(self, radio, timer, clock=None, update_period: int = UPDATE_PERIOD,
                 table_capacity: int = 32, loss_periods: int = 3):
        super().__init__(radio, timer, clock)
        self.update_period = update_period
        self.loss_periods = loss_periods
        self.table: StaticMap = StaticMap(table_capacity)
        self.heard: StaticMap = StaticMap(table_capacity)
        self.own_seq = 0
        self.rounds = 0

    def entry(self, dest: int) -> DsdvEntry | None:
        return self.table.find(dest)

    def _on_enable(self) -> None:
        me = self.id()
        if me not in self.table:
            self._write(DsdvEntry(me, me, 0, self.own_seq))
        self._arm(0, self._tick)

    def _write(self, entry: DsdvEntry) -> bool:
        old = self.table.find(entry.dest)
        assert old is None or entry.seq >= old.seq, "per-destination seq went backwards"
        if self.table.insert(entry.dest, entry):
            victim = self._eviction_victim()
            if victim is None:
                self.stats["table_full"] += 1
                return False
            self.table.erase(victim)
            self.stats["evicted"] += 1
            self.table.insert(entry.dest, entry)
        if old is None or (old.next_hop, old.hops) != (entry.next_hop, entry.hops):
            self.last_change_ms = self.now()
        return True

    def _eviction_victim(self) -> int | None:
        me = self.id()
        candidates = [e for e in self.table.values() if e.dest != me and e.hops != 1]
        if not candidates:
            return None
        return min(candidates, key=lambda e: (e.seq, e.dest)).dest

    def _tick(self) -> None:
        self.rounds += 1
        me = self.id()
        self.own_seq = (self.own_seq + 2) % SEQ_MOD
        self._write(DsdvEntry(me, me, 0, self.own_seq))
        self._expire_neighbors()
        self._broadcast_table()
        self._arm(self.update_period, self._tick)

    def _expire_neighbors(self) -> None:
        limit = self.loss_periods * self.update_period
        now = self.now()
        for nb, heard_at in self.heard.items():
            if now - heard_at <= limit:
                continue
            self.heard.erase(nb)
            for e in self.table.values():
                if e.next_hop == nb and e.dest != self.id() and not e.broken:
                    self._write(DsdvEntry(e.dest, nb, INFINITE_HOPS, e.seq + 1))

    def _broadcast_table(self) -> None:
        per_frame = (self.radio.mtu - 3) // DSDV_ADVERT_SIZE
        adverts = [DsdvAdvert(e.dest, e.next_hop, e.hops, e.seq) for e in self.table.values()]
        for i in range(0, len(adverts), per_frame):
            self.radio.send(BROADCAST, encode(DsdvUpdate(tuple(adverts[i:i + per_frame]))))

    def _on_update(self, sender: int, update: DsdvUpdate) -> None:
        me = self.id()
        if sender not in self.heard and self.heard.full():
            self.stats["heard_full"] += 1
        else:
            self.heard.insert(sender, self.now())
        for adv in update.entries:
            if adv.dest == me:
                continue
            if adv.seq % 2 or adv.hops >= INFINITE_HOPS:
                hops = INFINITE_HOPS
            else:
                hops = adv.hops + 1
            cur = self.table.find(adv.dest)
            if cur is None:
                if hops < INFINITE_HOPS:
                    self._write(DsdvEntry(adv.dest, sender, hops, adv.seq))
            elif adv.seq > cur.seq or (adv.seq == cur.seq and hops < cur.hops):
                self._write(DsdvEntry(adv.dest, sender, hops, adv.seq))

    def _send(self, receiver: int, payload: bytes) -> ErrorCode:
        me = self.id()
        if receiver == me:
            self._deliver(me, payload)
            return ErrorCode.OK
        return self._forward(DsdvData(me, receiver, payload))

    def _forward(self, msg: DsdvData) -> ErrorCode:
        e = self.table.find(msg.dest) if msg.dest != BROADCAST else None
        if e is None or e.broken:
            self.stats["no_route"] += 1
            return ErrorCode.NO_ROUTE
        return self.radio.send(e.next_hop, encode(msg))

    def _handle(self, sender: int, msg) -> None:
        if isinstance(msg, DsdvUpdate):
            self._on_update(sender, msg)
        elif isinstance(msg, DsdvData):
            if msg.dest == self.id():
                self._deliver(msg.originator, msg.payload)
            else:
                self.stats["forwarded"] += 1
                self._forward(msg)

    def table_size(self) -> int:
        return len(self.table)
