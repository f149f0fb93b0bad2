from __future__ import annotations

from dataclasses import dataclass

from ..kernel import BROADCAST, ErrorCode
from ..pstl import StaticList, StaticMap, StaticVector
from ..wire import DsrAck, DsrData, DsrRrep, DsrRreq, dsr_data_header_size, encode
from .base import RoutingBase

MAX_PATH = 10
PENDING_CAPACITY = 4
DEDUP_WINDOW = 16
MAX_RETRIES = 1


@dataclass
class DsrRouteRecord:
    path: StaticVector
    req_id: int

    @property
    def nodes(self) -> tuple[int, ...]:
        return tuple(self.path)


def is_simple(path) -> bool:
    return len(set(path)) == len(path)


class Dsr(RoutingBase):
    """Dynamic source routing with on-demand discovery.

    Sending without a cached route buffers the payload and floods a route
    request that accumulates the traversed path; the target answers with
    the reversed path and the origin caches it.  The destination returns
    a DSR_ACK along the reversed source route for every data packet; if no
    acknowledgement arrives within the timeout the cached route is
    dropped and the unacknowledged payloads are rediscovered once.
    """

    def __init__(self, radio, timer, clock=None, max_path: int = MAX_PATH,
                 max_latency_ms: int = 1, pending_capacity: int = PENDING_CAPACITY,
                 dedup_window: int = DEDUP_WINDOW, cache_capacity: int = 32,
                 unacked_capacity: int = 8):
        super().__init__(radio, timer, clock)
        self.max_path = max_path
        self.timeout_ms = 10 * max_latency_ms * max_path
        self.cache: StaticMap = StaticMap(cache_capacity)
        self.pending: StaticVector = StaticVector(pending_capacity)
        self.discovering: StaticMap = StaticMap(pending_capacity)
        self.seen_requests: StaticList = StaticList(dedup_window)
        self.unacked: StaticVector = StaticVector(unacked_capacity)
        self.ack_timers: StaticMap = StaticMap(unacked_capacity)
        self.req_id = 0
        self.rreqs_sent = 0

    @property
    def _header_size(self) -> int:
        return dsr_data_header_size(self.max_path)

    def route(self, dest: int) -> tuple[int, ...] | None:
        rec = self.cache.find(dest)
        return rec.nodes if rec is not None else None

    def _send(self, receiver: int, payload: bytes) -> ErrorCode:
        me = self.id()
        if receiver == me:
            self._deliver(me, payload)
            return ErrorCode.OK
        if receiver == BROADCAST:
            self.stats["no_route"] += 1
            return ErrorCode.NO_ROUTE
        rec = self.cache.find(receiver)
        if rec is not None:
            return self._send_data(rec.nodes, payload, 0)
        if self.pending.push((receiver, payload, 0)):
            self.stats["buffer_full"] += 1
            return ErrorCode.BUFFER_FULL
        if receiver not in self.discovering:
            self._discover(receiver)
        return ErrorCode.OK

    def _send_data(self, path: tuple[int, ...], payload: bytes, tries: int) -> ErrorCode:
        dest = path[-1]
        if self.unacked.push((dest, payload, tries)):
            self.stats["buffer_full"] += 1
            return ErrorCode.BUFFER_FULL
        if dest not in self.ack_timers:
            self.ack_timers.insert(dest, self._arm(self.timeout_ms, lambda: self._ack_timeout(dest)))
        return self.radio.send(path[1], encode(DsrData(path, 1, payload)))

    def _discover(self, target: int) -> None:
        self.req_id = (self.req_id + 1) & 0xFFFF
        me = self.id()
        self._seen(me, self.req_id)
        handle = self._arm(self.timeout_ms, lambda: self._discovery_timeout(target))
        self.discovering.insert(target, (self.req_id, handle))
        self.rreqs_sent += 1
        self.radio.send(BROADCAST, encode(DsrRreq(self.req_id, target, (me,))))

    def _seen(self, origin: int, req_id: int) -> bool:
        """Record a request; True if it had been recorded already."""
        key = (origin, req_id)
        if key in self.seen_requests:
            return True
        if self.seen_requests.full():
            self.seen_requests.pop_front()
        self.seen_requests.push_back(key)
        return False

    def _take_pending(self, dest: int) -> list:
        taken = [p for p in self.pending if p[0] == dest]
        kept = [p for p in self.pending if p[0] != dest]
        self.pending.clear()
        for p in kept:
            self.pending.push(p)
        return taken

    def _discovery_timeout(self, target: int) -> None:
        self.discovering.erase(target)
        dropped = self._take_pending(target)
        self.stats["no_route"] += len(dropped)

    def _learn(self, dest: int, path: tuple[int, ...]) -> None:
        assert is_simple(path) and len(path) <= self.max_path
        rec = DsrRouteRecord(StaticVector(self.max_path, path), self.req_id)
        if self.cache.insert(dest, rec):
            self.cache.erase(self.cache.keys()[0])
            self.cache.insert(dest, rec)
        state = self.discovering.find(dest)
        if state is not None:
            self._cancel(state[1])
            self.discovering.erase(dest)
        for _, payload, tries in self._take_pending(dest):
            self._send_data(path, payload, tries)

    def _ack_timeout(self, dest: int) -> None:
        self.ack_timers.erase(dest)
        self.cache.erase(dest)
        self.stats["route_broken"] += 1
        stale = [u for u in self.unacked if u[0] == dest]
        kept = [u for u in self.unacked if u[0] != dest]
        self.unacked.clear()
        for u in kept:
            self.unacked.push(u)
        retry = False
        for _, payload, tries in stale:
            if tries >= MAX_RETRIES or self.pending.push((dest, payload, tries + 1)):
                self.stats["no_route"] += 1
            else:
                retry = True
        if retry and dest not in self.discovering:
            self._discover(dest)

    def _on_ack(self, dest: int) -> None:
        for i, u in enumerate(self.unacked):
            if u[0] == dest:
                self.unacked.remove_at(i)
                break
        handle = self.ack_timers.find(dest)
        if handle is None:
            return
        self._cancel(handle)
        self.ack_timers.erase(dest)
        if any(u[0] == dest for u in self.unacked):
            self.ack_timers.insert(dest, self._arm(self.timeout_ms, lambda: self._ack_timeout(dest)))

    def _handle(self, sender: int, msg) -> None:
        me = self.id()
        if isinstance(msg, DsrRreq):
            if me in msg.path or self._seen(msg.path[0], msg.req_id):
                return
            path = msg.path + (me,)
            if msg.target == me:
                reply = DsrRrep(msg.req_id, me, tuple(reversed(path)))
                self.radio.send(sender, encode(reply))
            elif len(path) < self.max_path:
                self.radio.send(BROADCAST, encode(DsrRreq(msg.req_id, msg.target, path)))
        elif isinstance(msg, DsrRrep):
            if me not in msg.path:
                return
            i = msg.path.index(me)
            if i == len(msg.path) - 1:
                self._learn(msg.target, tuple(reversed(msg.path)))
            else:
                self.radio.send(msg.path[i + 1], encode(msg))
        elif isinstance(msg, (DsrData, DsrAck)):
            path, cursor = msg.path, msg.cursor
            if cursor >= len(path) or path[cursor] != me:
                return
            if cursor < len(path) - 1:
                self.stats["forwarded"] += 1
                if isinstance(msg, DsrData):
                    onward = DsrData(path, cursor + 1, msg.payload)
                else:
                    onward = DsrAck(path, cursor + 1)
                self.radio.send(path[cursor + 1], encode(onward))
            elif isinstance(msg, DsrData):
                self._deliver(path[0], msg.payload)
                back = tuple(reversed(path))
                self.radio.send(back[1], encode(DsrAck(back, 1)))
            else:
                self._on_ack(path[0])

    def table_size(self) -> int:
        return len(self.cache)
