"""Deterministic discrete-event network simulator.

The simulator provides the radio, timer, clock and debug facets for every
node of a :class:`Topology`.  Events are ordered by ``(fire_at, seq)``
where ``seq`` is a per-scheduler insertion counter, and every random
decision is drawn from a seeded SplitMix64 stream, so a run is a pure
function of topology, scenario and seed.
"""
from __future__ import annotations

import heapq
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Iterable

from .kernel import (
    BROADCAST, MTU, CallbackRegistry, ErrorCode, NetError, check_payload,
)
from .wire import MsgKind

MASK64 = (1 << 64) - 1
TIMER_CAPACITY = 16


class SplitMix64:
    """SplitMix64 (Steele, Lea & Flood 2014); 53-bit uniform doubles."""

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def random(self) -> float:
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def below(self, n: int) -> int:
        # rejection sampling keeps the draw unbiased
        if n <= 0:
            raise ValueError("n must be positive")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            x = self.next_u64()
            if x < limit:
                return x % n

    def split(self) -> "SplitMix64":
        return SplitMix64(self.next_u64())


class TopologyError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        super().__init__(f"line {line}: {message}" if line is not None else message)
        self.line = line


@dataclass(frozen=True)
class Link:
    latency_ms: int = 1
    drop_prob: float = 0.0
    quality: int = 255


class Topology:
    def __init__(self, nodes: Iterable[int] = ()):
        self._adj: dict[int, dict[int, Link]] = {}
        for n in nodes:
            self.add_node(n)

    def add_node(self, node: int) -> None:
        self._adj.setdefault(node, {})

    @property
    def nodes(self) -> list[int]:
        return sorted(self._adj)

    def __len__(self) -> int:
        return len(self._adj)

    def __contains__(self, node) -> bool:
        return node in self._adj

    def add_link(self, a: int, b: int, latency_ms: int = 1, drop_prob: float = 0.0,
                 quality: int = 255) -> None:
        if a == b:
            raise TopologyError(f"self-loop on node {a}")
        if a not in self._adj or b not in self._adj:
            raise TopologyError(f"link {a}-{b} references an undeclared node")
        if b in self._adj[a]:
            raise TopologyError(f"duplicate link {a}-{b}")
        if latency_ms < 0 or not 0.0 <= drop_prob <= 1.0 or not 0 <= quality <= 255:
            raise TopologyError(f"link {a}-{b} attribute out of range")
        link = Link(latency_ms, drop_prob, quality)
        self._adj[a][b] = link
        self._adj[b][a] = link

    def remove_link(self, a: int, b: int) -> None:
        if b not in self._adj.get(a, {}):
            raise TopologyError(f"no link {a}-{b}")
        del self._adj[a][b]
        del self._adj[b][a]

    def link(self, a: int, b: int) -> Link | None:
        return self._adj.get(a, {}).get(b)

    def has_link(self, a: int, b: int) -> bool:
        return b in self._adj.get(a, {})

    def neighbors(self, node: int) -> list[int]:
        return sorted(self._adj[node])

    def links(self) -> list[tuple[int, int, Link]]:
        return [(a, b, l) for a in sorted(self._adj) for b, l in sorted(self._adj[a].items()) if a < b]

    def max_latency(self) -> int:
        return max((l.latency_ms for _, _, l in self.links()), default=1)

    def to_text(self) -> str:
        lines = [str(len(self._adj))]
        for a, b, l in self.links():
            lines.append(f"{a} {b} {l.latency_ms} {l.drop_prob!r} {l.quality}")
        return "\n".join(lines) + "\n"


def load_topology(text: str) -> Topology:
    """Parse the edge-list format: a node count line, then ``u v [lat] [drop] [quality]``."""
    topo = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        if topo is None:
            if len(fields) != 1:
                raise TopologyError("first line must be the node count", lineno)
            try:
                n = int(fields[0])
            except ValueError:
                raise TopologyError(f"bad node count {fields[0]!r}", lineno) from None
            if n < 0:
                raise TopologyError("negative node count", lineno)
            topo = Topology(range(n))
            continue
        if not 2 <= len(fields) <= 5:
            raise TopologyError(f"expected 2-5 fields, got {len(fields)}", lineno)
        try:
            a, b = int(fields[0]), int(fields[1])
            latency = int(fields[2]) if len(fields) > 2 else 1
            drop = float(fields[3]) if len(fields) > 3 else 0.0
            quality = int(fields[4]) if len(fields) > 4 else 255
        except ValueError as exc:
            raise TopologyError(str(exc), lineno) from None
        try:
            topo.add_link(a, b, latency, drop, quality)
        except TopologyError as exc:
            raise TopologyError(str(exc), lineno) from None
    if topo is None:
        raise TopologyError("empty topology file")
    return topo


def link_quality(topology: Topology, a: int, b: int) -> int:
    link = topology.link(a, b)
    if link is None:
        raise TopologyError(f"no link {a}-{b}")
    return link.quality


def random_connected_topology(n: int, edges: int, seed: int, latency_ms: int = 1,
                              drop_prob: float = 0.0) -> Topology:
    """Random spanning tree plus uniformly drawn extra edges (capped at complete)."""
    rng = SplitMix64(seed)
    topo = Topology(range(n))
    order = list(range(n))
    for i in range(n - 1, 0, -1):
        j = rng.below(i + 1)
        order[i], order[j] = order[j], order[i]
    for i in range(1, n):
        topo.add_link(order[i], order[rng.below(i)], latency_ms, drop_prob)
    target = min(edges, n * (n - 1) // 2)
    count = n - 1 if n else 0
    while count < target:
        a, b = rng.below(n), rng.below(n)
        if a != b and not topo.has_link(a, b):
            topo.add_link(a, b, latency_ms, drop_prob)
            count += 1
    return topo


@dataclass(frozen=True)
class Deliver:
    dest: int
    sender: int
    payload: bytes
    quality: int


@dataclass(frozen=True)
class TimerFire:
    node: int
    handle: int


@dataclass(frozen=True, order=True)
class Event:
    fire_at: int
    seq: int
    kind: Deliver | TimerFire = field(compare=False)

    def describe(self) -> str:
        k = self.kind
        if isinstance(k, Deliver):
            return (f"{self.fire_at} {self.seq} DELIVER {k.sender}->{k.dest} "
                    f"q={k.quality} {k.payload.hex()}")
        return f"{self.fire_at} {self.seq} TIMER {k.node}#{k.handle}"


def format_trace(events: Iterable[Event]) -> str:
    return "".join(e.describe() + "\n" for e in events)


def kind_label(payload: bytes) -> str:
    if not payload:
        return "EMPTY"
    try:
        return MsgKind(payload[0]).name
    except ValueError:
        return f"0x{payload[0]:02X}"


class Scheduler:
    def __init__(self, topology: Topology, seed: int = 0, mtu: int = MTU,
                 timer_capacity: int = TIMER_CAPACITY):
        self.topology = topology
        self.mtu = mtu
        self.rng = SplitMix64(seed)
        self.now = 0
        self.trace: list[Event] = []
        self.sent: Counter = Counter()
        self.delivered: Counter = Counter()
        self.dropped: Counter = Counter()
        self.transmissions: Counter = Counter()
        self.tx_bytes: Counter = Counter()
        self.taps: list[Callable[[Event], None]] = []
        # (fire_at, seq, event): plain tuples keep heap comparisons cheap
        self._queue: list[tuple[int, int, Event]] = []
        self._seq = 0
        self._radios: dict[int, SimRadio] = {}
        self._timers = {n: CallbackRegistry(timer_capacity) for n in topology.nodes}

    def _push(self, delay: int, kind) -> Event:
        ev = Event(self.now + delay, self._seq, kind)
        self._seq += 1
        heapq.heappush(self._queue, (ev.fire_at, ev.seq, ev))
        return ev

    def attach(self, radio: "SimRadio") -> None:
        self._radios[radio.id()] = radio

    def sim_send(self, src: int, dest: int, payload: bytes) -> ErrorCode:
        if src not in self.topology:
            raise ValueError(f"unknown node {src}")
        if err := check_payload(payload, self.mtu):
            return err
        payload = bytes(payload)
        label = kind_label(payload)
        self.transmissions[label] += 1
        self.tx_bytes[label] += len(payload)
        if dest == BROADCAST:
            targets = self.topology.neighbors(src)
        elif self.topology.has_link(src, dest):
            targets = [dest]
        else:
            # out of radio range: the frame is lost, nobody is told
            self.sent[label] += 1
            self.dropped[label] += 1
            return ErrorCode.OK
        for v in targets:
            link = self.topology.link(src, v)
            self.sent[label] += 1
            if self.rng.random() < link.drop_prob:
                self.dropped[label] += 1
                continue
            self.delivered[label] += 1
            self._push(link.latency_ms, Deliver(v, src, payload, link.quality))
        return ErrorCode.OK

    def set_timer(self, node: int, delay_ms: int, handler: Callable[[], None]) -> int:
        if delay_ms < 0:
            raise ValueError("negative timer delay")
        # the slot remembers the seq of its event so a stale event for a
        # cancelled-then-reused handle is recognised and skipped
        handle = self._timers[node].register((handler, self._seq))
        self._push(delay_ms, TimerFire(node, handle))
        return handle

    def cancel_timer(self, node: int, handle: int) -> ErrorCode:
        return self._timers[node].unregister(handle)

    def pending(self) -> int:
        return len(self._queue)

    def _dispatch(self, ev: Event) -> bool:
        k = ev.kind
        if isinstance(k, TimerFire):
            registry = self._timers[k.node]
            entry = registry.get(k.handle)
            if entry is None or entry[1] != ev.seq:
                return False  # cancelled
            registry.unregister(k.handle)
            self.trace.append(ev)
            entry[0]()
            return True
        self.trace.append(ev)
        for tap in self.taps:
            tap(ev)
        radio = self._radios.get(k.dest)
        if radio is not None:
            radio._receive(k.sender, k.payload, k.quality)
        return True

    def run_until(self, t_end: int) -> list[Event]:
        if t_end < self.now:
            raise ValueError(f"t_end {t_end} is before now {self.now}")
        processed = []
        while self._queue and self._queue[0][0] <= t_end:
            ev = heapq.heappop(self._queue)[2]
            self.now = ev.fire_at
            if self._dispatch(ev):
                processed.append(ev)
        self.now = t_end
        return processed

    def run_for(self, duration_ms: int) -> list[Event]:
        return self.run_until(self.now + duration_ms)

    def trace_text(self) -> str:
        return format_trace(self.trace)


class SimRadio:
    """Radio and extended-radio facet of one simulated node."""

    def __init__(self, scheduler: Scheduler, node_id: int, enabled: bool = False):
        self._sched = scheduler
        self._id = node_id
        self._handlers = CallbackRegistry()
        self.enabled = enabled
        self.mtu = scheduler.mtu
        scheduler.attach(self)

    def id(self) -> int:
        return self._id

    def enable(self) -> ErrorCode:
        self.enabled = True
        return ErrorCode.OK

    def disable(self) -> ErrorCode:
        self.enabled = False
        return ErrorCode.OK

    def send(self, receiver: int, payload: bytes) -> ErrorCode:
        if not self.enabled:
            return ErrorCode.DISABLED
        return self._sched.sim_send(self._id, receiver, payload)

    def reg_recv_callback(self, handler) -> int:
        return self._handlers.register((handler, False))

    def reg_recv_ext_callback(self, handler) -> int:
        return self._handlers.register((handler, True))

    def unreg_recv_callback(self, handle: int) -> ErrorCode:
        return self._handlers.unregister(handle)

    def _receive(self, sender: int, payload: bytes, quality: int) -> None:
        if not self.enabled:
            return
        for _, (handler, extended) in list(self._handlers.live()):
            if extended:
                handler(sender, payload, quality)
            else:
                handler(sender, payload)


class SimTimer:
    def __init__(self, scheduler: Scheduler, node_id: int):
        self._sched = scheduler
        self._node = node_id

    def set_timer(self, delay_ms: int, handler: Callable[[], None]) -> int:
        return self._sched.set_timer(self._node, delay_ms, handler)

    def cancel_timer(self, handle: int) -> ErrorCode:
        return self._sched.cancel_timer(self._node, handle)


class SimClock:
    def __init__(self, scheduler: Scheduler):
        self._sched = scheduler

    def now(self) -> int:
        return self._sched.now


class SimDebug:
    def __init__(self, clock: SimClock):
        self._clock = clock
        self.lines: list[tuple[int, str]] = []

    def emit(self, text: str) -> ErrorCode:
        self.lines.append((self._clock.now(), text))
        return ErrorCode.OK


@dataclass
class NodeFacets:
    id: int
    radio: SimRadio
    timer: SimTimer
    clock: SimClock
    debug: SimDebug


def build_nodes(scheduler: Scheduler) -> dict[int, NodeFacets]:
    clock = SimClock(scheduler)
    return {
        n: NodeFacets(n, SimRadio(scheduler, n), SimTimer(scheduler, n), clock, SimDebug(clock))
        for n in scheduler.topology.nodes
    }


__all__ = [
    "BROADCAST", "Deliver", "Event", "Link", "NetError", "NodeFacets", "Scheduler",
    "SimClock", "SimDebug", "SimRadio", "SimTimer", "SplitMix64", "TimerFire",
    "Topology", "TopologyError", "build_nodes", "format_trace", "kind_label",
    "link_quality", "load_topology", "random_connected_topology",
]
