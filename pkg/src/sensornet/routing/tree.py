from __future__ import annotations

from ..kernel import BROADCAST, ErrorCode
from ..wire import HEADER_SIZE, MsgKind, TreeBeacon, TreeData, encode
from .base import RoutingBase

NO_HOPS = 255
BEACON_PERIOD = 1000


class TreeRouting(RoutingBase):
    """Converge-cast to a single sink along a beacon-built spanning tree.

    The sink beacons every ``beacon_period`` ms.  A node adopts the sender
    of a beacon as parent only on a strict hop-count improvement and then
    re-beacons its own depth.  ``send`` accepts only the sink as receiver.
    """

    _header_size = HEADER_SIZE[MsgKind.TREE_DATA]

    def __init__(self, radio, timer, clock=None, is_sink: bool = False,
                 beacon_period: int = BEACON_PERIOD):
        super().__init__(radio, timer, clock)
        self.is_sink = is_sink
        self.beacon_period = beacon_period
        self.parent: int | None = None
        self.my_hops = 0 if is_sink else NO_HOPS
        self.sink: int | None = radio.id() if is_sink else None
        self.beacons_sent = 0

    def _on_enable(self) -> None:
        if self.is_sink:
            self._arm(0, self._beacon)

    def _beacon(self) -> None:
        self.beacons_sent += 1
        self.radio.send(BROADCAST, encode(TreeBeacon(self.id(), 0)))
        self._arm(self.beacon_period, self._beacon)

    def _send(self, receiver: int, payload: bytes) -> ErrorCode:
        if self.sink is None or receiver != self.sink:
            self.stats["no_route"] += 1
            return ErrorCode.NO_ROUTE
        if self.is_sink:
            self._deliver(self.id(), payload)
            return ErrorCode.OK
        return self.radio.send(self.parent, encode(TreeData(self.id(), payload)))

    def _handle(self, sender: int, msg) -> None:
        if isinstance(msg, TreeBeacon):
            self._on_beacon(sender, msg)
        elif isinstance(msg, TreeData):
            if self.is_sink:
                self._deliver(msg.originator, msg.payload)
            elif self.parent is not None:
                self.stats["forwarded"] += 1
                self.radio.send(self.parent, encode(msg))
            else:
                self.stats["no_route"] += 1

    def _on_beacon(self, sender: int, beacon: TreeBeacon) -> None:
        if self.is_sink or beacon.hops + 1 >= min(self.my_hops, NO_HOPS):
            return
        self.parent = sender
        self.my_hops = beacon.hops + 1
        self.sink = beacon.sink
        self.last_change_ms = self.now()
        self.radio.send(BROADCAST, encode(TreeBeacon(beacon.sink, self.my_hops)))

    def table_size(self) -> int:
        return int(self.parent is not None)
