from __future__ import annotations

from collections import Counter
from typing import Callable

from ..kernel import CallbackRegistry, ErrorCode, check_payload
from ..wire import WireError, decode


class Layer:
    """Receive-handler bookkeeping shared by every stackable model."""

    mtu: int

    def __init__(self):
        self._handlers = CallbackRegistry()
        self.enabled = False
        self.stats: Counter = Counter()

    def reg_recv_callback(self, handler: Callable[[int, bytes], None]) -> int:
        return self._handlers.register(handler)

    def unreg_recv_callback(self, handle: int) -> ErrorCode:
        return self._handlers.unregister(handle)

    def _deliver(self, sender: int, payload: bytes) -> None:
        self.stats["delivered"] += 1
        self._handlers.dispatch(sender, payload)

    def _precheck(self, payload: bytes) -> ErrorCode:
        if not self.enabled:
            return ErrorCode.DISABLED
        return check_payload(payload, self.mtu)


class RoutingBase(Layer):
    """Common plumbing for routing models that sit directly on a radio.

    Subclasses implement ``_send`` and ``_handle``; ``_header_size`` is
    what the model prepends, which fixes ``mtu``.
    """

    _header_size = 0
    # whether send(BROADCAST, ...) reaches every node
    supports_broadcast = False

    def __init__(self, radio, timer, clock=None):
        super().__init__()
        self.radio = radio
        self.timer = timer
        self.clock = clock
        self._radio_handle: int | None = None
        self._live_timers: set[int] = set()
        self.last_change_ms = 0

    @property
    def mtu(self) -> int:
        return self.radio.mtu - self._header_size

    def id(self) -> int:
        return self.radio.id()

    def now(self) -> int:
        return self.clock.now() if self.clock is not None else 0

    def enable(self) -> ErrorCode:
        if self.enabled:
            return ErrorCode.OK
        self.radio.enable()
        self._radio_handle = self.radio.reg_recv_callback(self._on_radio)
        self.enabled = True
        self._on_enable()
        return ErrorCode.OK

    def disable(self) -> ErrorCode:
        if not self.enabled:
            return ErrorCode.OK
        for h in sorted(self._live_timers):
            self.timer.cancel_timer(h)
        self._live_timers.clear()
        self.radio.unreg_recv_callback(self._radio_handle)
        self._radio_handle = None
        self.enabled = False
        return ErrorCode.OK

    def send(self, receiver: int, payload: bytes) -> ErrorCode:
        if err := self._precheck(payload):
            return err
        return self._send(receiver, bytes(payload))

    def _arm(self, delay_ms: int, fn: Callable[[], None]) -> int:
        box = []

        def fire():
            self._live_timers.discard(box[0])
            fn()

        handle = self.timer.set_timer(delay_ms, fire)
        box.append(handle)
        self._live_timers.add(handle)
        return handle

    def _cancel(self, handle: int) -> None:
        if handle in self._live_timers:
            self._live_timers.discard(handle)
            self.timer.cancel_timer(handle)

    def _on_radio(self, sender: int, data: bytes) -> None:
        if not self.enabled:
            return
        try:
            msg = decode(data)
        except WireError:
            self.stats["malformed"] += 1
            return
        self._handle(sender, msg)

    def _on_enable(self) -> None:
        pass

    def _send(self, receiver: int, payload: bytes) -> ErrorCode:
        raise NotImplementedError

    def _handle(self, sender: int, msg) -> None:
        raise NotImplementedError

    def table_size(self) -> int:
        return 0
