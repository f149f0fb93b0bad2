"""Shared primitives and facet contracts.

Every algorithm in the package programs against the small ``Protocol``
classes defined here rather than against the simulator directly.  Facet
instances are injected at construction time.
"""
from __future__ import annotations

import enum
from typing import Callable, Iterator, Protocol, runtime_checkable

NODE_ID_BITS = 64
BROADCAST = (1 << NODE_ID_BITS) - 1
MTU = 116
HANDLER_CAPACITY = 4

NodeId = int
ReceiveHandler = Callable[[int, bytes], None]
ExtendedReceiveHandler = Callable[[int, bytes, int], None]


class ErrorCode(enum.IntEnum):
    # OK is the only falsy member, so ``if err:`` selects the failure branch
    OK = 0
    DISABLED = 1
    BUFFER_FULL = 2
    NO_ROUTE = 3
    PAYLOAD_TOO_LARGE = 4
    NOT_REGISTERED = 5
    CAPACITY_EXCEEDED = 6
    NO_KEY = 7


class NetError(Exception):
    """Raised by operations whose success path returns a value."""

    def __init__(self, code: ErrorCode, message: str = ""):
        super().__init__(message or code.name)
        self.code = code


def check_node_id(value: int) -> int:
    if not 0 <= value < BROADCAST:
        raise ValueError(f"node id out of range: {value}")
    return value


def check_payload(payload: bytes, mtu: int = MTU) -> ErrorCode:
    return ErrorCode.PAYLOAD_TOO_LARGE if len(payload) > mtu else ErrorCode.OK


class CallbackRegistry:
    """Fixed-capacity handler table.

    ``register`` hands out the lowest free slot, so a handle released by
    ``unregister`` is the next one to be reused.
    """

    def __init__(self, capacity: int = HANDLER_CAPACITY):
        self._slots: list = [None] * capacity

    @property
    def capacity(self) -> int:
        return len(self._slots)

    def register(self, handler: Callable) -> int:
        for i, slot in enumerate(self._slots):
            if slot is None:
                self._slots[i] = handler
                return i
        raise NetError(ErrorCode.CAPACITY_EXCEEDED, "handler registry full")

    def unregister(self, handle: int) -> ErrorCode:
        if not 0 <= handle < len(self._slots) or self._slots[handle] is None:
            return ErrorCode.NOT_REGISTERED
        self._slots[handle] = None
        return ErrorCode.OK

    def get(self, handle: int):
        if 0 <= handle < len(self._slots):
            return self._slots[handle]
        return None

    def live(self) -> Iterator[tuple[int, Callable]]:
        for i, slot in enumerate(self._slots):
            if slot is not None:
                yield i, slot

    def __len__(self) -> int:
        return sum(slot is not None for slot in self._slots)

    def dispatch(self, *args) -> int:
        """Invoke live handlers in slot order; returns how many ran."""
        # snapshot first: a handler may unregister itself or others
        handlers = [h for _, h in self.live()]
        for h in handlers:
            h(*args)
        return len(handlers)


@runtime_checkable
class Radio(Protocol):
    mtu: int

    def enable(self) -> ErrorCode: ...
    def disable(self) -> ErrorCode: ...
    def send(self, receiver: int, payload: bytes) -> ErrorCode: ...
    def id(self) -> int: ...
    def reg_recv_callback(self, handler: ReceiveHandler) -> int: ...
    def unreg_recv_callback(self, handle: int) -> ErrorCode: ...


@runtime_checkable
class ExtendedRadio(Radio, Protocol):
    """Radio whose receivers may also ask for the per-message link quality."""

    def reg_recv_ext_callback(self, handler: ExtendedReceiveHandler) -> int: ...


@runtime_checkable
class Timer(Protocol):
    def set_timer(self, delay_ms: int, handler: Callable[[], None]) -> int: ...
    def cancel_timer(self, handle: int) -> ErrorCode: ...


@runtime_checkable
class Clock(Protocol):
    def now(self) -> int: ...


@runtime_checkable
class Debug(Protocol):
    def emit(self, text: str) -> ErrorCode: ...


@runtime_checkable
class Routing(Radio, Protocol):
    """A routing model is a refinement of ``Radio``: it can stand in for one."""


@runtime_checkable
class Crypto(Protocol):
    def enable(self) -> ErrorCode: ...
    def disable(self) -> ErrorCode: ...
    def key_setup(self, peer: int, key: bytes) -> ErrorCode: ...
    def has_key(self, peer: int) -> bool: ...
    def encrypt(self, data: bytes, peer: int) -> bytes: ...
    def decrypt(self, data: bytes, peer: int) -> bytes: ...
