"""Crypto models and the stacking combinators.

``SecureRouting`` wraps any routing model and any crypto model and is
itself a routing model.  ``VirtualRadio`` goes the other way and exposes
a routing model through the radio contract, with its own address space.
``DebugOverRouting`` is a debug facet whose output travels to a gateway.
"""
from __future__ import annotations

import math

from .kernel import BROADCAST, MTU, ErrorCode, NetError, check_payload
from .pstl import StaticMap
from .routing.base import Layer
from .wire import HEADER_SIZE, MsgKind, Secure, WireBuffer, encode

KEY_SIZE = 16
KEY_CAPACITY = 64


class _KeyStore:
    """Per-peer symmetric keys; a key set for BROADCAST is the group fallback."""

    def __init__(self, capacity: int = KEY_CAPACITY):
        self.keys = StaticMap(capacity)
        self.enabled = False

    def enable(self) -> ErrorCode:
        self.enabled = True
        return ErrorCode.OK

    def disable(self) -> ErrorCode:
        self.enabled = False
        return ErrorCode.OK

    def key_setup(self, peer: int, key: bytes) -> ErrorCode:
        return self.keys.insert(peer, bytes(key))

    def has_key(self, peer: int) -> bool:
        return peer in self.keys or BROADCAST in self.keys

    def key_for(self, peer: int) -> bytes:
        key = self.keys.find(peer)
        if key is None:
            key = self.keys.find(BROADCAST)
        if key is None:
            raise NetError(ErrorCode.NO_KEY, f"no key for peer {peer}")
        return key


class IdentityCrypto(_KeyStore):
    """Length-preserving no-op cipher."""

    def encrypt(self, data: bytes, peer: int = BROADCAST) -> bytes:
        if check_payload(data):
            raise NetError(ErrorCode.PAYLOAD_TOO_LARGE)
        return bytes(data)

    decrypt = encrypt


def xor_keystream(key: bytes, length: int) -> bytes:
    return bytes(key[i % KEY_SIZE] ^ ((i // KEY_SIZE) & 0xFF) for i in range(length))


class XorCipher(_KeyStore):
    """Position-tweaked repeating-key XOR.

    Not secure.  It exists so tests can see ciphertext differ from
    plaintext on the wire; byte ``i`` is XORed with
    ``key[i % 16] ^ (i // 16)``.
    """

    def key_setup(self, peer: int, key: bytes) -> ErrorCode:
        if len(key) != KEY_SIZE:
            raise ValueError(f"key must be {KEY_SIZE} bytes, got {len(key)}")
        return super().key_setup(peer, key)

    def encrypt(self, data: bytes, peer: int = BROADCAST) -> bytes:
        if check_payload(data):
            raise NetError(ErrorCode.PAYLOAD_TOO_LARGE)
        stream = xor_keystream(self.key_for(peer), len(data))
        return bytes(a ^ b for a, b in zip(data, stream))

    decrypt = encrypt


CRYPTO_MODELS = {"identity": IdentityCrypto, "xor": XorCipher}


class SecureRouting(Layer):
    """Routing model that encrypts before, and decrypts after, an inner one."""

    def __init__(self, routing, crypto):
        super().__init__()
        self.routing = routing
        self.crypto = crypto
        self._inner_handle: int | None = None

    @property
    def mtu(self) -> int:
        return self.routing.mtu - HEADER_SIZE[MsgKind.SECURE]

    @property
    def supports_broadcast(self) -> bool:
        return getattr(self.routing, "supports_broadcast", False)

    def id(self) -> int:
        return self.routing.id()

    def enable(self) -> ErrorCode:
        if self.enabled:
            return ErrorCode.OK
        self.routing.enable()
        self.crypto.enable()
        self._inner_handle = self.routing.reg_recv_callback(self._on_inner)
        self.enabled = True
        return ErrorCode.OK

    def disable(self) -> ErrorCode:
        if not self.enabled:
            return ErrorCode.OK
        self.routing.unreg_recv_callback(self._inner_handle)
        self._inner_handle = None
        self.routing.disable()
        self.crypto.disable()
        self.enabled = False
        return ErrorCode.OK

    def send(self, receiver: int, payload: bytes) -> ErrorCode:
        if err := self._precheck(payload):
            return err
        if not self.crypto.has_key(receiver):
            self.stats["no_key"] += 1
            return ErrorCode.NO_KEY
        ciphertext = self.crypto.encrypt(bytes(payload), receiver)
        return self.routing.send(receiver, encode(Secure(ciphertext)))

    def _on_inner(self, sender: int, data: bytes) -> None:
        if not data or data[0] != MsgKind.SECURE:
            self.stats["malformed"] += 1
            return
        if not self.crypto.has_key(sender):
            self.stats["no_key"] += 1
            return
        self._deliver(sender, self.crypto.decrypt(data[1:], sender))

    def table_size(self) -> int:
        return self.routing.table_size()


ADDRESS_BITS = 128
APP_BROADCAST = (1 << ADDRESS_BITS) - 1
ADDRESS_HEADER = ADDRESS_BITS // 8
DEFAULT_PREFIX = 0xFD00 << 112


class AddressMap:
    """Bidirectional mapping between application addresses and node ids."""

    def __init__(self, pairs=()):
        self._to_node: dict[int, int] = {}
        self._to_app: dict[int, int] = {}
        for app, node in pairs:
            self.add(app, node)

    @classmethod
    def offset(cls, nodes, base: int = DEFAULT_PREFIX) -> "AddressMap":
        return cls((base + n, n) for n in nodes)

    def add(self, app: int, node: int) -> None:
        if not 0 <= app < APP_BROADCAST:
            raise ValueError(f"application address out of range: {app:#x}")
        self._to_node[app] = node
        self._to_app[node] = app

    def to_node(self, app: int) -> int | None:
        return self._to_node.get(app)

    def to_app(self, node: int) -> int | None:
        return self._to_app.get(node)

    def nodes(self) -> list[int]:
        return sorted(self._to_app)


class VirtualRadio(Layer):
    """Radio-contract view of a routing model.

    Each frame carries a 16-byte destination address so receivers can
    discard traffic meant for someone else, which matters when the inner
    model delivers everywhere (flooding).  Over a unicast-only model a
    broadcast is sent as one unicast per mapped node; unreachable nodes
    are skipped, as a radio broadcast would miss them too.
    """

    def __init__(self, routing, address_map: AddressMap):
        super().__init__()
        self.routing = routing
        self.addresses = address_map
        self._inner_handle: int | None = None

    @property
    def mtu(self) -> int:
        return self.routing.mtu - ADDRESS_HEADER

    def id(self) -> int:
        return self.addresses.to_app(self.routing.id())

    def enable(self) -> ErrorCode:
        if self.enabled:
            return ErrorCode.OK
        self.routing.enable()
        self._inner_handle = self.routing.reg_recv_callback(self._on_inner)
        self.enabled = True
        return ErrorCode.OK

    def disable(self) -> ErrorCode:
        if not self.enabled:
            return ErrorCode.OK
        self.routing.unreg_recv_callback(self._inner_handle)
        self._inner_handle = None
        self.enabled = False
        return ErrorCode.OK

    def send(self, receiver: int, payload: bytes) -> ErrorCode:
        if err := self._precheck(payload):
            return err
        if receiver in (BROADCAST, APP_BROADCAST):
            frame = self._frame(APP_BROADCAST, payload)
            if getattr(self.routing, "supports_broadcast", False):
                return self.routing.send(BROADCAST, frame)
            me = self.routing.id()
            for node in self.addresses.nodes():
                if node == me:
                    continue
                err = self.routing.send(node, frame)
                if err and err is not ErrorCode.NO_ROUTE:
                    return err
            return ErrorCode.OK
        node = self.addresses.to_node(receiver)
        if node is None:
            self.stats["no_route"] += 1
            return ErrorCode.NO_ROUTE
        return self.routing.send(node, self._frame(receiver, payload))

    @staticmethod
    def _frame(dst: int, payload: bytes) -> bytes:
        buf = WireBuffer(capacity=ADDRESS_HEADER + len(payload))
        buf.write_uint(64, dst >> 64)
        buf.write_uint(64, dst & ((1 << 64) - 1))
        buf.write_bytes(payload)
        return buf.getvalue()

    def _on_inner(self, sender: int, data: bytes) -> None:
        if len(data) < ADDRESS_HEADER:
            self.stats["malformed"] += 1
            return
        buf = WireBuffer(data)
        dst = (buf.read_uint(64) << 64) | buf.read_uint(64)
        if dst != APP_BROADCAST and dst != self.id():
            return
        src = self.addresses.to_app(sender)
        if src is None:
            self.stats["unmapped"] += 1
            return
        self._deliver(src, buf.read_rest())


DEBUG_LIMIT = 4 * MTU
CHUNK_HEADER = 2
LAST_CHUNK = 0x80


def chunk_count(length: int, chunk_size: int) -> int:
    return max(1, math.ceil(length / chunk_size))


class DebugOverRouting:
    """Debug facet that ships text to a gateway node over a routing model.

    Text beyond ``DEBUG_LIMIT`` bytes is cut off.  Each chunk starts with
    a message id byte and a chunk index byte whose top bit marks the last
    chunk.
    """

    def __init__(self, routing, gateway: int, chunk_size: int | None = None):
        self.routing = routing
        self.gateway = gateway
        self.chunk_size = chunk_size
        self._msg_id = 0

    def emit(self, text: str) -> ErrorCode:
        data = text.encode("utf-8")[:DEBUG_LIMIT]
        size = self.chunk_size or self.routing.mtu - CHUNK_HEADER
        n = chunk_count(len(data), size)
        if n > LAST_CHUNK:
            raise ValueError("chunk size too small for the debug limit")
        msg_id = self._msg_id
        self._msg_id = (self._msg_id + 1) & 0xFF
        for i in range(n):
            flags = LAST_CHUNK if i == n - 1 else 0
            part = bytes([msg_id, i | flags]) + data[i * size:(i + 1) * size]
            if err := self.routing.send(self.gateway, part):
                return err
        return ErrorCode.OK


class DebugGateway:
    """Collects chunks from ``DebugOverRouting`` senders into a debug sink."""

    def __init__(self, routing, sink, capacity: int = 8):
        self.sink = sink
        self.partial = StaticMap(capacity)
        self.messages: list[tuple[int, str]] = []
        routing.reg_recv_callback(self._on_chunk)

    def _on_chunk(self, sender: int, data: bytes) -> None:
        if len(data) < CHUNK_HEADER:
            return
        key = (sender, data[0])
        index, last = data[1] & ~LAST_CHUNK, bool(data[1] & LAST_CHUNK)
        parts = self.partial.find(key)
        if parts is None:
            parts = {}
            if self.partial.insert(key, parts):
                return
        parts[index] = data[CHUNK_HEADER:]
        if last:
            parts["last"] = index
        end = parts.get("last")
        if end is not None and all(i in parts for i in range(end + 1)):
            self.partial.erase(key)
            text = b"".join(parts[i] for i in range(end + 1)).decode("utf-8", "replace")
            self.messages.append((sender, text))
            self.sink.emit(text)
