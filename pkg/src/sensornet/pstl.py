"""Fixed-capacity containers.

Storage is a list of ``capacity`` slots allocated once in ``__init__`` and
never resized.  Running out of room is reported with
``ErrorCode.BUFFER_FULL`` and leaves the container untouched.
"""
from __future__ import annotations

from bisect import bisect_left
from typing import Any, Callable, Generic, Iterator, TypeVar

from .kernel import ErrorCode

T = TypeVar("T")
K = TypeVar("K")
V = TypeVar("V")

NIL = -1


class StaticVector(Generic[T]):
    __slots__ = ("_slots", "_len")

    def __init__(self, capacity: int, items=()):
        self._slots: list = [None] * capacity
        self._len = 0
        for x in items:
            if self.push(x):
                raise ValueError("initial items exceed capacity")

    @property
    def capacity(self) -> int:
        return len(self._slots)

    def push(self, x: T) -> ErrorCode:
        if self._len == len(self._slots):
            return ErrorCode.BUFFER_FULL
        self._slots[self._len] = x
        self._len += 1
        return ErrorCode.OK

    def pop(self) -> T | None:
        if self._len == 0:
            return None
        self._len -= 1
        x = self._slots[self._len]
        self._slots[self._len] = None
        return x

    def remove_at(self, i: int) -> T:
        if not 0 <= i < self._len:
            raise IndexError(i)
        x = self._slots[i]
        for j in range(i, self._len - 1):
            self._slots[j] = self._slots[j + 1]
        self._len -= 1
        self._slots[self._len] = None
        return x

    def clear(self) -> None:
        for i in range(self._len):
            self._slots[i] = None
        self._len = 0

    def full(self) -> bool:
        return self._len == len(self._slots)

    def __getitem__(self, i: int) -> T:
        if i < 0:
            i += self._len
        if not 0 <= i < self._len:
            raise IndexError(i)
        return self._slots[i]

    def __setitem__(self, i: int, x: T) -> None:
        if i < 0:
            i += self._len
        if not 0 <= i < self._len:
            raise IndexError(i)
        self._slots[i] = x

    def __len__(self) -> int:
        return self._len

    def __iter__(self) -> Iterator[T]:
        for i in range(self._len):
            yield self._slots[i]

    def __contains__(self, x) -> bool:
        return any(self._slots[i] == x for i in range(self._len))

    def __eq__(self, other) -> bool:
        if isinstance(other, StaticVector):
            return list(self) == list(other)
        return NotImplemented

    def __repr__(self) -> str:
        return f"StaticVector({list(self)!r}, capacity={self.capacity})"

    def snapshot(self) -> tuple:
        return (self._len, tuple(self._slots))


class StaticMap(Generic[K, V]):
    """Sorted-array map: binary search lookup, shifting insert/erase."""

    __slots__ = ("_keys", "_vals", "_len")

    def __init__(self, capacity: int):
        self._keys: list = [None] * capacity
        self._vals: list = [None] * capacity
        self._len = 0

    @property
    def capacity(self) -> int:
        return len(self._keys)

    def _index(self, k: K) -> int:
        return bisect_left(self._keys, k, 0, self._len)

    def insert(self, k: K, v: V) -> ErrorCode:
        i = self._index(k)
        if i < self._len and self._keys[i] == k:
            self._vals[i] = v
            return ErrorCode.OK
        if self._len == len(self._keys):
            return ErrorCode.BUFFER_FULL
        for j in range(self._len, i, -1):
            self._keys[j] = self._keys[j - 1]
            self._vals[j] = self._vals[j - 1]
        self._keys[i] = k
        self._vals[i] = v
        self._len += 1
        return ErrorCode.OK

    def find(self, k: K) -> V | None:
        i = self._index(k)
        if i < self._len and self._keys[i] == k:
            return self._vals[i]
        return None

    def erase(self, k: K) -> ErrorCode:
        i = self._index(k)
        if i == self._len or self._keys[i] != k:
            return ErrorCode.NOT_REGISTERED
        for j in range(i, self._len - 1):
            self._keys[j] = self._keys[j + 1]
            self._vals[j] = self._vals[j + 1]
        self._len -= 1
        self._keys[self._len] = None
        self._vals[self._len] = None
        return ErrorCode.OK

    def clear(self) -> None:
        for i in range(self._len):
            self._keys[i] = self._vals[i] = None
        self._len = 0

    def full(self) -> bool:
        return self._len == len(self._keys)

    def __contains__(self, k) -> bool:
        i = self._index(k)
        return i < self._len and self._keys[i] == k

    def __len__(self) -> int:
        return self._len

    def __iter__(self) -> Iterator[K]:
        for i in range(self._len):
            yield self._keys[i]

    def keys(self) -> list[K]:
        return self._keys[: self._len]

    def values(self) -> list[V]:
        return self._vals[: self._len]

    def items(self) -> list[tuple[K, V]]:
        return list(zip(self._keys[: self._len], self._vals[: self._len]))

    def __repr__(self) -> str:
        return f"StaticMap({dict(self.items())!r}, capacity={self.capacity})"

    def snapshot(self) -> tuple:
        return (self._len, tuple(self._keys), tuple(self._vals))


class StaticList(Generic[T]):
    """Doubly linked list threaded through a fixed pool of slots."""

    __slots__ = ("_vals", "_next", "_prev", "_head", "_tail", "_free", "_len")

    def __init__(self, capacity: int):
        self._vals: list = [None] * capacity
        self._next = [i + 1 if i + 1 < capacity else NIL for i in range(capacity)]
        self._prev = [NIL] * capacity
        self._head = NIL
        self._tail = NIL
        self._free = 0 if capacity else NIL
        self._len = 0

    @property
    def capacity(self) -> int:
        return len(self._vals)

    def _alloc(self, x: T) -> int:
        i = self._free
        self._free = self._next[i]
        self._vals[i] = x
        return i

    def _release(self, i: int) -> None:
        self._vals[i] = None
        self._prev[i] = NIL
        self._next[i] = self._free
        self._free = i

    def push_front(self, x: T) -> ErrorCode:
        if self._free == NIL:
            return ErrorCode.BUFFER_FULL
        i = self._alloc(x)
        self._prev[i] = NIL
        self._next[i] = self._head
        if self._head != NIL:
            self._prev[self._head] = i
        else:
            self._tail = i
        self._head = i
        self._len += 1
        return ErrorCode.OK

    def push_back(self, x: T) -> ErrorCode:
        if self._free == NIL:
            return ErrorCode.BUFFER_FULL
        i = self._alloc(x)
        self._next[i] = NIL
        self._prev[i] = self._tail
        if self._tail != NIL:
            self._next[self._tail] = i
        else:
            self._head = i
        self._tail = i
        self._len += 1
        return ErrorCode.OK

    def _unlink(self, i: int) -> T:
        p, n = self._prev[i], self._next[i]
        if p != NIL:
            self._next[p] = n
        else:
            self._head = n
        if n != NIL:
            self._prev[n] = p
        else:
            self._tail = p
        x = self._vals[i]
        self._release(i)
        self._len -= 1
        return x

    def pop_front(self) -> T | None:
        if self._head == NIL:
            return None
        return self._unlink(self._head)

    def pop_back(self) -> T | None:
        if self._tail == NIL:
            return None
        return self._unlink(self._tail)

    def front(self) -> T | None:
        return None if self._head == NIL else self._vals[self._head]

    def remove(self, pred: Callable[[T], Any]) -> int:
        """Unlink every element matching ``pred``; returns the count removed."""
        removed = 0
        i = self._head
        while i != NIL:
            n = self._next[i]
            if pred(self._vals[i]):
                self._unlink(i)
                removed += 1
            i = n
        return removed

    def full(self) -> bool:
        return self._free == NIL

    def __len__(self) -> int:
        return self._len

    def __iter__(self) -> Iterator[T]:
        i = self._head
        while i != NIL:
            yield self._vals[i]
            i = self._next[i]

    def __contains__(self, x) -> bool:
        return any(v == x for v in self)

    def __repr__(self) -> str:
        return f"StaticList({list(self)!r}, capacity={self.capacity})"

    def free_count(self) -> int:
        count, i = 0, self._free
        while i != NIL:
            count += 1
            i = self._next[i]
        return count

    def snapshot(self) -> tuple:
        return (
            self._head, self._tail, self._free, self._len,
            tuple(self._vals), tuple(self._next), tuple(self._prev),
        )
