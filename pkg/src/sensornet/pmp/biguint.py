"""Fixed-width unsigned integers stored as little-endian 32-bit limbs.

All arithmetic goes through the limb kernels; Python ``int`` appears only
in the explicit conversion helpers ``from_int``/``to_int``.
"""
from __future__ import annotations

import numpy as np

from .kernels import get_backend

DEFAULT_LIMBS = 8
LIMB_BITS = 32


class BigUint:
    __slots__ = ("limbs",)

    def __init__(self, limbs):
        arr = np.array(limbs, dtype=np.uint32)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("limbs must be a non-empty 1-d sequence")
        self.limbs = arr

    @property
    def width(self) -> int:
        return self.limbs.shape[0]

    @classmethod
    def zero(cls, width: int = DEFAULT_LIMBS) -> "BigUint":
        return cls(np.zeros(width, dtype=np.uint32))

    @classmethod
    def from_int(cls, value: int, width: int = DEFAULT_LIMBS) -> "BigUint":
        if value < 0 or value >> (LIMB_BITS * width):
            raise OverflowError(f"value does not fit in {LIMB_BITS * width} bits")
        return cls([(value >> (LIMB_BITS * i)) & 0xFFFFFFFF for i in range(width)])

    def to_int(self) -> int:
        return sum(int(x) << (LIMB_BITS * i) for i, x in enumerate(self.limbs))

    @classmethod
    def from_hex(cls, text: str, width: int = DEFAULT_LIMBS) -> "BigUint":
        digits = text.strip().lower()
        if digits.startswith("0x"):
            digits = digits[2:]
        digits = digits.lstrip("0") or "0"
        if len(digits) > 8 * width:
            raise OverflowError(f"hex value does not fit in {LIMB_BITS * width} bits")
        limbs = np.zeros(width, dtype=np.uint32)
        end = len(digits)
        for i in range(width):
            if end <= 0:
                break
            limbs[i] = int(digits[max(0, end - 8):end], 16)
            end -= 8
        return cls(limbs)

    def to_hex(self) -> str:
        text = "".join(f"{int(x):08x}" for x in self.limbs[::-1]).lstrip("0")
        return text or "0"

    def __eq__(self, other) -> bool:
        if not isinstance(other, BigUint):
            return NotImplemented
        return self.width == other.width and bool(np.array_equal(self.limbs, other.limbs))

    def __hash__(self) -> int:
        return hash(self.limbs.tobytes())

    def __repr__(self) -> str:
        return f"BigUint(0x{self.to_hex()}, width={self.width})"

    def is_zero(self) -> bool:
        return not self.limbs.any()

    def __xor__(self, other: "BigUint") -> "BigUint":
        return mp_xor(self, other)

    def __lt__(self, other: "BigUint") -> bool:
        return mp_cmp(self, other) < 0

    def __le__(self, other: "BigUint") -> bool:
        return mp_cmp(self, other) <= 0


def _rows(*values: BigUint) -> list[np.ndarray]:
    w = values[0].width
    if any(v.width != w for v in values):
        raise ValueError("operands differ in width")
    return [v.limbs.reshape(1, w) for v in values]


def mp_xor(a: BigUint, b: BigUint, backend: str | None = None) -> BigUint:
    ra, rb = _rows(a, b)
    out = np.empty_like(ra)
    get_backend(backend).xor(ra, rb, out)
    return BigUint(out[0])


def mp_cmp(a: BigUint, b: BigUint, backend: str | None = None) -> int:
    ra, rb = _rows(a, b)
    out = np.empty(1, dtype=np.int8)
    get_backend(backend).cmp(ra, rb, out)
    return int(out[0])


def mp_add(a: BigUint, b: BigUint, backend: str | None = None) -> tuple[BigUint, bool]:
    """Sum mod 2**(32W) and the carry out of the top limb."""
    ra, rb = _rows(a, b)
    out = np.empty_like(ra)
    carry = np.empty(1, dtype=np.bool_)
    get_backend(backend).add(ra, rb, out, carry)
    return BigUint(out[0]), bool(carry[0])


def mp_sub(a: BigUint, b: BigUint, backend: str | None = None) -> tuple[BigUint, bool]:
    """Difference mod 2**(32W) and whether a borrow left the top limb."""
    ra, rb = _rows(a, b)
    out = np.empty_like(ra)
    borrow = np.empty(1, dtype=np.bool_)
    get_backend(backend).sub(ra, rb, out, borrow)
    return BigUint(out[0]), bool(borrow[0])


def mp_shl(a: BigUint, k: int, backend: str | None = None) -> tuple[BigUint, bool]:
    if k < 0:
        raise ValueError("negative shift")
    (ra,) = _rows(a)
    out = np.empty_like(ra)
    overflow = np.empty(1, dtype=np.bool_)
    get_backend(backend).shl(ra, np.array([k], dtype=np.int64), out, overflow)
    return BigUint(out[0]), bool(overflow[0])


def mp_mod(a: BigUint, m: BigUint, backend: str | None = None) -> BigUint:
    if m.is_zero():
        raise ZeroDivisionError("modulus is zero")
    ra, rm = _rows(a, m)
    out = np.empty_like(ra)
    get_backend(backend).mod(ra, rm, out)
    return BigUint(out[0])


def mp_mul_mod(a: BigUint, b: BigUint, m: BigUint, backend: str | None = None) -> BigUint:
    """``a*b mod m`` by interleaved shift-and-add; requires ``a, b < m``."""
    if m.is_zero():
        raise ZeroDivisionError("modulus is zero")
    if mp_cmp(a, m, backend) >= 0 or mp_cmp(b, m, backend) >= 0:
        raise ValueError("operands must be reduced below the modulus")
    ra, rb, rm = _rows(a, b, m)
    out = np.empty_like(ra)
    get_backend(backend).mul_mod(ra, rb, rm, out)
    return BigUint(out[0])
