"""Batch entry points: each operand is an ``(n, W)`` uint32 limb array."""
from __future__ import annotations

import numpy as np

from .kernels import get_backend


def _check(*arrays):
    shape = arrays[0].shape
    for a in arrays:
        if a.dtype != np.uint32 or a.ndim != 2 or a.shape != shape:
            raise ValueError("operands must be uint32 arrays of identical (n, W) shape")


def xor(a, b, backend=None):
    _check(a, b)
    out = np.empty_like(a)
    get_backend(backend).xor(a, b, out)
    return out


def cmp(a, b, backend=None):
    _check(a, b)
    out = np.empty(a.shape[0], dtype=np.int8)
    get_backend(backend).cmp(a, b, out)
    return out


def add(a, b, backend=None):
    _check(a, b)
    out = np.empty_like(a)
    carry = np.empty(a.shape[0], dtype=np.bool_)
    get_backend(backend).add(a, b, out, carry)
    return out, carry


def sub(a, b, backend=None):
    _check(a, b)
    out = np.empty_like(a)
    borrow = np.empty(a.shape[0], dtype=np.bool_)
    get_backend(backend).sub(a, b, out, borrow)
    return out, borrow


def shl(a, k, backend=None):
    _check(a)
    k = np.broadcast_to(np.asarray(k, dtype=np.int64), (a.shape[0],)).copy()
    if (k < 0).any():
        raise ValueError("negative shift")
    out = np.empty_like(a)
    overflow = np.empty(a.shape[0], dtype=np.bool_)
    get_backend(backend).shl(a, k, out, overflow)
    return out, overflow


def mod(a, m, backend=None):
    _check(a, m)
    if not m.any(axis=1).all():
        raise ZeroDivisionError("zero modulus in batch")
    out = np.empty_like(a)
    get_backend(backend).mod(a, m, out)
    return out


def mul_mod(a, b, m, backend=None):
    _check(a, b, m)
    if not m.any(axis=1).all():
        raise ZeroDivisionError("zero modulus in batch")
    if (cmp(a, m, backend) >= 0).any() or (cmp(b, m, backend) >= 0).any():
        raise ValueError("operands must be reduced below the modulus")
    out = np.empty_like(a)
    get_backend(backend).mul_mod(a, b, m, out)
    return out
