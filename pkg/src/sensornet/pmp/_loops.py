"""Row-at-a-time limb kernels, compiled with numba.

Every kernel takes a batch of little-endian uint32 limb rows of shape
``(n, W)`` and writes into caller-provided output arrays.  Carries are
held in uint64 scalars; there is no multiplication anywhere.
"""
import numpy as np

from ._jit import njit

MASK = np.uint64(0xFFFFFFFF)
ONE = np.uint64(1)
ZERO = np.uint64(0)
S32 = np.uint64(32)


@njit(cache=True)
def _cmp_row(a, b):
    for i in range(a.shape[0] - 1, -1, -1):
        if a[i] != b[i]:
            return 1 if a[i] > b[i] else -1
    return 0


@njit(cache=True)
def _add_row(a, b, out):
    carry = ZERO
    for i in range(a.shape[0]):
        s = np.uint64(a[i]) + np.uint64(b[i]) + carry
        out[i] = np.uint32(s & MASK)
        carry = s >> S32
    return carry


@njit(cache=True)
def _sub_row(a, b, out):
    borrow = ZERO
    for i in range(a.shape[0]):
        x = np.uint64(a[i])
        y = np.uint64(b[i]) + borrow
        if x >= y:
            out[i] = np.uint32(x - y)
            borrow = ZERO
        else:
            out[i] = np.uint32((x + (ONE << S32)) - y)
            borrow = ONE
    return borrow


@njit(cache=True)
def _shl1_row(r):
    carry = ZERO
    for i in range(r.shape[0]):
        x = np.uint64(r[i])
        r[i] = np.uint32(((x << ONE) | carry) & MASK)
        carry = x >> np.uint64(31)
    return carry


@njit(cache=True)
def xor(a, b, out):
    for j in range(a.shape[0]):
        for i in range(a.shape[1]):
            out[j, i] = a[j, i] ^ b[j, i]


@njit(cache=True)
def cmp(a, b, out):
    for j in range(a.shape[0]):
        out[j] = _cmp_row(a[j], b[j])


@njit(cache=True)
def add(a, b, out, carry):
    for j in range(a.shape[0]):
        carry[j] = _add_row(a[j], b[j], out[j]) != ZERO


@njit(cache=True)
def sub(a, b, out, borrow):
    for j in range(a.shape[0]):
        borrow[j] = _sub_row(a[j], b[j], out[j]) != ZERO


@njit(cache=True)
def shl(a, k, out, overflow):
    w = a.shape[1]
    for j in range(a.shape[0]):
        q = k[j] // 32
        s = np.uint64(k[j] % 32)
        flag = False
        for i in range(w):
            out[j, i] = 0
        for i in range(w):
            x = np.uint64(a[j, i])
            if x == ZERO:
                continue
            lo = (x << s) & MASK
            hi = (x >> (S32 - s)) if s != ZERO else ZERO
            if i + q < w:
                out[j, i + q] |= np.uint32(lo)
            elif lo != ZERO:
                flag = True
            if i + q + 1 < w:
                out[j, i + q + 1] |= np.uint32(hi)
            elif hi != ZERO:
                flag = True
        overflow[j] = flag


@njit(cache=True)
def mod(a, m, out):
    w = a.shape[1]
    r = np.zeros(w, dtype=np.uint32)
    for j in range(a.shape[0]):
        r[:] = 0
        for bit in range(32 * w - 1, -1, -1):
            hi = _shl1_row(r)
            r[0] |= np.uint32((a[j, bit // 32] >> (bit % 32)) & 1)
            if hi != ZERO or _cmp_row(r, m[j]) >= 0:
                _sub_row(r, m[j], r)
        out[j, :] = r


@njit(cache=True)
def mul_mod(a, b, m, out):
    w = a.shape[1]
    r = np.zeros(w, dtype=np.uint32)
    for j in range(a.shape[0]):
        r[:] = 0
        for bit in range(32 * w - 1, -1, -1):
            hi = _shl1_row(r)
            if hi != ZERO or _cmp_row(r, m[j]) >= 0:
                _sub_row(r, m[j], r)
            if (b[j, bit // 32] >> (bit % 32)) & 1:
                c = _add_row(r, a[j], r)
                if c != ZERO or _cmp_row(r, m[j]) >= 0:
                    _sub_row(r, m[j], r)
        out[j, :] = r
