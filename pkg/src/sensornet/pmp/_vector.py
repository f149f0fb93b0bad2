"""Batch-vectorised numpy kernels with the same signatures as ``_loops``.

Used when numba is disabled.  Each kernel walks the W limb columns in
Python and processes the whole batch per column, so the interpreter cost
is per limb rather than per number.
"""
import numpy as np

MASK = np.uint64(0xFFFFFFFF)


def _cmp(a, b):
    res = np.zeros(a.shape[0], dtype=np.int8)
    undecided = np.ones(a.shape[0], dtype=bool)
    for i in range(a.shape[1] - 1, -1, -1):
        gt = undecided & (a[:, i] > b[:, i])
        lt = undecided & (a[:, i] < b[:, i])
        res[gt] = 1
        res[lt] = -1
        undecided &= ~(gt | lt)
    return res


def _add(a, b):
    out = np.empty_like(a)
    carry = np.zeros(a.shape[0], dtype=np.uint64)
    for i in range(a.shape[1]):
        s = a[:, i].astype(np.uint64) + b[:, i] + carry
        out[:, i] = s & MASK
        carry = s >> np.uint64(32)
    return out, carry.astype(bool)


def _sub(a, b):
    out = np.empty_like(a)
    borrow = np.zeros(a.shape[0], dtype=np.int64)
    for i in range(a.shape[1]):
        d = a[:, i].astype(np.int64) - b[:, i].astype(np.int64) - borrow
        borrow = (d < 0).astype(np.int64)
        out[:, i] = (d + (borrow << 32)).astype(np.uint32)
    return out, borrow.astype(bool)


def _shl1(r):
    wide = r.astype(np.uint64)
    out = np.empty_like(r)
    carry = np.zeros(r.shape[0], dtype=np.uint64)
    for i in range(r.shape[1]):
        out[:, i] = ((wide[:, i] << np.uint64(1)) | carry) & MASK
        carry = wide[:, i] >> np.uint64(31)
    return out, carry.astype(bool)


def _reduce_once(r, m, force):
    need = force | (_cmp(r, m) >= 0)
    if need.any():
        d, _ = _sub(r, m)
        r = np.where(need[:, None], d, r)
    return r


def xor(a, b, out):
    np.bitwise_xor(a, b, out=out)


def cmp(a, b, out):
    out[:] = _cmp(a, b)


def add(a, b, out, carry):
    out[:], carry[:] = _add(a, b)


def sub(a, b, out, borrow):
    out[:], borrow[:] = _sub(a, b)


def shl(a, k, out, overflow):
    n, w = a.shape
    rows = np.arange(n)
    q = (k // 32).astype(np.int64)
    s = (k % 32).astype(np.uint64)
    wide = a.astype(np.uint64)
    lo = (wide << s[:, None]) & MASK
    # s == 0 must contribute nothing to the next limb
    hi = np.where(s[:, None] > 0, wide >> (np.uint64(32) - s[:, None]), np.uint64(0))
    res = np.zeros((n, w), dtype=np.uint64)
    lost = np.zeros(n, dtype=bool)
    for i in range(w):
        dst = i + q
        ok = dst < w
        res[rows[ok], dst[ok]] |= lo[ok, i]
        lost |= ~ok & (lo[:, i] != 0)
        dst = dst + 1
        ok = dst < w
        res[rows[ok], dst[ok]] |= hi[ok, i]
        lost |= ~ok & (hi[:, i] != 0)
    out[:] = res.astype(np.uint32)
    overflow[:] = lost


def mod(a, m, out):
    w = a.shape[1]
    r = np.zeros_like(a)
    for bit in range(32 * w - 1, -1, -1):
        r, hi = _shl1(r)
        r[:, 0] |= (a[:, bit // 32] >> np.uint32(bit % 32)) & np.uint32(1)
        r = _reduce_once(r, m, hi)
    out[:] = r


def mul_mod(a, b, m, out):
    w = a.shape[1]
    r = np.zeros_like(a)
    for bit in range(32 * w - 1, -1, -1):
        r, hi = _shl1(r)
        r = _reduce_once(r, m, hi)
        take = ((b[:, bit // 32] >> np.uint32(bit % 32)) & np.uint32(1)).astype(bool)
        if take.any():
            t, c = _add(r, a)
            t = _reduce_once(t, m, c)
            r = np.where(take[:, None], t, r)
    out[:] = r
