#!/usr/bin/env python3
"""Compare the numba and numpy limb kernels on batched 256-bit operands.

    python benchmarks/bench_pmp.py [--n 10000] [--repeat 3] [--ops mul_mod mod]

The first numba call of each kernel includes JIT compilation, so every
kernel is warmed up once on a tiny batch before timing and the compile
time is reported on its own.
"""
import argparse
import time

import numpy as np

from sensornet.pmp import BACKENDS, batch

WIDTH = 8  # 8 x 32-bit limbs = 256 bits


def operands(n, seed):
    rng = np.random.default_rng(seed)
    a = rng.integers(0, 2**32, size=(n, WIDTH), dtype=np.uint64).astype(np.uint32)
    b = rng.integers(0, 2**32, size=(n, WIDTH), dtype=np.uint64).astype(np.uint32)
    m = rng.integers(0, 2**32, size=(n, WIDTH), dtype=np.uint64).astype(np.uint32)
    m[:, -1] |= 0x80000000  # full-width moduli
    m[:, 0] |= 1
    k = rng.integers(0, 300, size=n)
    # mul_mod wants reduced inputs
    ra, rb = batch.mod(a, m, "numpy"), batch.mod(b, m, "numpy")
    return a, b, m, k, ra, rb


def calls(a, b, m, k, ra, rb):
    return {
        "xor": lambda be: batch.xor(a, b, be),
        "add": lambda be: batch.add(a, b, be),
        "sub": lambda be: batch.sub(a, b, be),
        "cmp": lambda be: batch.cmp(a, b, be),
        "shl": lambda be: batch.shl(a, k, be),
        "mod": lambda be: batch.mod(a, m, be),
        "mul_mod": lambda be: batch.mul_mod(ra, rb, m, be),
    }


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def same(x, y):
    if isinstance(x, tuple):
        return all(np.array_equal(p, q) for p, q in zip(x, y))
    return np.array_equal(x, y)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n", type=int, default=10_000, help="operands per batch")
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--ops", nargs="*")
    args = parser.parse_args(argv)

    full = calls(*operands(args.n, args.seed))
    warm = calls(*operands(4, args.seed + 1))
    ops = args.ops or list(full)

    print(f"backends: {', '.join(BACKENDS)}   n={args.n}   best of {args.repeat}")
    print(f"{'op':<8} {'numpy s':>10} {'numba s':>10} {'speedup':>8} {'jit s':>8}  match")
    for op in ops:
        t_np, out_np = best_of(lambda: full[op]("numpy"), args.repeat)
        if "numba" not in BACKENDS:
            print(f"{op:<8} {t_np:>10.4f} {'-':>10} {'-':>8} {'-':>8}  -")
            continue
        t0 = time.perf_counter()
        warm[op]("numba")
        jit = time.perf_counter() - t0
        t_nb, out_nb = best_of(lambda: full[op]("numba"), args.repeat)
        print(f"{op:<8} {t_np:>10.4f} {t_nb:>10.4f} {t_np / t_nb:>7.1f}x {jit:>8.2f}  {same(out_np, out_nb)}")


if __name__ == "__main__":
    main()
