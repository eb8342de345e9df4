"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--L 32] [--sweeps 200] [--repeat 3]
"""
import argparse
import time

import numpy as np

from eulerperc import kernels
from eulerperc.ising import BETA_C, heat_bath_table


def _setup(L, seed=0):
    m = 2 * L + 2
    rng = np.random.default_rng(seed)
    spins = np.ones((m, m), dtype=np.int8)
    frozen = np.zeros((m, m), dtype=np.uint8)
    frozen[0, :] = frozen[-1, :] = frozen[:, 0] = frozen[:, -1] = 1
    return spins, frozen, rng


def bench(backend, L, sweeps, repeat):
    k = kernels.get_backend(backend)
    out = {}
    spins, frozen, rng = _setup(L)
    u = rng.random((sweeps, *spins.shape))
    table = heat_bath_table(BETA_C)
    out["heat_bath"] = _best(lambda: k.heat_bath_sweeps(spins.copy(), frozen, table, u), repeat)

    u = rng.random((sweeps, 3, *spins.shape))
    p = 1 - np.exp(-2 * BETA_C)
    out["swendsen_wang"] = _best(lambda: k.sw_sweeps(spins.copy(), frozen, p, u), repeat)

    n = 2 * L + 1
    right = (rng.random((n, n - 1)) < 0.5).astype(np.uint8)
    down = (rng.random((n - 1, n)) < 0.5).astype(np.uint8)
    out["label_grid"] = _best(lambda: [k.label_grid(right, down) for _ in range(sweeps)], repeat)
    return out


def _best(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--L", type=int, default=32)
    ap.add_argument("--sweeps", type=int, default=200)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    results = {b: bench(b, args.L, args.sweeps, args.repeat) for b in kernels.available_backends()}
    print(f"L={args.L}  {args.sweeps} calls per kernel, best of {args.repeat}")
    print(f"{'kernel':<15}" + "".join(f"{b:>12}" for b in results) + ("     speedup" if len(results) > 1 else ""))
    for name in next(iter(results.values())):
        row = [results[b][name] for b in results]
        line = f"{name:<15}" + "".join(f"{t:>11.4f}s" for t in row)
        if len(row) > 1:
            line += f"{row[1] / row[0]:>11.1f}x"
        print(line)


if __name__ == "__main__":
    main()
