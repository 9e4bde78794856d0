"""Compare the compiled and pure-Python kernel backends.

    python benchmarks/bench_kernels.py [--primes N] [--repeat R]

Each row times one kernel on identical inputs with both backends and checks
the outputs agree.
"""

from __future__ import annotations

import argparse
import math
import time

from primeineq import kernels
from primeineq.primes import primes_list


def best_of(repeat, fn, *args):
    best, out = math.inf, None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--primes", type=int, default=200_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    backends = kernels.available_backends()
    if "cython" not in backends:
        print("compiled backend not built; only the pure-Python timings are shown")
    primes = primes_list(args.primes)
    base = primes_list(2000)[1:]
    n = len(primes)
    cases = {
        "sieve_segment (2^18 odd slots)": lambda m: m.sieve_segment(10**7 + 1, 1 << 18, base),
        f"block_sums ({n} terms)": lambda m: m.block_sums(1, primes, 64),
        f"block_scan sun-harmonic ({n})": lambda m: m.block_scan(kernels.SUN_HARMONIC, 1, primes, 0, 0, 0, 0, 64),
        f"block_scan sun-weighted ({n})": lambda m: m.block_scan(kernels.SUN_WEIGHTED, 1, primes, 0, 0, 0, 0, 64),
        f"dusart_scan lower ({n})": lambda m: m.dusart_scan(2, primes[1:], 2.25, 2.25, False),
        f"logsum_bounds (2..{n})": lambda m: m.logsum_bounds(2, n),
    }
    names = sorted(backends)
    header = f"{'kernel':36s}" + "".join(f"{b:>12s}" for b in names)
    if len(names) > 1:
        header += f"{'speedup':>10s}"
    print(header)
    for label, fn in cases.items():
        times, outs = [], []
        for b in names:
            t, out = best_of(args.repeat, fn, backends[b])
            times.append(t)
            outs.append(out)
        line = f"{label:36s}" + "".join(f"{t * 1000:10.1f}ms" for t in times)
        if len(names) > 1:
            py = times[names.index("python")]
            c = times[names.index("cython")]
            line += f"{py / c:9.1f}x"
            if any(o != outs[0] for o in outs):
                line += "  MISMATCH"
        print(line)


if __name__ == "__main__":
    main()
