"""Compare the compiled and pure-Python pixel kernels.

    python3 benchmarks/bench_kernels.py [--repeat N]

Checks that both backends return identical arrays before timing them.
"""

import argparse
import timeit

import numpy as np

from cbir import kernels
from cbir.edge import GAUSSIAN_KERNEL, SOBEL_X


def cases():
    rng = np.random.default_rng(0)
    img = rng.integers(0, 256, (512, 512)).astype(np.float64)
    seeds = np.where(rng.random((100, 100)) < 0.03, 0.0, np.inf)
    q = rng.integers(0, 8, (512, 512)).astype(np.intp)
    q_small = rng.integers(0, 8, (64, 64)).astype(np.intp)
    return {
        "convolve3 gaussian 512x512": lambda b: b.convolve3(img, GAUSSIAN_KERNEL),
        "convolve3 sobel 512x512": lambda b: b.convolve3(img, SOBEL_X),
        "chamfer34 100x100": lambda b: b.chamfer34(seeds),
        "cooccurrence 512x512 L=8": lambda b: b.cooccurrence_counts(q, 8, 1, 0),
        "correlogram 64x64 d=1,3,5,7": lambda b: b.correlogram_counts(q_small, 8, (1, 3, 5, 7)),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    names = kernels.available_backends()
    backends = {n: kernels.get_backend(n) for n in names}
    print(f"backends: {', '.join(names)} (default {kernels.BACKEND})")
    print(f"{'kernel':<30}" + "".join(f"{n + ' ms':>14}" for n in names)
          + (f"{'speedup':>10}" if len(names) == 2 else ""))
    for label, fn in cases().items():
        outs = [fn(b) for b in backends.values()]
        if not all(np.array_equal(outs[0], o) for o in outs[1:]):
            raise SystemExit(f"{label}: backends disagree")
        times = {}
        for n, b in backends.items():
            number = 1 if n == "python" and "chamfer" in label else 3
            best = min(timeit.repeat(lambda: fn(b), number=number, repeat=args.repeat))
            times[n] = 1000 * best / number
        row = f"{label:<30}" + "".join(f"{times[n]:>14.3f}" for n in names)
        if len(names) == 2:
            row += f"{times['python'] / times['cython']:>9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
