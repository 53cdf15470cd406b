"""Compare the numba and numpy kernel backends on the brute-force workloads.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--size 200000]

The first numba call per signature pays JIT (or cache load) cost; it is
timed separately and excluded from the steady-state numbers.  Results are
checked for equality across backends before timings are printed.
"""

import argparse
import time

import numpy as np

from mtrank import kernels
from mtrank.rank2 import box_vectors


def _best_of(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def workloads(size):
    rng = np.random.default_rng(0)
    dets4 = rng.integers(-20, 21, size=(size, 4, 4))
    # Rank-3 d = 2 matrix: the first-cyclic scan has to exhaust the box
    scan_M = [[1, 2], [0, 1]]
    scan_V = box_vectors(2, 150)
    # x^3 - x - 1 companion, full orbit determinant table on a radius-12 box
    orbit_M = [[0, 0, 1], [1, 0, 1], [0, 1, 0]]
    orbit_V = box_vectors(3, 12)
    # commutant of a 4x4 block sum, coefficients of height <= 3
    basis = np.zeros((4, 4, 4), dtype=np.int64)
    basis[0, :2, :2] = np.eye(2)
    basis[1, :2, :2] = [[0, 1], [1, 1]]
    basis[2, 2:, 2:] = np.eye(2)
    basis[3, 2:, 2:] = [[0, 1], [1, 2]]
    coeffs = np.indices((7,) * 4).reshape(4, -1).T - 3
    return {
        f"det_batch 4x4 x{size}": lambda: kernels.det_batch(dets4),
        f"first_cyclic d=2 box 150 ({len(scan_V)} vectors)": lambda: kernels.first_cyclic(scan_M, scan_V),
        f"orbit_dets d=3 box 12 ({len(orbit_V)} vectors)": lambda: kernels.orbit_dets(orbit_M, orbit_V),
        f"combination_dets rank 4 height 3 ({len(coeffs)} combos)": lambda: kernels.combination_dets(basis, coeffs),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--size", type=int, default=200_000)
    args = ap.parse_args()

    backends = kernels.available_backends()
    print(f"backends: {backends} (default {kernels.BACKEND})")
    results = {}
    for name, fn in workloads(args.size).items():
        row = {}
        for b in backends:
            with kernels.use_backend(b):
                t0 = time.perf_counter()
                fn()
                warm = time.perf_counter() - t0
                best, out = _best_of(fn, args.repeat)
            row[b] = (warm, best, out)
        outs = [np.asarray(v[2]) for v in row.values()]
        same = all(np.array_equal(outs[0], o) for o in outs[1:])
        results[name] = row
        print(f"\n{name}  (backends agree: {same})")
        for b, (warm, best, _) in row.items():
            print(f"  {b:6s} first call {warm * 1e3:9.2f} ms   best of {args.repeat} {best * 1e3:9.2f} ms")
        if len(row) == 2:
            print(f"  speedup numba/numpy: {row['numpy'][1] / row['numba'][1]:.1f}x")


if __name__ == "__main__":
    main()
