#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallback.

The hot loop of the package is the CSR matvec inside the deflated Lanczos
iteration; everything else is LAPACK. This script times

  1. raw matvec throughput on a full-chain Hamiltonian, and
  2. an end-to-end sector-Lanczos gap computation,

under both backends. Run after `pip install -e .`:

    python benchmarks/bench_backends.py --length 9 --reps 50
"""

import argparse
import time

import numpy as np

from spingap import aklt_model, assemble, gamma_interval, set_backend
from spingap.spinchain import SiteInterval


def time_matvec(matrix, reps: int) -> float:
    x = np.random.default_rng(0).standard_normal(matrix.dim) + 0j
    matrix.matvec(x)  # warm-up (jit compile / cache load)
    t0 = time.perf_counter()
    for _ in range(reps):
        x = matrix.matvec(x)
        x /= np.linalg.norm(x)
    return (time.perf_counter() - t0) / reps


def time_gap(model, n: int) -> tuple[float, float]:
    t0 = time.perf_counter()
    value, _ = gamma_interval(model, n, method="sector-lanczos")
    return time.perf_counter() - t0, value


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--length", type=int, default=9,
                    help="chain length for the matvec benchmark")
    ap.add_argument("--gap-length", type=int, default=7,
                    help="chain length for the end-to-end gap benchmark")
    ap.add_argument("--reps", type=int, default=50)
    args = ap.parse_args()

    model = aklt_model()
    H = assemble(model, SiteInterval(1, args.length)).matrix
    nnz = 2 * H.nnz_stored - np.sum(H.rows == H.cols)
    print(f"AKLT chain, L={args.length}: dim {H.dim}, nnz {nnz}")

    results = {}
    for backend in ("numpy", "numba"):
        try:
            set_backend(backend)
        except RuntimeError as exc:
            print(f"{backend}: unavailable ({exc})")
            continue
        dt = time_matvec(H, args.reps)
        results[backend] = dt
        print(f"  {backend:6s} matvec: {dt * 1e3:8.3f} ms/op "
              f"({nnz / dt / 1e6:8.1f} Mnnz/s)")
    if len(results) == 2:
        print(f"  speedup numba/numpy: {results['numpy'] / results['numba']:.2f}x")

    print(f"\nend-to-end sector-Lanczos gap, L={args.gap_length}:")
    gaps = {}
    for backend in ("numpy", "numba"):
        if backend not in results:
            continue
        set_backend(backend)
        dt, value = time_gap(model, args.gap_length)
        gaps[backend] = value
        print(f"  {backend:6s}: {dt:7.2f} s  gamma = {value:.12f}")
    if len(gaps) == 2:
        print(f"  backend agreement: |diff| = {abs(gaps['numpy'] - gaps['numba']):.2e}")


if __name__ == "__main__":
    main()
