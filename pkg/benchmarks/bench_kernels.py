"""Compare the numba kernels with their pure-numpy fallbacks.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Both paths are imported directly, so the CKL_DISABLE_NUMBA flag does not
matter here.  Timings are best-of-repeat wall time after one warm-up call.
"""

import argparse
import time

import numpy as np

from ckl import kernels
from ckl._accel import HAVE_NUMBA
from ckl.lattices import kagome_lattice, kite_lattice
from ckl.spanning_tree import laplacian_block


def best_of(fn, arg, repeat):
    fn(arg)
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(arg)
        best = min(best, time.perf_counter() - t0)
    return best


def laplacian_stack(T, n):
    z = np.exp(2j * np.pi * np.arange(n) / n)
    Z, W = np.meshgrid(z, z, indexing="ij")
    return laplacian_block(T, Z, W)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if not HAVE_NUMBA:
        print("numba unavailable or disabled; the numba column runs the plain python loop")

    cases = [
        ("clausen2, 1e5 angles", kernels.clausen2_numpy, kernels.clausen2_numba,
         np.random.default_rng(0).uniform(-10, 10, 100_000)),
        ("clausen2, 1e6 angles", kernels.clausen2_numpy, kernels.clausen2_numba,
         np.random.default_rng(1).uniform(-10, 10, 1_000_000)),
        ("det, kagome L(z,w) 128^2 x 3x3", kernels.batched_det_numpy, kernels.batched_det_numba,
         laplacian_stack(kagome_lattice(), 128)),
        ("det, kite L(z,w) 128^2 x 6x6", kernels.batched_det_numpy, kernels.batched_det_numba,
         laplacian_stack(kite_lattice(), 128)),
    ]
    print(f"{'kernel':34s} {'numpy [ms]':>11s} {'numba [ms]':>11s} {'speedup':>8s} {'max diff':>10s}")
    for label, f_np, f_nb, arg in cases:
        diff = np.max(np.abs(np.asarray(f_np(arg)) - np.asarray(f_nb(arg))))
        t_np = best_of(f_np, arg, args.repeat)
        t_nb = best_of(f_nb, arg, args.repeat)
        print(f"{label:34s} {1e3 * t_np:11.2f} {1e3 * t_nb:11.2f} {t_np / t_nb:8.2f} {diff:10.2e}")


if __name__ == "__main__":
    main()
