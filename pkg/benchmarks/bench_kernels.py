"""Compare the compiled and numpy Pauli-sweep kernels.

Usage: python3 benchmarks/bench_kernels.py [--qubits 8 10 12] [--repeat 3]
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from magic_lab import kernels
from magic_lab.entropy import se_values


def best_of(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--qubits", type=int, nargs="+", default=[6, 8, 10, 12])
    ap.add_argument("--batch", type=int, default=1)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    backends = kernels.available_backends()
    print(f"{'N':>3} {'batch':>5} " + " ".join(f"{b:>12}" for b in backends) + "   speedup")
    for n in args.qubits:
        psi = rng.normal(size=(args.batch, 2**n)) + 1j * rng.normal(size=(args.batch, 2**n))
        psi /= np.linalg.norm(psi, axis=1, keepdims=True)
        res, vals = {}, {}
        for b in backends:
            kernels.use_backend(b)
            res[b] = best_of(lambda: se_values(psi, [2.0]), args.repeat)
            vals[b] = se_values(psi, [2.0])
        if len(backends) == 2:
            diff = float(np.abs(vals["cython"] - vals["python"]).max())
            speed = f"{res['python'] / res['cython']:8.2f}x  (|dM2| = {diff:.1e})"
        else:
            speed = "   n/a"
        print(f"{n:>3} {args.batch:>5} " + " ".join(f"{res[b]:>11.4f}s" for b in backends) + "  " + speed)
    kernels.use_backend(backends[0])


if __name__ == "__main__":
    main()
