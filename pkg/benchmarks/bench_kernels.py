"""Benchmark the jit-compiled kernels against the pure-numpy build.

Times the four hot paths on workloads shaped like the real experiments:
batched 2x2 eigensolves, frame alignment, overlap-chain products, and
full propagation. Run from the repository root:

    python3 benchmarks/bench_kernels.py [--steps 4096] [--repeat 5]
"""

import argparse
import math
import time

import numpy as np

from geomphase._kernels import get_numba_kernels, numpy_kernels
from geomphase.models import RotatingRingBlock, SpinHalf


def workloads(steps):
    spin = SpinHalf(theta=math.pi / 6)
    ring = RotatingRingBlock(n=0, eps=0.5, chi=math.pi / 3, omega_o=1.0)
    grid = np.linspace(0.0, ring.period, steps + 1)
    mids = 0.5 * (grid[:-1] + grid[1:])

    hs = np.ascontiguousarray(ring.hamiltonian.sample(mids))
    frames = np.ascontiguousarray(ring.frame_batch(grid))
    spin_frames = np.ascontiguousarray(spin.frame_batch(grid)[:, :, :1])
    psi0 = np.ascontiguousarray(ring.state("+"))
    dt = ring.period / steps

    return [
        ("eigh_batch", lambda k: k["eigh_batch"](hs)),
        ("align_frames", lambda k: k["align_frames"](frames)),
        ("overlap_smins", lambda k: k["overlap_smins"](spin_frames)),
        ("chain_product", lambda k: k["chain_product"](
            np.einsum("mia,mib->mab", frames[:-1].conj(), frames[1:]))),
        ("propagate", lambda k: k["propagate"](hs, dt, psi0)),
    ]


def best_of(fn, kern, repeat):
    fn(kern)  # warm: jit compilation and page faults land here
    best = math.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(kern)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=4096)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    jit = get_numba_kernels()
    pure = numpy_kernels
    jobs = workloads(args.steps)

    print(f"workload sized for {args.steps} steps, best of {args.repeat}")
    print(f"{'kernel':<14} {'pure (ms)':>10} {'jit (ms)':>10} {'speedup':>8}")
    for name, fn in jobs:
        tp = best_of(fn, pure, args.repeat)
        tj = best_of(fn, jit, args.repeat)
        print(f"{name:<14} {tp * 1e3:>10.2f} {tj * 1e3:>10.2f} "
              f"{tp / tj:>7.1f}x")


if __name__ == "__main__":
    main()
