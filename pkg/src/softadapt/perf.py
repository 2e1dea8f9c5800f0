"""Benchmark the compiled weight kernel against the pure-Python fallback.

Times the kernel in isolation (one weight update per call) and a full
descent run on the two-component banana-valley problem with each
available backend.  Run as:

    python -m softadapt.perf
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from ._backend import available_backends, get_kernel
from .benchmarks import rosenbrock
from .core import SoftAdaptConfig
from .optimize import StepRule, descend


def time_kernel(backend: str, calls: int = 50_000) -> float:
    """Seconds per weight-kernel call, averaged over `calls` invocations."""
    kernel = get_kernel(backend)
    rng = np.random.default_rng(11)
    window = np.ascontiguousarray(rng.uniform(0.0, 2.0, (2, 5)))
    kernel(window, 0.1, 1e-8, 4, False, True)
    start = time.perf_counter()
    for _ in range(calls):
        kernel(window, 0.1, 1e-8, 4, False, True)
    return (time.perf_counter() - start) / calls


def time_descent(backend: str) -> tuple[float, int]:
    """Wall time and iteration count of a loss-weighted descent run."""
    spec = rosenbrock()
    config = SoftAdaptConfig(loss_weighted=True)
    start = time.perf_counter()
    trace = descend(
        spec.problem,
        config,
        StepRule.fixed(1e-3),
        spec.default_x0,
        tol=1e-4,
        backend=backend,
    )
    return time.perf_counter() - start, trace.iterations


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--calls", type=int, default=50_000, help="kernel timing calls")
    args = parser.parse_args(argv)

    backends = available_backends()
    if "compiled" not in backends:
        print("compiled kernel not built (python setup.py build_ext --inplace); timing pure only")

    kernel_times = {}
    for backend in backends:
        per_call = time_kernel(backend, args.calls)
        kernel_times[backend] = per_call
        print(f"kernel  {backend:>8}: {per_call * 1e6:8.2f} us/call")
    if "compiled" in kernel_times:
        ratio = kernel_times["pure"] / kernel_times["compiled"]
        print(f"kernel speedup: {ratio:.1f}x")

    descent_times = {}
    for backend in backends:
        seconds, iters = time_descent(backend)
        descent_times[backend] = seconds
        print(f"descent {backend:>8}: {seconds:8.3f} s for {iters} iterations")
    if "compiled" in descent_times:
        ratio = descent_times["pure"] / descent_times["compiled"]
        print(f"descent speedup: {ratio:.2f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
