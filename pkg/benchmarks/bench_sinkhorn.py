#!/usr/bin/env python3
"""Compare the compiled scaling kernels against the NumPy fallback.

    python benchmarks/bench_sinkhorn.py [--repeats 5]

Times the plain and log-domain sweeps on coupling sizes drawn from the
assimilation workloads (members x observation atoms, field supports) and
prints one table row per case.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from enrda._kernels import BACKEND, numpy_backend

try:
    from enrda._kernels import _scaling as compiled
except ImportError:
    compiled = None


def make_instance(n: int, m: int, seed: int):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(n, 2))
    y = rng.normal(size=(m, 2)) + 1.5
    cost = np.ascontiguousarray(
        ((x[:, None, :] - y[None, :, :]) ** 2).sum(axis=2)
    )
    p = np.full(n, 1.0 / n)
    q = np.full(m, 1.0 / m)
    return cost, p, q


def time_call(func, *args, repeats: int) -> float:
    best = np.inf
    for _ in range(repeats):
        started = time.perf_counter()
        func(*args)
        best = min(best, time.perf_counter() - started)
    return best


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--sweeps", type=int, default=500)
    args = parser.parse_args()

    print(f"selected backend at import: {BACKEND}")
    if compiled is None:
        print("compiled kernel unavailable; showing the NumPy fallback only")

    header = f"{'case':<28}{'numpy':>12}{'compiled':>12}{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for n, m in ((50, 50), (100, 100), (400, 400), (1000, 1200)):
        cost, p, q = make_instance(n, m, seed=n + m)
        kernel = np.exp(-cost / 1.0)
        for label, runner_args in (
            (
                f"plain {n}x{m}",
                ("plain", (kernel, p, q, 0.0, args.sweeps)),
            ),
            (
                f"log {n}x{m}",
                ("log", (cost, np.log(p), np.log(q), 0.05, 0.0, args.sweeps)),
            ),
        ):
            kind, call_args = runner_args
            numpy_func = (
                numpy_backend.scale_plain if kind == "plain" else numpy_backend.scale_log
            )
            t_numpy = time_call(numpy_func, *call_args, repeats=args.repeats)
            if compiled is not None:
                compiled_func = (
                    compiled.scale_plain if kind == "plain" else compiled.scale_log
                )
                t_compiled = time_call(compiled_func, *call_args, repeats=args.repeats)
                print(
                    f"{label:<28}{t_numpy * 1e3:>10.1f}ms{t_compiled * 1e3:>10.1f}ms"
                    f"{t_numpy / t_compiled:>9.1f}x"
                )
            else:
                print(f"{label:<28}{t_numpy * 1e3:>10.1f}ms{'-':>12}{'-':>10}")


if __name__ == "__main__":
    main()
