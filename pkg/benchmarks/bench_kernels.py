"""Timing comparison between the compiled kernel backend and the pure one.

Runs the three hot kernels (rotation scoring, incremental line evaluation,
Sinkhorn balancing) on identical inputs with both backends and prints a
table of per-call times plus the speedup ratio.  The compiled backend is
optional; when it is missing the script still runs and says so.

Usage:
    python benchmarks/bench_kernels.py [--k 20] [--repeats 200] [--seed 0]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from kcolorlab import _kernels_py

try:
    from kcolorlab import _kernels as _kernels_c
except ImportError:
    _kernels_c = None


def _inputs(k: int, seed: int):
    rng = np.random.default_rng(seed)
    raw = rng.gamma(2.0, size=(k, k))
    entries = _kernels_py.sinkhorn_balance(raw / raw.sum() * k, 200, 1e-12)
    grad = rng.normal(size=(k, k))
    can_gain = np.ones((k, k), dtype=np.uint8)
    can_lose = (entries > 1e-3).astype(np.uint8)
    ts = np.linspace(0.0, 0.02, 33)
    return entries, grad, can_gain, can_lose, ts


def _time(fn, repeats: int) -> float:
    fn()  # warm up (JIT-free, but touches caches and validates the call)
    t0 = time.perf_counter()
    for _ in range(repeats):
        fn()
    return (time.perf_counter() - t0) / repeats


def bench_backend(mod, k: int, repeats: int, seed: int) -> dict:
    entries, grad, can_gain, can_lose, ts = _inputs(k, seed)
    results = {}
    results["rotation_scores"] = _time(
        lambda: mod.rotation_scores(grad, can_gain, can_lose), repeats
    )
    results["line_f_values"] = _time(
        lambda: mod.line_f_values(entries, 0, 1, 2, 3, ts, 2.0 * k * np.log(k)),
        repeats,
    )
    results["sinkhorn_balance"] = _time(
        lambda: mod.sinkhorn_balance(entries + 0.01, 200, 1e-12), repeats
    )
    return results


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--k", type=int, default=20)
    parser.add_argument("--repeats", type=int, default=200)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    pure = bench_backend(_kernels_py, args.k, args.repeats, args.seed)
    print(f"k={args.k} repeats={args.repeats}")
    if _kernels_c is None:
        print("compiled backend not built; showing pure-python times only")
        for name, t in pure.items():
            print(f"  {name:18s} pure {t * 1e6:10.2f} us")
        return 0

    compiled = bench_backend(_kernels_c, args.k, args.repeats, args.seed)
    # sanity: both backends must agree on the same inputs before timing
    entries, grad, can_gain, can_lose, ts = _inputs(args.k, args.seed)
    d = 2.0 * args.k * np.log(args.k)
    assert np.allclose(
        _kernels_py.line_f_values(entries, 0, 1, 2, 3, ts, d),
        _kernels_c.line_f_values(entries, 0, 1, 2, 3, ts, d),
        rtol=0.0,
        atol=1e-12,
    )
    header = f"  {'kernel':18s} {'pure':>12s} {'compiled':>12s} {'speedup':>8s}"
    print(header)
    for name in pure:
        tp, tc = pure[name], compiled[name]
        print(
            f"  {name:18s} {tp * 1e6:10.2f} us {tc * 1e6:10.2f} us"
            f" {tp / tc:7.2f}x"
        )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
