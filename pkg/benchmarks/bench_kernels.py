#!/usr/bin/env python3
"""Time the numba kernels against the numpy fallback on Lukasiewicz chains and products.

Run:  python3 benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import time

import numpy as np

from rlsheaf._kernels import backend_module
from rlsheaf.algebra import lukasiewicz_chain, product_algebra


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - start)
    return min(times), out


def cases():
    for k in (10, 30, 60):
        yield lukasiewicz_chain(k)
    L = lukasiewicz_chain(5)
    yield product_algebra(L, L, name="L5xL5")
    L = lukasiewicz_chain(10)
    yield product_algebra(L, L, name="L10xL10")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    nb = backend_module("numba")
    npy = backend_module("numpy")

    # compile once so the timings below measure steady state
    warm = lukasiewicz_chain(2)
    nb.adjunction_violation(warm.leq, warm.prod, warm.imp)
    nb.residuum(warm.leq, warm.prod, warm.join, warm.bot)
    nb.filter_masks(np.array(warm.upset_masks(), dtype=np.int64), warm.prod, warm.top)

    print(f"{'algebra':>10} {'n':>5} {'kernel':>12} {'numpy s':>10} {'numba s':>10} {'speedup':>8}")
    for alg in cases():
        jobs = {
            "adjunction": lambda m: m.adjunction_violation(alg.leq, alg.prod, alg.imp),
            "residuum": lambda m: m.residuum(alg.leq, alg.prod, alg.join, alg.bot)[0],
        }
        if alg.n <= 20:
            up = np.array(alg.upset_masks(), dtype=np.int64)
            jobs["filters"] = lambda m: sorted(int(v) for v in m.filter_masks(up, alg.prod, alg.top))
        for name, job in jobs.items():
            t_np, r_np = best_of(lambda: job(npy), args.repeat)
            t_nb, r_nb = best_of(lambda: job(nb), args.repeat)
            same = np.array_equal(np.asarray(r_np), np.asarray(r_nb))
            assert same, f"backends disagree on {name} for {alg.name}"
            print(f"{alg.name:>10} {alg.n:>5} {name:>12} {t_np:>10.4f} {t_nb:>10.4f} {t_np / t_nb:>7.1f}x")


if __name__ == "__main__":
    main()
