"""Time the numba kernels against their numpy fallbacks.

Usage: python benchmarks/bench_kernels.py [--repeat N]

Each kernel is run once to trigger compilation, then timed over ``repeat``
calls; the table lists the best time per call and checks that both paths
agree.
"""

import argparse
import time

import numpy as np

from olpgame import _kernels as K


def best_time(fn, args, repeat):
    fn(*args)
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def cases(rng):
    v = rng.normal(size=64)
    A = rng.uniform(-1, 1, size=(8, 8))
    S = rng.uniform(-1, 1, size=(2000, 4, 4))
    x = rng.dirichlet(np.ones(4))
    y = rng.dirichlet(np.ones(4))
    return [
        ("project_simplex (n=64)", K.project_simplex_np, K.project_simplex_nb, (v,)),
        ("omwu (8x8, 4000 rounds)", K.omwu_np, K.omwu_nb, (A, 0.25, 4000, 50, 0.0)),
        ("batch_payoffs (2000 4x4)", K.batch_payoffs_np, K.batch_payoffs_nb, (S, x, y)),
    ]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=20)
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    print(f"{'kernel':28s} {'numpy':>12s} {'numba':>12s} {'speedup':>8s}  agree")
    for name, f_np, f_nb, a in cases(rng):
        t_np = best_time(f_np, a, args.repeat)
        t_nb = best_time(f_nb, a, args.repeat)
        r_np, r_nb = f_np(*a), f_nb(*a)
        r_np = r_np if isinstance(r_np, tuple) else (r_np,)
        r_nb = r_nb if isinstance(r_nb, tuple) else (r_nb,)
        agree = all(np.allclose(p, q, atol=1e-9) for p, q in zip(r_np, r_nb))
        print(f"{name:28s} {t_np * 1e3:10.3f}ms {t_nb * 1e3:10.3f}ms {t_np / t_nb:7.1f}x  {agree}")


if __name__ == "__main__":
    main()
