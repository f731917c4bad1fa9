"""Compare the compiled and pure-numpy Zorich kernels on one trajectory.

Usage: python benchmarks/bench_kernels.py [--steps N] [--stratum ID]
"""

import argparse
import time

import numpy as np

from kzspectra import _kernels
from kzspectra.exchange import intersection_form
from kzspectra.strata import get_component


def run(kernel, top, bot, lengths, basis, steps):
    logs = np.zeros(basis.shape[1])
    t0 = time.perf_counter()
    status, done, teich, rauzy = kernel(top, bot, lengths, basis, steps, 8, 1e-14, 10**6, False, logs)
    return time.perf_counter() - t0, status, done, teich, logs


def setup(perm, seed):
    rng = np.random.default_rng(seed)
    top, bot = perm.as_arrays()
    lengths = rng.exponential(size=len(top))
    lengths /= lengths.sum()
    g = intersection_form(perm).genus
    omega = _kernels.omega_matrix_py(top, bot).astype(float)
    basis = omega @ rng.standard_normal((len(top), g))
    return top, bot, lengths, basis


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--steps", type=int, default=200_000)
    ap.add_argument("--stratum", default="H(3,1)")
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()

    perm = get_component(args.stratum).representative
    print(f"backend selected at import: {_kernels.BACKEND}")

    # warm-up so compilation (or cache load) is not timed
    run(_kernels.run_chunk, *setup(perm, args.seed), 100)

    t_fast, st1, n1, teich1, logs1 = run(_kernels.run_chunk, *setup(perm, args.seed), args.steps)
    t_slow, st2, n2, teich2, logs2 = run(_kernels.run_chunk_py, *setup(perm, args.seed), args.steps)

    print(f"{args.stratum}, {args.steps} Zorich steps")
    print(f"  compiled : {t_fast:8.3f} s  ({args.steps / t_fast:12,.0f} steps/s)")
    print(f"  pure     : {t_slow:8.3f} s  ({args.steps / t_slow:12,.0f} steps/s)")
    print(f"  speedup  : {t_slow / t_fast:8.1f}x")
    same = st1 == st2 and n1 == n2 and teich1 == teich2 and np.array_equal(logs1, logs2)
    print(f"  identical results: {same}")


if __name__ == "__main__":
    main()
