"""Compiled vs pure-Python kernels on the corridor environment.

    python3 benchmarks/bench_kernels.py [--steps N] [--repeat R]
"""

import argparse
import time

import numpy as np

from agentarch import _kernels_py
from agentarch.corpus import load_env
from agentarch.rl_runtime import run_q_learning, value_iteration

try:
    from agentarch import _kernels as _compiled
except ImportError:
    _compiled = None


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t)
    return min(times), out


def bellman_sweeps(env, kernels, sweeps):
    arr = env.arrays()
    Q = np.ascontiguousarray(value_iteration(env).values)
    for _ in range(sweeps):
        Q = kernels.bellman(Q, arr["offsets"], arr["nxt"], arr["rew"], arr["prob"], env.gamma)
    return Q


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--steps", type=int, default=200_000)
    ap.add_argument("--sweeps", type=int, default=20_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    env = load_env("grid4")
    backends = [("python", _kernels_py)] + ([("cython", _compiled)] if _compiled else [])
    results = {}
    for name, k in backends:
        tq, Q = best_of(lambda: run_q_learning(env, args.steps, 0.1, 0.2, 0, kernels=k), args.repeat)
        tb, B = best_of(lambda: bellman_sweeps(env, k, args.sweeps), args.repeat)
        results[name] = (tq, tb, Q.values, B)
        print(f"{name:>7}: q_learning {args.steps} steps {tq * 1e3:9.1f} ms | bellman {args.sweeps} sweeps {tb * 1e3:9.1f} ms")
    if len(results) == 2:
        (pq, pb, pQ, pB), (cq, cb, cQ, cB) = results["python"], results["cython"]
        print(f"speedup: q_learning x{pq / cq:.1f}, bellman x{pb / cb:.1f}")
        print(f"identical tables: {np.array_equal(pQ, cQ) and np.array_equal(pB, cB)}")
    else:
        print("compiled kernels unavailable; only the fallback was timed")


if __name__ == "__main__":
    main()
