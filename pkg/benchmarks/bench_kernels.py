"""Time the compiled and numpy kernel backends on representative workloads.

    python benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import timeit

import numpy as np

from timdof import kernels
from timdof.graphs import build_bundle
from timdof.oracle import AisInstance, build_support, check_alignment_interval, expected_image_size_check
from timdof.scheme import build_four_ninths_scheme
from timdof.simulator import SimConfig, run_deterministic_trials
from timdof.topology import load_fixture


def workloads():
    rng = np.random.default_rng(0)
    g3 = rng.uniform(1, 2, 3)
    g6 = rng.uniform(1, 2, 6)
    x6 = rng.integers(0, 10 ** 6, 6)
    p7 = load_fixture("paper7")
    scheme = build_four_ninths_scheme(build_bundle(p7))
    inst = AisInstance.random(3, 6, rng)
    sup = build_support(inst)
    return {
        "floor_sum x1000": lambda: [kernels.floor_sum(g6, x6) for _ in range(1000)],
        "mac_search qc=10 x50": lambda: [kernels.mac_search(g3, 5000, 10, 12345) for _ in range(50)],
        "invert_floor x1000": lambda: [kernels.invert_floor(1.37, 40, 600000, 0, 500000) for _ in range(1000)],
        "interval scan 1e-6": lambda: check_alignment_interval(12, 5, step=1e-6),
        "image set size x200": lambda: expected_image_size_check(inst, sup.z[0], 200, 0, sup),
        "simulate paper7 200 trials": lambda: run_deterministic_trials(
            scheme, p7, SimConfig(pbar=10 ** 6, delta_c=1 / 6, trials=200, seed=0)),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    backends = kernels.available_backends()
    if "cython" not in backends:
        print("compiled kernels not built; only the python backend is timed")
    jobs = workloads()
    original = kernels.BACKEND
    results = {}
    for b in backends:
        kernels.use_backend(b)
        for name, fn in jobs.items():
            results[name, b] = min(timeit.repeat(fn, number=1, repeat=args.repeat))
    kernels.use_backend(original)
    print(f"{'workload':<28}" + "".join(f"{b:>12}" for b in backends) + ("     speedup" if len(backends) > 1 else ""))
    for name in jobs:
        row = f"{name:<28}" + "".join(f"{results[name, b] * 1e3:>10.2f}ms" for b in backends)
        if len(backends) > 1:
            row += f"{results[name, 'python'] / results[name, 'cython']:>11.1f}x"
        print(row)


if __name__ == "__main__":
    main()
