"""Time each hot kernel under the compiled and the pure-Python backend.

    python benchmarks/bench_kernels.py [--repeat 3]
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from conpat import kernels
from conpat.core import RandomSource


def _cases():
    rng = RandomSource(0)
    batch8 = rng.permutations(8, 5000)
    batch100 = rng.permutations(100, 200)
    single = rng.permutation(400)
    psi_perm = rng.permutation(14)
    return [
        ("profile n=400 (one permutation)", lambda m: m.profile_counts(list(single))),
        ("batch profile n=8 x 5000", lambda m: m.batch_profile_counts(batch8)),
        ("batch profile n=100 x 200", lambda m: m.batch_profile_counts(batch100)),
        ("exact sums S_8", lambda m: [m.profile_sums_first(8, f) for f in range(1, 9)]),
        ("overlap witnesses k=5 l=1 (S_9)", lambda m: m.overlap_witnesses(5, 1, ())),
        ("overlap witnesses k=6 l=2 (S_10)", lambda m: m.overlap_witnesses(6, 2, ())),
        ("psi n=14", lambda m: m.psi_count(list(psi_perm))),
    ]


def _time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()
    backends = kernels.available_backends()
    if "cython" not in backends:
        print("compiled extension not built; only the Python backend is timed")
    header = f"{'kernel':38s}" + "".join(f"{b:>12s}" for b in backends)
    if len(backends) == 2:
        header += f"{'speedup':>10s}"
    print(header)
    for name, fn in _cases():
        times = [_time(lambda: fn(kernels.backend_module(b)), args.repeat) for b in backends]
        line = f"{name:38s}" + "".join(f"{t * 1e3:10.2f}ms" for t in times)
        if len(times) == 2:
            line += f"{times[1] / times[0]:9.1f}x"
        print(line)
    # sanity: both backends agree on a sample
    if len(backends) == 2:
        row = np.asarray(RandomSource(1).permutation(50))
        a = kernels.backend_module("cython").profile_counts(row.tolist())
        b = kernels.backend_module("python").profile_counts(row.tolist())
        assert a == b


if __name__ == "__main__":
    main()
