"""Compare the compiled and pure-Python interval kernels.

    python benchmarks/bench_kernels.py [--size N] [--repeat R]

Also times one end-to-end materialisation per backend (in subprocesses,
since the backend is chosen at import).
"""

import argparse
import os
import random
import subprocess
import sys
import timeit
from fractions import Fraction

from tempo import kernels
from tempo.timeline import Interval


def random_set(rng, n, span=10_000):
    points = sorted(rng.sample(range(span), 2 * n))
    return kernels.python_backend.coalesce(
        [Interval(Fraction(points[2 * i]), Fraction(points[2 * i + 1]), rng.random() < 0.5, rng.random() < 0.5)
         for i in range(n)]
    )


CASES = {
    "coalesce": lambda k, a, b, w: k.coalesce(a + b),
    "union": lambda k, a, b, w: k.union(a, b),
    "intersect": lambda k, a, b, w: k.intersect(a, b),
    "dilate_add": lambda k, a, b, w: k.dilate_add(a, w),
    "erode_future": lambda k, a, b, w: k.erode_future(a, w),
    "until": lambda k, a, b, w: k.until(a, b, w),
    "since": lambda k, a, b, w: k.since(a, b, w),
}

E2E = """
import time
from tempo import kernels
from tempo.engine import BenchSpec, generate_bench, answer_query
p, d, q = generate_bench(BenchSpec(generator="random-graph", users={users}, seed=1))
t = time.perf_counter()
answer_query(p, d, q, magic=False)
print(kernels.BACKEND, time.perf_counter() - t)
"""


def end_to_end(users):
    out = {}
    for pure in ("1", "0"):
        env = dict(os.environ, TEMPO_PURE_PYTHON=pure)
        res = subprocess.run([sys.executable, "-c", E2E.format(users=users)], env=env,
                             capture_output=True, text=True, check=True)
        name, secs = res.stdout.split()
        out[name] = float(secs)
    return out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--size", type=int, default=500)
    ap.add_argument("--repeat", type=int, default=20)
    ap.add_argument("--users", type=int, default=200)
    args = ap.parse_args()
    if kernels.compiled_backend is None:
        sys.exit("compiled kernels not built; run `pip install -e . --no-build-isolation`")
    rng = random.Random(0)
    a, b = random_set(rng, args.size), random_set(rng, args.size)
    w = Interval(1, 7, True, False)
    print(f"{'kernel':14s} {'python ms':>10s} {'cython ms':>10s} {'speedup':>8s}")
    for name, fn in CASES.items():
        ref = fn(kernels.python_backend, a, b, w)
        assert list(fn(kernels.compiled_backend, a, b, w)) == list(ref), name
        times = [
            min(timeit.repeat(lambda: fn(k, a, b, w), number=args.repeat, repeat=3)) / args.repeat * 1e3
            for k in (kernels.python_backend, kernels.compiled_backend)
        ]
        print(f"{name:14s} {times[0]:10.3f} {times[1]:10.3f} {times[0] / times[1]:7.2f}x")
    e2e = end_to_end(args.users)
    print(f"{'materialise':14s} {e2e['python'] * 1e3:10.1f} {e2e['cython'] * 1e3:10.1f} "
          f"{e2e['python'] / e2e['cython']:7.2f}x  (random-graph, {args.users} users, baseline)")


if __name__ == "__main__":
    main()
