"""Compare the compiled and pure-Python sweep kernels.

    python3 benchmarks/bench_kernel.py [--n 20000] [--start 1]

Both kernels run the same block for a few covers; the script checks that the
arrays are identical and prints wall times and the speedup.
"""
import argparse
import time

import numpy as np

from ramstat import kernel
from ramstat.cover import make_cover, make_quadratic_cover

COVERS = {
    "T": make_quadratic_cover((0, 1)),
    "T^2+1": make_quadratic_cover((1, 0, 1)),
    "T(T^2+1)": make_quadratic_cover((0, 1, 0, 1)),
    "3T^3-7 (e=3)": make_cover([((-7, 0, 0, 3), 3)]),
}


def timed(impl, spec, start, stop):
    f = list(spec.family.f) if spec.is_quadratic else None
    t0 = time.perf_counter()
    out = impl.evaluate_block(spec.orbit_coeffs(), spec.ram_indices(), spec.p0, f, start, stop)
    return time.perf_counter() - t0, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=20000, help="block length")
    ap.add_argument("--start", type=int, default=1)
    args = ap.parse_args()
    impls = kernel.backends()
    if "cython" not in impls:
        print("compiled kernel not available; build with `pip install -e . --no-build-isolation`")
        return
    stop = args.start + args.n
    print(f"block [{args.start}, {stop}), {args.n} values")
    print(f"{'cover':<14} {'python s':>10} {'cython s':>10} {'speedup':>8}  identical")
    for name, spec in COVERS.items():
        tp, a = timed(impls["python"], spec, args.start, stop)
        tc, b = timed(impls["cython"], spec, args.start, stop)
        print(f"{name:<14} {tp:10.3f} {tc:10.4f} {tp / tc:8.1f}  {np.array_equal(a, b)}")


if __name__ == "__main__":
    main()
