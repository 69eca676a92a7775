"""Time the numba kernels against the numpy fallback.

    python benchmarks/bench_backends.py [--order 4096] [--draws 200000] [--repeat 3]

Both backends run on identical inputs; sampler outputs are checked for exact
equality and series outputs for agreement to 1e-10 before any timing is shown.
"""
import argparse
import time

import numpy as np

from citetoy import kernels
from citetoy.models import Atoms
from citetoy.sampler import RngState


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t)
    return min(times), out


def cases(order, draws):
    rng = np.random.default_rng(1)
    a = np.r_[1.0, rng.normal(scale=0.1, size=order)]
    b = np.r_[1.0, rng.normal(scale=0.1, size=order)]
    root = RngState(7).key
    kind, aq, acw, s, beta = Atoms(((0.3, 0.5), (0.7, 0.5))).sampler_arrays()
    aq, acw = np.ascontiguousarray(aq, float), np.ascontiguousarray(acw, float)
    return [
        ("cauchy", "series", lambda m: m.cauchy(a, b)),
        ("series_exp", "series", lambda m: m.series_exp(a)),
        ("series_pow(0.5)", "series", lambda m: m.series_pow(a, 0.5)),
        ("series_reciprocal", "series", lambda m: m.series_reciprocal(a)),
        ("geometric q=0.01", "sample", lambda m: m.bulk_geometric(root, 0, draws, 0.01)),
        ("citations a=0.5 p=0.5", "sample", lambda m: m.bulk_citations(root, 0, draws, 0.5, 0.5)),
        ("author (0.3,0.6,0.4)", "sample", lambda m: m.bulk_author(root, 0, draws, 0.3, 0.6, 0.4)),
        ("field lam=2", "sample", lambda m: m.bulk_field(root, 0, draws, 2.0, 0.3, 0.6, 0.4)),
        ("elite gamma=0.9", "sample",
         lambda m: m.bulk_elite(root, 0, draws // 10, 1.0, 0.9, kind, aq, acw, s, beta)),
    ]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--order", type=int, default=4096)
    ap.add_argument("--draws", type=int, default=200_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    nb, npy = kernels.load("numba"), kernels.load("numpy")
    print(f"order={args.order} draws={args.draws} repeat={args.repeat}")
    print(f"{'kernel':<24}{'numba [s]':>12}{'numpy [s]':>12}{'speedup':>10}")
    for name, kind, fn in cases(args.order, args.draws):
        fn(nb)  # compile outside the timed region
        t_nb, out_nb = best_of(lambda: fn(nb), args.repeat)
        t_np, out_np = best_of(lambda: fn(npy), args.repeat)
        if kind == "sample":
            assert np.array_equal(out_nb[0], out_np[0]) and out_nb[1] == out_np[1], name
        else:
            np.testing.assert_allclose(out_nb, out_np, rtol=1e-10, atol=1e-12, err_msg=name)
        print(f"{name:<24}{t_nb:>12.4f}{t_np:>12.4f}{t_np / t_nb:>9.1f}x")


if __name__ == "__main__":
    main()
