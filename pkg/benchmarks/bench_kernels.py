"""Compiled vs numpy stencil kernels on the desk-scale metric.

    python3 benchmarks/bench_kernels.py [--n 201 401] [--repeat 5]

Prints best-of-``repeat`` wall time per kernel and backend, the speedup,
and the max difference between the two backends' outputs.
"""

import argparse
import time

import numpy as np

from biconserve.kernels import available_backends, get_backend
from biconserve.metric import build_metric
from biconserve.profile import integrate_profile

KERNELS = ("christoffels", "gauss_curvature", "brioschi", "laplace_beltrami", "grad_norm_sq")


def _args(grid, f):
    g = (grid.g11, grid.g12, grid.g22)
    return {
        "christoffels": (*g, grid.hu, grid.hs),
        "gauss_curvature": (*g, grid.hu, grid.hs),
        "brioschi": (*g, grid.hu, grid.hs),
        "laplace_beltrami": (*g, f, grid.hu, grid.hs),
        "grad_norm_sq": (*g, f, grid.hu, grid.hs),
    }


def best_time(fn, args, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n", type=int, nargs="+", default=[201, 401])
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args(argv)
    backends = available_backends()
    if "cython" not in backends:
        print("compiled kernels not built; timing the numpy fallback only")
    print(f"{'n':>5s} {'kernel':<18s} " + " ".join(f"{b:>10s}" for b in backends)
          + f" {'speedup':>8s} {'max diff':>10s}")
    for n in args.n:
        prof = integrate_profile(0.0, -1.0, 1.0, (0.0, 0.5), n=n)
        grid = build_metric(prof, np.linspace(-1.0, 1.0, n))
        f = np.log(-np.broadcast_to(prof.k_values[:, None], grid.shape))
        calls = _args(grid, f)
        for name in KERNELS:
            times, outs = {}, {}
            for b in backends:
                times[b], outs[b] = best_time(getattr(get_backend(b), name), calls[name], args.repeat)
            row = f"{n:5d} {name:<18s} " + " ".join(f"{times[b] * 1e3:9.2f}ms" for b in backends)
            if len(backends) == 2:
                diff = float(np.max(np.abs(np.asarray(outs["cython"]) - np.asarray(outs["python"]))))
                row += f" {times['python'] / times['cython']:7.1f}x {diff:10.2e}"
            print(row)


if __name__ == "__main__":
    main()
