"""Time the numba kernels against their numpy fallbacks on real workloads.

    python3 benchmarks/bench_kernels.py [--repeat 3]

Both paths run in one process by flipping the kernel dispatch; the first
numba call is a warm-up so compile time is reported separately.
"""
from __future__ import annotations

import argparse
import json
import time

import numpy as np

from algworkbench import kernels
from algworkbench._accel import HAVE_NUMBA
from algworkbench.constructions import HirschParams, hirsch_algebra, monk_ra
from algworkbench.constructions.blur import blur_structure, f_family
from algworkbench.cyl_core.matrices import basic_matrices
from algworkbench.graphs import complete_graph
from algworkbench.ra_core import validate_atom_structure


def workloads():
    k3 = monk_ra(complete_graph(3), 3)
    big_blur = blur_structure(*f_family(t=6)).ra
    big_blur.dense(limit=1024)
    bu = blur_structure(*f_family())
    rng = np.random.default_rng(0)
    n = bu.ra.size
    X, Y = (rng.choice(n, 40, replace=False) for _ in range(2))
    Z = np.arange(n)
    return {
        "cycle_law blur F(2,1) t=6": lambda: validate_atom_structure(big_blur),
        "extend_by_node hirsch(3,4,1)": lambda: hirsch_algebra(HirschParams(3, 4, 1)),
        "extend_by_node matrices monk(K3,3) n=4": lambda: basic_matrices(k3, 4),
        "blur_compose_brute F(2,1) 40x40 over all atoms": lambda: bu.brute_compose(X, Y, Z),
    }


def timed(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    rows = []
    original = kernels.use_numba
    try:
        for name, fn in workloads().items():
            kernels.use_numba = lambda: False
            t_np = timed(fn, args.repeat)
            row = {"workload": name, "numpy_s": round(t_np, 6)}
            if HAVE_NUMBA:
                kernels.use_numba = lambda: True
                t0 = time.perf_counter()
                fn()
                row["numba_first_call_s"] = round(time.perf_counter() - t0, 4)
                t_nb = timed(fn, args.repeat)
                row["numba_s"] = round(t_nb, 6)
                row["speedup"] = round(t_np / t_nb, 2) if t_nb > 0 else None
            rows.append(row)
            print(json.dumps(row, sort_keys=True), flush=True)
    finally:
        kernels.use_numba = original
    return rows


if __name__ == "__main__":
    main()
