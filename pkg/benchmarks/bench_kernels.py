"""Compare the numba and numpy ascent kernels on random channels.

    python3 benchmarks/bench_kernels.py [--runs N] [--seed S]

For each (d, kraus count, mode) cell both backends start from the same
inputs; the script reports median wall time per ascent, the speedup, and the
largest difference in the final objective value.
"""
from __future__ import annotations

import argparse
import statistics
import time

import numpy as np

from chancomp import _kernels
from chancomp.channels import random_channel
from chancomp.numerics import random_pure, rng_for

MODES = {"power p=2": (_kernels.MODE_POWER, 2.0), "entropy": (_kernels.MODE_ENTROPY, 1.0), "maxeig": (_kernels.MODE_MAXEIG, np.inf)}


def bench_cell(kraus, starts, mode, p, backend):
    times, values = [], []
    for psi0 in starts:
        t0 = time.perf_counter()
        res = _kernels.ascend(kraus, psi0, mode, p, backend=backend)
        times.append(time.perf_counter() - t0)
        values.append(res[1])
    return statistics.median(times), np.array(values)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--runs", type=int, default=20)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args(argv)
    if not _kernels.HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")

    rng = rng_for(args.seed)
    warm = random_channel(2, 2, 2, rng)
    for mode, p in MODES.values():  # trigger JIT compilation outside the timings
        _kernels.ascend(warm.kraus, random_pure(2, rng), mode, p, backend="numba")

    print(f"{'d':>2} {'m':>3} {'mode':<10} {'numpy ms':>9} {'numba ms':>9} {'speedup':>8} {'max |dv|':>9}")
    for d, m in ((2, 2), (2, 4), (3, 3), (3, 9), (4, 8), (6, 12)):
        phi = random_channel(d, d, m, rng)
        starts = [random_pure(d, rng) for _ in range(args.runs)]
        for name, (mode, p) in MODES.items():
            t_np, v_np = bench_cell(phi.kraus, starts, mode, p, "numpy")
            t_nb, v_nb = bench_cell(phi.kraus, starts, mode, p, "numba")
            diff = float(np.max(np.abs(v_np - v_nb)))
            print(f"{d:>2} {m:>3} {name:<10} {1e3 * t_np:9.2f} {1e3 * t_nb:9.2f} {t_np / t_nb:7.1f}x {diff:9.1e}")


if __name__ == "__main__":
    main()
