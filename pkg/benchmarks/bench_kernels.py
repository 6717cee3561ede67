"""Numba versus numpy kernel timings.

    python3 benchmarks/bench_kernels.py [--repeats 5] [--trials 512]

Part 1 times the per-unit kernel on synthetic data at evaluation-sized shapes.
Part 2 times a full Monte Carlo run per backend. Both report agreement.
"""
import argparse
import time

import numpy as np

from lisout import kernels
from lisout.channel import complex_normal
from lisout.config import SystemConfig
from lisout.scenario import Scenario
from lisout.simulation import run_trials

SHAPES = [  # (M, J, P): unit antennas, interferers, NLOS paths
    (100, 8, 10),
    (100, 80, 10),
    (400, 24, 10),
    (400, 80, 10),
    (1600, 24, 10),
]


def best_of(fn, repeats):
    fn()  # warm-up (numba compiles or loads its cache here)
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def bench_kernel(repeats, trials):
    rng = np.random.default_rng(0)
    print(f"{'M':>5} {'J':>4} {'P':>3} {'numpy ms':>10} {'numba ms':>10} {'speedup':>8} {'max rel diff':>13}")
    for M, J, P in SHAPES:
        h = complex_normal(rng, M)
        B = complex_normal(rng, (M, 1 + J + J * P))
        e = complex_normal(rng, (trials, M))
        g = complex_normal(rng, (trials, J, P))
        res, times = {}, {}
        for name in ("numpy", "numba"):
            prep = kernels.prepare(B, name)
            times[name] = best_of(lambda: kernels.unit_terms(h, prep, e, g, 0.5, name), repeats)
            res[name] = kernels.unit_terms(h, prep, e, g, 0.5, name)
        diff = max(float(np.max(np.abs(a - b) / np.abs(a).max())) for a, b in zip(res["numpy"], res["numba"]))
        print(f"{M:>5} {J:>4} {P:>3} {times['numpy'] * 1e3:>10.2f} {times['numba'] * 1e3:>10.2f} "
              f"{times['numpy'] / times['numba']:>8.2f} {diff:>13.1e}")


def bench_end_to_end(trials):
    print(f"\nend to end: {trials} trials per scenario")
    for M, mult in ((100, 4), (100, 2), (400, 2)):
        scen = Scenario(SystemConfig(antennas=M, spacing=mult * 0.25))
        out = {}
        for name in ("numpy", "numba"):
            run_trials(scen, 8, backend=name)  # fills the projection cache, compiles
            t0 = time.perf_counter()
            out[name] = (run_trials(scen, trials, backend=name).sum_rate(), time.perf_counter() - t0)
        same = np.allclose(out["numpy"][0], out["numba"][0], rtol=1e-12)
        print(f"M={M:<5} K={scen.K:<3} numpy {out['numpy'][1]:7.2f} s  numba {out['numba'][1]:7.2f} s  "
              f"agree {same}")


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--repeats", type=int, default=5)
    ap.add_argument("--trials", type=int, default=512)
    ap.add_argument("--skip-end-to-end", action="store_true")
    args = ap.parse_args()
    print(f"default backend: {kernels.BACKEND}")
    bench_kernel(args.repeats, args.trials)
    if not args.skip_end_to_end:
        bench_end_to_end(args.trials)


if __name__ == "__main__":
    main()
