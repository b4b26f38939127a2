"""Time the numba kernels against their numpy fallbacks.

    python benchmarks/bench_kernels.py [--length 65536] [--repeat 5]
"""
import argparse
import os
import subprocess
import sys
import time

import numpy as np

from sstraffic import _accel
from sstraffic.hurst import DEFAULT_GRID, _poly_basis


def best_of(fn, repeat):
    fn()  # warm-up, includes JIT compilation
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--length", type=int, default=2**16)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    x = rng.lognormal(size=args.length)
    eps = rng.standard_normal(args.length)
    profile = np.cumsum(x - x.mean())
    scales = DEFAULT_GRID.scales(args.length)
    bases = [_poly_basis(int(n), 1) for n in scales]

    cases = {
        "ar1": (lambda: _accel.ar1_filter_numba(eps, 0.5), lambda: _accel.ar1_filter_numpy(eps, 0.5)),
        "dfa (all scales)": (
            lambda: [_accel.dfa_mean_square_numba(profile, b) for b in bases],
            lambda: [_accel.dfa_mean_square_numpy(profile, b) for b in bases],
        ),
        "rs (all scales)": (
            lambda: [_accel.rs_mean_numba(x, int(n)) for n in scales],
            lambda: [_accel.rs_mean_numpy(x, int(n)) for n in scales],
        ),
    }
    print(f"length={args.length}  scales={len(scales)}  active backend={_accel.BACKEND}")
    print(f"{'kernel':<18}{'numba ms':>10}{'numpy ms':>10}{'speedup':>9}")
    for name, (fast, slow) in cases.items():
        if not _accel.HAS_NUMBA:
            print(f"{name:<18}{'-':>10}{best_of(slow, args.repeat) * 1e3:>10.2f}{'-':>9}")
            continue
        tn, tp = best_of(fast, args.repeat), best_of(slow, args.repeat)
        print(f"{name:<18}{tn * 1e3:>10.2f}{tp * 1e3:>10.2f}{tp / tn:>8.1f}x")
    if _accel.HAS_NUMBA:
        end_to_end()


E2E = """
import time
from sstraffic.experiments import ExperimentConfig, run_pairwise
cfg = ExperimentConfig("self_plus_self", replications=10, base_seed=0)
run_pairwise(cfg)
t0 = time.perf_counter()
run_pairwise(ExperimentConfig("self_plus_self", replications=100, base_seed=1))
print(time.perf_counter() - t0)
"""


def end_to_end():
    """Pairwise H=(0.8, 0.6) sweep (5 ratios x 100 replications, N=1000) under each backend."""
    out = {}
    for flag in ("0", "1"):
        env = dict(os.environ, SSTRAFFIC_NO_NUMBA=flag)
        res = subprocess.run([sys.executable, "-c", E2E], env=env, capture_output=True, text=True, check=True)
        out["numpy" if flag == "1" else "numba"] = float(res.stdout)
    print(f"{'pairwise sweep':<18}{out['numba'] * 1e3:>10.0f}{out['numpy'] * 1e3:>10.0f}"
          f"{out['numpy'] / out['numba']:>8.1f}x")


if __name__ == "__main__":
    main()
