"""Time the numba kernels against their pure-numpy counterparts.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Numba timings exclude the first (compiling) call. The FFT-based PDE step is
timed once for scale; it does not use these kernels.
"""

import argparse
import time

import numpy as np

from bfamily import _accel, _kernels
from bfamily.equation import Parameters, State
from bfamily.integrator import StepConfig, step


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    rows = []
    for n in (256, 512, 1024):
        kern, f = rng.standard_normal(n), rng.standard_normal(n)
        cases = [("circular_convolve", n, lambda: _kernels.circular_convolve_numpy(kern, f), lambda: _kernels.circular_convolve_numba(kern, f))]
        coef_a = rng.standard_normal(n // 2 + 1) + 1j * rng.standard_normal(n // 2 + 1)
        coef_b = rng.standard_normal(n // 2 + 1) + 1j * rng.standard_normal(n // 2 + 1)
        x = rng.uniform(0, 1, 64)
        cases.append(
            ("eval_modes_pair (64 pts)", n, lambda: _kernels.eval_modes_pair_numpy(coef_a, coef_b, x), lambda: _kernels.eval_modes_pair_numba(coef_a, coef_b, x))
        )
        for name, size, np_fn, nb_fn in cases:
            t_np = best_of(np_fn, args.repeat)
            if _accel.HAVE_NUMBA:
                nb_fn()
                t_nb = best_of(nb_fn, args.repeat)
            else:
                t_nb = float("nan")
            rows.append((name, size, t_np, t_nb))
    s = State(0.0, 0.2 + 0.1 * np.cos(2 * np.pi * np.arange(256) / 256))
    t_step = best_of(lambda: step(s, Parameters(2.0, 1.0, 1), StepConfig(dt=1e-4, t_end=1.0)), args.repeat)
    print(f"numba enabled: {_accel.HAVE_NUMBA}")
    print(f"{'kernel':<26}{'n':>6}{'numpy ms':>12}{'numba ms':>12}{'speedup':>10}")
    for name, size, t_np, t_nb in rows:
        print(f"{name:<26}{size:>6}{t_np * 1e3:>12.3f}{t_nb * 1e3:>12.3f}{t_np / t_nb:>10.1f}")
    print(f"one RK4 step, n=256 (FFT path): {t_step * 1e3:.3f} ms")


if __name__ == "__main__":
    main()
