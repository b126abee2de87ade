"""Benchmark the compiled regression kernels against the numpy fallback.

Usage: python3 benchmarks/bench_kernels.py [--repeats N]

Times linreg_loss_grad on several batch sizes for both backends, then an
end-to-end 200-step BFE run on the regression problem with each backend
(the run-level comparison uses a subprocess so the import-time backend
selection via BFEOPT_PURE_PYTHON takes effect).
"""
import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from bfeopt.kernels import _linreg_py

try:
    from bfeopt.kernels import _linreg_cy
except ImportError:
    _linreg_cy = None

RUN_SNIPPET = """
import time
from bfeopt.harness import RunConfig, run_experiment
from bfeopt.kernels import BACKEND
cfg = RunConfig(optimizer="bfe", problem="linreg", seed=42, max_steps=200,
                lim_zero=1e-12)
start = time.perf_counter()
run_experiment(cfg)
print(f"  end-to-end 200-step bfe run [{BACKEND}]: "
      f"{time.perf_counter() - start:.3f} s")
"""


def bench_kernel(fn, x, y, repeats):
    return min(timeit.repeat(lambda: fn(1.0, 1.0, x, y),
                             number=200, repeat=repeats)) / 200


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    if _linreg_cy is None:
        print("cython backend not built; showing the numpy fallback only")

    rng = np.random.default_rng(0)
    print(f"{'batch':>8} {'numpy (us)':>12} {'cython (us)':>12} "
          f"{'speedup':>8}")
    for n in (64, 512, 4096, 32768, 262144):
        x = rng.uniform(0, 10, n)
        y = 5.0 * x + 9.0 + rng.normal(0, 1, n)
        t_py = bench_kernel(_linreg_py.linreg_loss_grad, x, y, args.repeats)
        if _linreg_cy is None:
            print(f"{n:>8} {t_py * 1e6:>12.2f} {'-':>12} {'-':>8}")
            continue
        t_cy = bench_kernel(_linreg_cy.linreg_loss_grad, x, y, args.repeats)
        print(f"{n:>8} {t_py * 1e6:>12.2f} {t_cy * 1e6:>12.2f} "
              f"{t_py / t_cy:>8.2f}")

    print()
    sys.stdout.flush()
    for pure in ("", "1"):
        env = dict(os.environ, BFEOPT_PURE_PYTHON=pure)
        if not pure:
            env.pop("BFEOPT_PURE_PYTHON")
        subprocess.run([sys.executable, "-c", RUN_SNIPPET], env=env,
                       check=True)


if __name__ == "__main__":
    main()
