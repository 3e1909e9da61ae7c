"""Compare the compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import timeit

import numpy as np

from hawkes_edgeworth import Theta, simulate
from hawkes_edgeworth import _pykernels

try:
    from hawkes_edgeworth import _kernels
except ImportError:
    _kernels = None


def cases(theta, events):
    t, T = events.times, events.horizon
    mu, alpha, beta = theta.as_array()
    rng = np.random.Generator(np.random.Philox(0))
    exps = rng.standard_exponential(256)
    unifs = rng.random(256)
    out = np.empty(256)
    return {
        "thin_chunk": lambda m: m.thin_chunk(mu, alpha, beta, T, 0.0, 0.0, exps, unifs, out),
        "core_sums": lambda m: m.core_sums(t, T, beta),
        "loglik_value": lambda m: m.loglik_value(t, T, mu, alpha, beta),
        "loglik_derivs": lambda m: m.loglik_derivs(t, T, mu, alpha, beta),
        "third_sums": lambda m: m.third_sums(t, mu, alpha, beta),
    }


def best_of(fn, module, repeat):
    timer = timeit.Timer(lambda: fn(module))
    number, _ = timer.autorange()
    return min(timer.repeat(repeat=repeat, number=number)) / number


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--horizon", type=float, default=300.0)
    args = parser.parse_args()

    theta = Theta(0.5, 1.0, 1.3)
    events = simulate(theta, args.horizon, 1)
    print(f"path: T={args.horizon:g}, n={len(events)} events")
    print(f"{'kernel':<15}{'python (us)':>14}{'cython (us)':>14}{'speedup':>10}")
    for name, fn in cases(theta, events).items():
        py = best_of(fn, _pykernels, args.repeat) * 1e6
        if _kernels is None:
            print(f"{name:<15}{py:>14.1f}{'n/a':>14}{'':>10}")
            continue
        cy = best_of(fn, _kernels, args.repeat) * 1e6
        print(f"{name:<15}{py:>14.1f}{cy:>14.2f}{py / cy:>9.0f}x")


if __name__ == "__main__":
    main()
