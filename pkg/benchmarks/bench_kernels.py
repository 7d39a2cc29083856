"""Compare the compiled and pure-Python kernel backends.

Usage: python3 benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import timeit

import numpy as np

from fiscalshock._core import backends
from fiscalshock.svr import KernelSpec, TrainingSet, gram


def _smo_case(n, seed=0):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, 6))
    y = np.sin(X[:, 0]) + 0.3 * X[:, 1] + 0.1 * rng.standard_normal(n)
    D = TrainingSet.from_arrays(X, y)
    K = np.ascontiguousarray(gram(KernelSpec("rbf", gamma=1.0 / 6), D.inputs, D.inputs))
    return K, np.ascontiguousarray(D.targets)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    mods = backends()
    rng = np.random.default_rng(1)
    cases = []
    for T in (180, 5000):
        y = np.cumsum(rng.standard_normal(T))
        cases.append((f"hp_trend T={T}", lambda m, y=y: m.hp_trend(y, 1600.0)))
    for n in (100, 300):
        K, t = _smo_case(n)
        cases.append((f"smo_solve n={n}", lambda m, K=K, t=t: m.smo_solve(K, t, 10.0, 0.05, 1e-3, 10**6, False)))

    names = list(mods)
    print(f"{'kernel':<20}" + "".join(f"{n + ' (ms)':>16}" for n in names) + f"{'speed-up':>12}  agree")
    for label, fn in cases:
        times, outs = [], []
        for n in names:
            number = 1
            t = min(timeit.repeat(lambda: fn(mods[n]), number=number, repeat=args.repeat)) / number
            times.append(t * 1e3)
            out = fn(mods[n])
            outs.append(out[0] if isinstance(out, tuple) else out)
        agree = all(np.allclose(o, outs[0], rtol=1e-9, atol=1e-12) for o in outs[1:])
        speed = f"{times[0] / times[-1]:.1f}x" if len(times) > 1 else "-"
        print(f"{label:<20}" + "".join(f"{t:>16.3f}" for t in times) + f"{speed:>12}  {agree}")


if __name__ == "__main__":
    main()
