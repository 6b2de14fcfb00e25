"""Time the compiled product kernels against the numpy fallback.

    python benchmarks/bench_kernels.py --zeros 20000 --points 2000
"""
import argparse
import timeit

import numpy as np

from polydensity import kernels


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--zeros", type=int, default=20000, help="number of zero pairs")
    ap.add_argument("--points", type=int, default=2000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    k = np.arange(1.0, args.zeros + 1)
    inv = 1 / np.concatenate([-k, k])
    mult = np.ones(inv.size, dtype=np.int64)
    rng = np.random.default_rng(0)
    x = rng.uniform(-50, 50, args.points)
    z = x + 1j * rng.uniform(-5, 5, args.points)

    try:
        kernels.get_backend("cython")
        backends = ["cython", "python"]
    except ImportError:
        print("compiled extension not available; timing the fallback only")
        backends = ["python"]

    print(f"{'kernel':<18}{'backend':<10}{'best [s]':>10}")
    best = {}
    for name, call in [("prod_log_real", lambda b: kernels.prod_log_real(x, inv, mult, backend=b)),
                       ("prod_log_complex", lambda b: kernels.prod_log_complex(z, inv, mult, backend=b))]:
        for b in backends:
            t = min(timeit.repeat(lambda: call(b), number=1, repeat=args.repeat))
            best[name, b] = t
            print(f"{name:<18}{b:<10}{t:>10.4f}")
        if len(backends) == 2:
            print(f"{'':<18}{'speedup':<10}{best[name, 'python'] / best[name, 'cython']:>10.1f}x")


if __name__ == "__main__":
    main()
