"""Compare the compiled kernels with the numpy fallback.

Run with ``python benchmarks/bench_kernels.py``.  Each kernel is timed on
both backends and the results are checked to agree.
"""

import argparse
import timeit

import numpy as np

from cavityrqi.kernels import _fallback

try:
    from cavityrqi.kernels import _core
except ImportError:  # extension not built
    _core = None


def cases(s_max):
    branches = np.arange(s_max, dtype=np.int64)
    x = _fallback.dirac_roots(branches, 3.0)
    return {
        "dirac_roots": lambda m: m.dirac_roots(branches, 3.0),
        "scalar_beta_antidiagonals": lambda m: m.scalar_beta_antidiagonals(2.0, s_max),
        "dirac_beta_antidiagonals": lambda m: m.dirac_beta_antidiagonals(3.0, x),
    }


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    p.add_argument("--s-max", type=int, default=2001)
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args(argv)
    if _core is None:
        print("compiled extension not built; only the fallback is timed")
    print(f"{'kernel':28s} {'python [ms]':>12s} {'compiled [ms]':>14s} {'speedup':>8s} {'max diff':>10s}")
    for name, run in cases(args.s_max).items():
        t_py = min(timeit.repeat(lambda: run(_fallback), number=1, repeat=args.repeat))
        if _core is None:
            print(f"{name:28s} {1e3 * t_py:12.2f}")
            continue
        t_c = min(timeit.repeat(lambda: run(_core), number=1, repeat=args.repeat))
        diff = float(np.max(np.abs(np.asarray(run(_core)) - np.asarray(run(_fallback)))))
        print(f"{name:28s} {1e3 * t_py:12.2f} {1e3 * t_c:14.2f} {t_py / t_c:8.1f} {diff:10.2e}")


if __name__ == "__main__":
    main()
