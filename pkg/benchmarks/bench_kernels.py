"""Compare the numba and numpy float64 kernels, and the OGF oracle on each.

    python3 benchmarks/bench_kernels.py [--sizes 64 256 1024] [--repeat 5]

Numba compile time is excluded (one warm-up call per kernel and size).
"""

from __future__ import annotations

import argparse
import os
import timeit

import numpy as np

from combspecies import _kernels
from combspecies.numeric import ogf_value
from combspecies.resources import load_corpus


def _cases(n: int, rng: np.random.Generator):
    a, b = rng.random(n), rng.random(n)
    g = 0.5 * 0.3 ** np.arange(1, n + 1)
    phi = _kernels.totients(n)
    return {
        "convolve": (a, b),
        "horner_at_powers": (a / n, 0.3, n),
        "polya_sums": (g, 1.0),
        "cyc_sums": (g, phi),
    }


def bench_kernels(sizes, repeat: int) -> list[tuple]:
    rng = np.random.default_rng(0)
    fast, ref = _kernels.numba_kernels(), _kernels.numpy_kernels()
    rows = []
    for n in sizes:
        for name, args in _cases(n, rng).items():
            fast[name](*args)  # compile
            if not np.allclose(fast[name](*args), ref[name](*args), rtol=1e-12, atol=1e-300):
                raise AssertionError(f"{name} disagrees at n={n}")
            t_fast = min(timeit.repeat(lambda: fast[name](*args), number=3, repeat=repeat)) / 3
            t_ref = min(timeit.repeat(lambda: ref[name](*args), number=3, repeat=repeat)) / 3
            rows.append((name, n, t_fast, t_ref))
    return rows


def bench_oracle(repeat: int) -> dict:
    sys_ = load_corpus("cayley")
    out = {}
    for flag in ("", "1"):
        os.environ[_kernels._FLAG] = flag
        _kernels.reset()
        ogf_value(sys_, 0.3, 1e-12)  # warm-up, includes compilation
        out[_kernels.backend()] = min(timeit.repeat(lambda: ogf_value(sys_, 0.3, 1e-12), number=1, repeat=repeat))
    os.environ.pop(_kernels._FLAG, None)
    _kernels.reset()
    return out


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[64, 256, 1024, 4096])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    print(f"{'kernel':<18}{'n':>7}{'numba [s]':>13}{'numpy [s]':>13}{'speedup':>9}")
    for name, n, t_fast, t_ref in bench_kernels(args.sizes, args.repeat):
        print(f"{name:<18}{n:>7}{t_fast:>13.3e}{t_ref:>13.3e}{t_ref / t_fast:>9.1f}")
    print()
    for backend, t in bench_oracle(args.repeat).items():
        print(f"Cayley OGF value at 0.3, {backend:<6} kernels: {t:.3f} s")


if __name__ == "__main__":
    main()
