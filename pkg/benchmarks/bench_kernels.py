"""Compiled vs numpy kernels on the two hot operations.

    python benchmarks/bench_kernels.py [--repeat 200]
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from hqs_accred import _kernels_py
from hqs_accred.engine import depolarizing

try:
    from hqs_accred import _kernels
except ImportError:
    _kernels = None


def _random_state(n, rng):
    d = 1 << n
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    rho = a @ a.conj().T
    return rho / np.trace(rho)


def _random_layer(n, rng):
    mats = []
    for _ in range(n):
        q, _ = np.linalg.qr(rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)))
        mats.append(q)
    return np.stack(mats)


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--repeat", type=int, default=200)
    p.add_argument("--sizes", type=int, nargs="+", default=[2, 3, 4, 6, 8])
    args = p.parse_args(argv)
    rng = np.random.default_rng(0)
    backends = [("python", _kernels_py)] + ([("cython", _kernels)] if _kernels else [])
    if _kernels is None:
        print("compiled extension not built; timing the numpy fallback only")
    print(f"{'op':<12}{'n':>3}" + "".join(f"{name:>14}" for name, _ in backends) + "   speedup")
    for n in args.sizes:
        rho = _random_state(n, rng)
        layer = _random_layer(n, rng)
        ch = depolarizing(0.1, (1, 2) if n > 1 else (1,))
        qs = [q - 1 for q in ch.qubits]
        cases = {
            "apply_layer": lambda m: m.apply_layer(rho, layer, n),
            "apply_kraus": lambda m: m.apply_kraus(rho, ch.stack, qs, n),
        }
        for op, fn in cases.items():
            times = []
            for _, mod in backends:
                t = min(timeit.repeat(lambda: fn(mod), number=args.repeat, repeat=3)) / args.repeat
                times.append(t)
            speed = f"{times[0] / times[1]:8.2f}x" if len(times) == 2 else ""
            print(f"{op:<12}{n:>3}" + "".join(f"{t * 1e6:12.1f}us" for t in times) + "  " + speed)


if __name__ == "__main__":
    main()
