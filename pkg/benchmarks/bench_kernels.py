"""Time the eigen kernels: compiled extension, pure-Python fallback and LAPACK.

Usage: python benchmarks/bench_kernels.py [--quick] [--repeat R] [--sizes N ...]
"""

import argparse
import importlib
import statistics
import time

import numpy as np

from metricops import _kernels_py


def _compiled():
    try:
        return importlib.import_module("metricops._kernels")
    except ImportError:
        return None


def _time(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times)


def _cases(n, rng):
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return 0.5 * (a + a.conj().T), a


def run(sizes, repeat, python_limit):
    rng = np.random.default_rng(0)
    compiled = _compiled()
    rows = []
    for n in sizes:
        herm, general = _cases(n, rng)
        impls = {"lapack": (lambda: np.linalg.eigh(herm), lambda: np.linalg.eigvals(general))}
        if compiled is not None:
            impls["compiled"] = (lambda: compiled.jacobi_hermitian(herm),
                                 lambda: compiled.hessenberg_qr_eigvals(general))
        if n <= python_limit:
            impls["python"] = (lambda: _kernels_py.jacobi_hermitian(herm),
                               lambda: _kernels_py.hessenberg_qr_eigvals(general))
        for name, (jacobi, qr) in impls.items():
            rows.append((n, name, "hermitian", _time(jacobi, repeat)))
            rows.append((n, name, "general", _time(qr, repeat)))
    return rows


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--quick", action="store_true", help="small sizes, one repetition")
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--sizes", type=int, nargs="+", default=[16, 32, 64, 128])
    parser.add_argument("--python-limit", type=int, default=64,
                        help="largest size timed with the pure-Python fallback")
    args = parser.parse_args(argv)
    sizes, repeat = ([8, 16], 1) if args.quick else (args.sizes, args.repeat)
    rows = run(sizes, repeat, args.python_limit)
    print(f"{'n':>5} {'backend':>9} {'problem':>10} {'seconds':>11}")
    for n, name, problem, t in rows:
        print(f"{n:>5} {name:>9} {problem:>10} {t:>11.6f}")
    return rows


if __name__ == "__main__":
    main()
