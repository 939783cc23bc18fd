"""Compare the compiled and pure-Python kernels.

    python benchmarks/bench_backends.py [--repeat N] [--grid]

Times the per-cell kernels (Lyapunov solve, eigenvalues, symplectic
spectrum) at the reference point and, with ``--grid``, the default sweep.
"""

import argparse
import statistics
import time

from atomopt import _backend, config, linalg, model, sweep


def bench(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=200)
    ap.add_argument("--grid", action="store_true", help="also time the full default sweep")
    args = ap.parse_args()

    run_cfg = config.build("sweep", config.load())
    p = run_cfg.params
    a, q = model.build_drift(p), model.build_noise(p)
    sigma = model.steady_covariance(p).sigma
    cases = {
        "lyapunov": lambda: linalg.solve_lyapunov(a, q),
        "eigenvalues": lambda: linalg.eigenvalues(a),
        "symplectic": lambda: linalg.symplectic_eigenvalues(sigma),
    }
    names = sorted(_backend.BACKENDS)
    results = {}
    for name in names:
        _backend.use(name)
        for case, fn in cases.items():
            fn()
            results[name, case] = bench(fn, args.repeat)
        if args.grid:
            results[name, "grid"] = bench(lambda: sweep.run_sweep(run_cfg.sweep), 1)

    cols = list(cases) + (["grid"] if args.grid else [])
    print(f"{'case':<12}" + "".join(f"{n:>14}" for n in names) + ("     speedup" if len(names) > 1 else ""))
    for case in cols:
        row = f"{case:<12}" + "".join(f"{results[n, case] * 1e3:>12.3f}ms" for n in names)
        if "cython" in names and "python" in names:
            row += f"{results['python', case] / results['cython', case]:>11.1f}x"
        print(row)


if __name__ == "__main__":
    main()
