"""Compare the compiled and pure-Python kernel backends.

Run with ``python benchmarks/bench_kernels.py``.  Each kernel is timed on a
problem of the size the solver actually uses; the last block times a full
q = 13 SCF in a subprocess per backend, since the backend is fixed at import.
"""

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from bhetoscf import kernels

SCF_SNIPPET = (
    "from bhetoscf.scf import single_zeta_energy;"
    "from bhetoscf.integrals import _family_dimensionless as f;"
    "import timeit;"
    "t=min(timeit.repeat(lambda:(f.cache_clear(),single_zeta_energy(2,13,1.00000575,2.609)),number=5,repeat=3))/5;"
    "print(t)"
)


def cases():
    rng = np.random.default_rng(7)
    a = rng.normal(size=(13, 13))
    a = a + a.T
    x = np.linspace(0.0, 60.0, 3000)
    g = np.linspace(0.01, 40.0, 1000)
    return {
        "jacobi_eigh 13x13": lambda b: b.jacobi_eigh(a),
        "laguerre_table m=20, 3000 pts": lambda b: b.laguerre_table(20, 1.9, x),
        "lower_gamma_array 1000 pts": lambda b: b.lower_gamma_array(3.7, g),
        "hyp2f1_a1_series z=0.9": lambda b: b.hyp2f1_a1_series(6.2, 4.1, 0.9),
    }


def time_call(fn, number):
    return min(timeit.repeat(fn, number=number, repeat=5)) / number


def scf_time(pure):
    env = dict(os.environ, BHETOSCF_PURE_PYTHON="1" if pure else "0")
    out = subprocess.run([sys.executable, "-c", SCF_SNIPPET], env=env, capture_output=True, text=True, check=True)
    return float(out.stdout.strip())


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--number", type=int, default=50, help="calls per timing sample")
    parser.add_argument("--skip-scf", action="store_true")
    args = parser.parse_args()
    if kernels.compiled_backend is None:
        sys.exit("compiled backend not built; run `pip install -e . --no-build-isolation` first")
    print(f"{'kernel':34} {'python':>12} {'cython':>12} {'speed-up':>9}")
    for name, fn in cases().items():
        tp = time_call(lambda: fn(kernels.python_backend), args.number)
        tc = time_call(lambda: fn(kernels.compiled_backend), args.number)
        print(f"{name:34} {tp * 1e6:10.1f}us {tc * 1e6:10.1f}us {tp / tc:8.1f}x")
    if not args.skip_scf:
        tp, tc = scf_time(True), scf_time(False)
        print(f"{'SCF He q=13 (tables + iterations)':34} {tp * 1e3:10.2f}ms {tc * 1e3:10.2f}ms {tp / tc:8.1f}x")


if __name__ == "__main__":
    main()
