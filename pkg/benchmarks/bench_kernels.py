"""Time the orbit kernels with and without numba.

Each backend runs in its own interpreter because ``PETAL_NO_NUMBA`` is read
at import time.  Usage::

    python benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import json
import os
import subprocess
import sys

WORKLOAD = r"""
import json, time
import numpy as np
from petal import _kernels as K
from petal.config import use_numba

def best(fn, repeat):
    fn()  # warm-up (and JIT compile)
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)

rng = np.random.default_rng(0)
zs = (rng.uniform(-2, 2, 20000) + 1j * rng.uniform(-2, 2, 20000)).astype(np.complex128)
top = np.exp(2.0 ** (5 - np.arange(64) / 64 - 1) + 0j).astype(np.complex128)
repeat = {repeat}

results = {{
    "numba": use_numba(),
    "green_escape_many": best(lambda: K.green_escape_many(zs, -0.12 + 0.75j, 1e8, 1000), repeat),
    "run_orbit_parabolic": best(
        lambda: K.run_orbit(K.QUADRATIC, 1 + 0j, 0j, 0j, True, -0.01 + 0j, K.STOP_ATTRACTING, 1 + 0j, 0j, 1e4 + 1e4j, 10**6),
        repeat),
    "quadratic_pullback": best(lambda: K.quadratic_pullback(top, 0.25 + 0j, 64 * 40, 1e-6), repeat),
}}
print(json.dumps(results))
"""


def run(no_numba: bool, repeat: int) -> dict:
    env = dict(os.environ)
    if no_numba:
        env["PETAL_NO_NUMBA"] = "1"
    else:
        env.pop("PETAL_NO_NUMBA", None)
    out = subprocess.run(
        [sys.executable, "-c", WORKLOAD.format(repeat=repeat)], env=env, capture_output=True, text=True, check=True
    )
    return json.loads(out.stdout.strip().splitlines()[-1])


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args()
    fast, slow = run(False, args.repeat), run(True, args.repeat)
    print(f"{'kernel':<24}{'numba [s]':>12}{'numpy [s]':>12}{'speedup':>10}")
    for key in ("green_escape_many", "run_orbit_parabolic", "quadratic_pullback"):
        a, b = fast[key], slow[key]
        print(f"{key:<24}{a:>12.4g}{b:>12.4g}{b / a:>10.1f}")
    if not fast["numba"]:
        print("note: numba unavailable, both columns ran the fallback")


if __name__ == "__main__":
    main()
