#!/usr/bin/env python3
"""Compare the compiled kernels against the pure-numpy fallback.

Spawns one subprocess per backend (the flag is read at import time, so
the comparison needs fresh interpreters), times the weighted NLL and a
full five-method fit on identical data, and prints a table.

Usage: python benchmarks/bench_kernels.py [--blocks K] [--repeat N]
"""

import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json
import time

import numpy as np

import gevmiss
from gevmiss import (
    METHODS,
    ScenarioConfig,
    WeightedSample,
    apply_missingness,
    extract_blocks,
    fit,
    fit_weighted,
    gen_series,
    init_params,
)
from gevmiss.kernels import weighted_nll_arr

k = int(PARAM_BLOCKS)
repeat = int(PARAM_REPEAT)

cfg = ScenarioConfig(
    scenario="I", n_blocks=k, block_size=100, dist="exp1", seed=1, pbm=0.2, pm=0.05
)
values = gen_series("exp1", k * 100, 2)
sim = apply_missingness(values, cfg)
blocks = extract_blocks(sim, 100)
pool = values[~sim.missing_mask]

rng = np.random.default_rng(0)
x = rng.gumbel(0.0, 1.0, size=k)
w = rng.random(k)

# warm-up triggers compilation so steady-state timing is measured
weighted_nll_arr(x, w, 0.0, 1.0, 0.1)
fit_weighted(WeightedSample(x, np.ones(k)), init_params(x))

t0 = time.perf_counter()
n_nll = 2000
for _ in range(n_nll):
    weighted_nll_arr(x, w, 0.0, 1.0, 0.1)
nll_us = (time.perf_counter() - t0) / n_nll * 1e6

t0 = time.perf_counter()
for _ in range(repeat):
    for m in METHODS:
        fit(m, blocks, series_pool=pool)
fit_ms = (time.perf_counter() - t0) / repeat * 1e3

print(json.dumps({
    "backend": "numba" if gevmiss.NUMBA_ENABLED else "numpy",
    "nll_us": nll_us,
    "fit5_ms": fit_ms,
}))
"""


def run_backend(disable: bool, blocks: int, repeat: int) -> dict:
    env = dict(os.environ)
    env["GEVMISS_DISABLE_NUMBA"] = "1" if disable else "0"
    code = WORKER.replace("PARAM_BLOCKS", str(blocks)).replace("PARAM_REPEAT", str(repeat))
    proc = subprocess.run(
        [sys.executable, "-c", code], env=env, capture_output=True, text=True
    )
    if proc.returncode != 0:
        sys.stderr.write(proc.stderr)
        raise SystemExit(1)
    return json.loads(proc.stdout.strip().splitlines()[-1])


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--blocks", type=int, default=100)
    parser.add_argument("--repeat", type=int, default=20)
    args = parser.parse_args()

    print(f"k={args.blocks} blocks, block size 100, {args.repeat} fit repeats per backend")
    results = []
    for disable in (False, True):
        r = run_backend(disable, args.blocks, args.repeat)
        results.append(r)
        print(
            f"  {r['backend']:>6}: weighted NLL {r['nll_us']:8.1f} us/call, "
            f"all-method fit {r['fit5_ms']:8.2f} ms/round"
        )
    fast, slow = results
    if fast["fit5_ms"] > 0:
        print(
            f"  speedup: NLL x{slow['nll_us'] / fast['nll_us']:.1f}, "
            f"fit x{slow['fit5_ms'] / fast['fit5_ms']:.1f}"
        )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
