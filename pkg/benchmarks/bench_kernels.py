#!/usr/bin/env python3
"""Benchmark: compiled jet kernels vs the pure-Python fallback.

Runs itself twice in subprocesses (backend selection happens at import
time, controlled by TAILKIT_PURE_PYTHON) and prints a comparison table:
raw coefficient kernels at order 8 and an end-to-end classification of
a depth-4 Gaussian iterate chain.

Usage: python benchmarks/bench_kernels.py
"""

import json
import os
import subprocess
import sys
import time


def _bench_current_backend() -> dict:
    import tailkit
    from tailkit import _kernels_py
    from tailkit import dist, engine
    from tailkit.jet import Jet

    if os.environ.get("TAILKIT_PURE_PYTHON"):
        kern = _kernels_py
    else:
        from tailkit import jet as jet_mod

        kern = sys.modules[jet_mod._k.__name__]

    a = tuple(0.3 * i + 0.7 for i in range(9))
    b = tuple(0.1 * i + 1.1 for i in range(9))
    out = {"backend": tailkit.KERNEL_BACKEND}

    reps = 200_000
    for name, fn in (("mul", lambda: kern.mul(a, b)),
                     ("div", lambda: kern.div(a, b)),
                     ("exp", lambda: kern.exp(a)),
                     ("ln", lambda: kern.ln(b))):
        t0 = time.perf_counter()
        for _ in range(reps):
            fn()
        out[name + "_us"] = (time.perf_counter() - t0) / reps * 1e6

    g = dist.make_gaussian(-1.7, 1.9)
    chain = [engine.make_seed(g, engine.SeedKind.PDF, engine.TailSide.RIGHT)]
    for _ in range(4):
        chain.append(engine.iterate(chain[-1]))
    t0 = time.perf_counter()
    engine.classify(chain[4], (1.0, 30.0), engine.GridSpec(256))
    out["classify_p4_s"] = time.perf_counter() - t0
    return out


def main():
    if os.environ.get("_TAILKIT_BENCH_CHILD"):
        print(json.dumps(_bench_current_backend()))
        return

    rows = []
    for pure in ("", "1"):
        env = dict(os.environ, _TAILKIT_BENCH_CHILD="1")
        if pure:
            env["TAILKIT_PURE_PYTHON"] = pure
        else:
            env.pop("TAILKIT_PURE_PYTHON", None)
        res = subprocess.run(
            [sys.executable, os.path.abspath(__file__)], env=env, capture_output=True, text=True, check=True
        )
        rows.append(json.loads(res.stdout.strip().splitlines()[-1]))

    keys = ["mul_us", "div_us", "exp_us", "ln_us", "classify_p4_s"]
    header = f"{'metric':>16s}" + "".join(f"{r['backend']:>14s}" for r in rows) + f"{'speedup':>10s}"
    print(header)
    print("-" * len(header))
    for k in keys:
        vals = [r[k] for r in rows]
        unit = "us" if k.endswith("_us") else "s"
        speed = vals[1] / vals[0] if vals[0] else float("nan")
        print(f"{k:>16s}" + "".join(f"{v:>12.3f}{unit}" for v in vals) + f"{speed:>9.1f}x")


if __name__ == "__main__":
    main()
