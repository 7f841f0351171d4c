"""Compare the gmpy2 and pure-Python rational backends.

Each workload runs in a fresh interpreter because the backend is fixed at
import time by ``NAMBULIE_PURE_PYTHON``.  Usage::

    python benchmarks/bench_backends.py [--repeat 3] [--json out.json]
"""

from __future__ import annotations

import argparse
import json
import os
import statistics
import subprocess
import sys

WORKLOADS = {
    "kernel": (
        "import random\n"
        "from nambulie.nambu import random_polynomial\n"
        "rng = random.Random(0)\n"
        "fs = [random_polynomial(rng, 4, 3) for _ in range(40)]\n"
        "for f, g in zip(fs, fs[1:]):\n"
        "    h = f * g\n"
        "    for i in (1, 2, 3, 4):\n"
        "        h.diff(i)\n"
    ),
    "solve": (
        "from nambulie.liealg import load\n"
        "from nambulie.tables import solve_algebra\n"
        "reg = load()\n"
        "for ident in ('A_4_8', '4A_1', 'A_2+2A_1', 'A0_4_9'):\n"
        "    solve_algebra(reg, ident)\n"
    ),
    "table-one": (
        "from nambulie.liealg import load\n"
        "from nambulie.tables import run_all\n"
        "run_all(load(), tables=('I',), check_errata=False)\n"
    ),
    "dynamics": (
        "from nambulie.dynamics import run_checks\n"
        "run_checks('1', '1', '1', seed=0, trials=20)\n"
    ),
}

TIMER = (
    "import time, sys\n"
    "t0 = time.perf_counter()\n"
    "exec(compile(sys.argv[1], 'workload', 'exec'))\n"
    "from nambulie.symkernel import BACKEND\n"
    "print(BACKEND, time.perf_counter() - t0)\n"
)


def run_once(code: str, pure: bool):
    env = dict(os.environ)
    env.pop("NAMBULIE_PURE_PYTHON", None)
    if pure:
        env["NAMBULIE_PURE_PYTHON"] = "1"
    out = subprocess.run([sys.executable, "-c", TIMER, code], env=env, capture_output=True, text=True, check=True)
    backend, seconds = out.stdout.split()
    return backend, float(seconds)


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--only", choices=sorted(WORKLOADS), action="append")
    p.add_argument("--json", help="write results to this path")
    args = p.parse_args(argv)

    results = []
    print(f"{'workload':<10} {'backend':<9} {'median s':>9} {'min s':>8}")
    for name in args.only or WORKLOADS:
        for pure in (False, True):
            runs = [run_once(WORKLOADS[name], pure) for _ in range(args.repeat)]
            backend = runs[0][0]
            times = [t for _, t in runs]
            results.append({"workload": name, "backend": backend, "median": statistics.median(times), "min": min(times)})
            print(f"{name:<10} {backend:<9} {statistics.median(times):>9.3f} {min(times):>8.3f}")
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump(results, fh, indent=2)
    return 0


if __name__ == "__main__":
    sys.exit(main())
