"""Compare the pure-Python and compiled kernel backends.

Run:  python benchmarks/bench_backends.py [--repeat 5]

Both backends produce bit-identical output (a test asserts it); the only
question here is speed, so each row times the same call on the same
inputs and reports the ratio.
"""

import argparse
import time

import numpy as np

from crglimits import _pykernels
from crglimits.rng import RngStream

try:
    from crglimits import _speedups
except ImportError:
    _speedups = None

POS = RngStream(12345)._pos


def _bench(fn, args, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


CASES = [
    ("uniform_array 1e6", "uniform_array", (POS, 1_000_000)),
    ("gamma_array shape=0.5 1e5", "gamma_array", (POS, 0.5, 0.5, 100_000)),
    ("gamma_array shape=6 1e5", "gamma_array", (POS, 6.0, 0.5, 100_000)),
    ("rayleigh_array 1e6", "rayleigh_array", (POS, 1_000_000)),
    ("stick_break 2000 segments", "stick_break_engine",
     (POS, 2000, 1, [], [], [], [], [], 1, 0)),
    ("urn_engine 1e4 steps", "urn_engine", (POS, [1.0, 0.5, 2.0], 10_000)),
    ("gnp_edges n=1e5 p=1e-5", "gnp_edges_engine", (POS, 100_000, 1e-5)),
]


def _bulk_case():
    states = np.array([RngStream(7).child(f"urn-{i}")._pos
                       for i in range(200)], dtype=np.uint64)
    lengths0 = np.full((200, 3), 1.0)
    return ("urn_bulk 200x1e3 steps", "urn_bulk_engine",
            (states, lengths0, 1000))


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    opts = ap.parse_args()

    cases = CASES + [_bulk_case()]
    print(f"{'case':34s} {'pure':>10s} {'compiled':>10s} {'speedup':>8s}")
    for label, fn_name, args in cases:
        tp = _bench(getattr(_pykernels, fn_name), args, opts.repeat)
        if _speedups is None:
            print(f"{label:34s} {tp * 1e3:9.2f}ms {'n/a':>10s} {'':>8s}")
            continue
        tc = _bench(getattr(_speedups, fn_name), args, opts.repeat)
        print(f"{label:34s} {tp * 1e3:9.2f}ms {tc * 1e3:9.2f}ms "
              f"{tp / tc:7.1f}x")
    if _speedups is None:
        print("\ncompiled extension not built; showing pure backend only")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
