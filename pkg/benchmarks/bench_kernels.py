"""Time the numba and numpy kernel backends on the same inputs.

    python3 benchmarks/bench_kernels.py [--repeat N] [--json]

Each kernel is run once untimed per backend (so JIT compilation is excluded)
and then timed ``--repeat`` times; the best time is reported. Results of the
two backends are compared for equality before timing.
"""
from __future__ import annotations

import argparse
import json
import platform
import time

import numpy as np

from dessins import kernels
from dessins.autgroup import automorphism_arrays
from dessins.group_core import Family, GroupSpec


def workloads(spec: GroupSpec):
    A, B, C, qpow = spec.params
    n = spec.order
    table = kernels.get_backend("numpy").cayley_table(A, B, C, qpow)
    orders = kernels.get_backend("numpy").element_orders(table)
    auts = automorphism_arrays(spec)
    perm = table[:, 1 % n]  # right multiplication by a
    rng = np.random.default_rng(1)
    i, j = rng.integers(0, B, 10**6), rng.integers(0, A, 10**6)
    yield "mul (10^6)", lambda K: K.mul(i, j, j % B, i % A, A, B, C, qpow)
    yield "power (10^6, m=1000)", lambda K: K.power(i, j, 1000, A, B, C, qpow)
    yield "cayley_table", lambda K: K.cayley_table(A, B, C, qpow)
    yield "element_orders", lambda K: K.element_orders(table)
    yield "pair_oracle_matrix", lambda K: K.pair_oracle_matrix(table, orders, spec.p**spec.d, spec.p**spec.e)
    if n <= 243:
        yield "aut_oracle_matrix", lambda K: K.aut_oracle_matrix(table, A, B, C, spec.q)
    yield f"apply_automorphisms ({len(auts[0])})", lambda K: K.apply_automorphisms(1, 1, *auts, A, B, C, qpow)
    yield "cycle_labels", lambda K: K.cycle_labels(perm)


def same(x, y) -> bool:
    if isinstance(x, tuple):
        return all(np.array_equal(a, b) for a, b in zip(x, y))
    return np.array_equal(x, y)


def best_of(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main(argv=None) -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--json", action="store_true", help="machine-readable output")
    args = parser.parse_args(argv)
    backends = {name: kernels.get_backend(name) for name in ("numba", "numpy")}
    specs = [GroupSpec(Family.M1, 3, 2, 3, 1), GroupSpec(Family.M3, 3, 2, 4, 1, 3)]
    rows = []
    for spec in specs:
        for name, job in workloads(spec):
            outs = {b: job(K) for b, K in backends.items()}  # warm-up, also compiles
            if not same(outs["numba"], outs["numpy"]):
                raise SystemExit(f"backends disagree on {name} for {spec}")
            t = {b: best_of(lambda K=K: job(K), args.repeat) for b, K in backends.items()}
            rows.append({"group": spec.label, "order": spec.order, "kernel": name,
                         "numba_s": t["numba"], "numpy_s": t["numpy"],
                         "speedup": t["numpy"] / t["numba"] if t["numba"] else float("inf")})
    if args.json:
        print(json.dumps({"python": platform.python_version(), "rows": rows}, indent=2))
        return
    print(f"{'group':<12} {'order':>5}  {'kernel':<28} {'numba s':>9} {'numpy s':>9} {'x':>7}")
    for r in rows:
        print(f"{r['group']:<12} {r['order']:>5}  {r['kernel']:<28} {r['numba_s']:>9.4f} "
              f"{r['numpy_s']:>9.4f} {r['speedup']:>7.1f}")


if __name__ == "__main__":
    main()
