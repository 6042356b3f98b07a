"""Compare the compiled and numpy kernel backends.

    python3 benchmarks/bench_kernels.py --qubits 12 16 20 --repeat 5

Prints one line per (kernel, size) with the best-of-N time of each backend
and the speedup of the compiled one. Also checks that both return the same
result before timing.
"""
import argparse
import timeit

import numpy as np

from tspqaoa import kernels


def cases(nq, rng):
    psi = rng.normal(size=1 << nq) + 1j * rng.normal(size=1 << nq)
    psi /= np.linalg.norm(psi)
    e = rng.uniform(0, 100, size=1 << nq)
    ints = rng.integers(-(1 << 20), 1 << 20, size=1 << nq)

    def in_place(op, src, *extra):
        def run(mod):
            buf = src.copy()
            getattr(mod, op)(buf, *extra)
            return buf
        return run

    return {
        "apply_phase": in_place("apply_phase", psi, e, 0.3),
        "apply_mixer": in_place("apply_mixer", psi, 0.7),
        "expectation": lambda mod: mod.expectation(psi, e),
        "zeta_int64": in_place("zeta_int64", ints),
        "walsh_int64": in_place("walsh_int64", ints),
    }


def held_karp_case(n, rng):
    xy = rng.uniform(0, 100, size=(n, 2))
    W = np.hypot(*(xy[:, None, :] - xy[None, :, :]).transpose(2, 0, 1))
    return lambda mod: mod.held_karp(W)


def best_time(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def same(a, b):
    if isinstance(a, tuple):
        return a[0] == b[0] and list(a[1]) == list(b[1])
    return np.allclose(a, b, atol=1e-9)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--qubits", type=int, nargs="+", default=[12, 16, 20])
    ap.add_argument("--cities", type=int, nargs="+", default=[10, 14])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    if "cython" not in kernels.available_backends():
        raise SystemExit("compiled kernels are not built; nothing to compare")
    core, py = kernels.get_backend("cython"), kernels.get_backend("numpy")
    rng = np.random.default_rng(args.seed)

    jobs = []
    for nq in args.qubits:
        for name, fn in cases(nq, rng).items():
            jobs.append((name, f"2^{nq}", fn))
    for n in args.cities:
        jobs.append(("held_karp", f"n={n}", held_karp_case(n, rng)))

    print(f"{'kernel':<12} {'size':>6} {'cython s':>10} {'numpy s':>10} {'speedup':>8}")
    for name, size, fn in jobs:
        if not same(fn(core), fn(py)):
            raise SystemExit(f"{name} {size}: backends disagree")
        tc = best_time(lambda: fn(core), args.repeat)
        tp = best_time(lambda: fn(py), args.repeat)
        print(f"{name:<12} {size:>6} {tc:10.5f} {tp:10.5f} {tp / tc:8.2f}")


if __name__ == "__main__":
    main()
