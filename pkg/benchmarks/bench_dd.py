"""Compare the compiled and pure-Python double-description kernels.

    python benchmarks/bench_dd.py [--repeat 3] [--full]

``--full`` adds the 3-party no-signaling cone, which takes minutes on the
compiled kernel and far longer on the Python one.
"""
import argparse
import random
import statistics
import time

from bellcone import kernels
from bellcone.cone import ConeHRep, dual_vrep_to_hrep, enumerate_rays
from bellcone.scenario import bell_cone, ns_cone


def instances(full):
    rng = random.Random(11)
    yield "NS_2 rays", ns_cone(2)
    yield "B_2 facets", dual_vrep_to_hrep(bell_cone(2))
    for k in (34, 38, 42, 46):
        rows = rng.sample(list(ns_cone(3).facet_functionals), k)
        yield f"NS_3 slice ({k} rows)", ConeHRep(27, rows)
    if full:
        yield "NS_3 rays", ns_cone(3)


def timed(cone, backend, repeat):
    times, out = [], None
    for _ in range(repeat):
        start = time.perf_counter()
        out = enumerate_rays(cone, backend=backend)
        times.append(time.perf_counter() - start)
    return statistics.median(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--full", action="store_true")
    a = ap.parse_args()
    if kernels.BACKEND != "compiled":
        print("compiled kernel unavailable; only the Python backend is timed")
    print(f"{'instance':24s} {'rays':>6s} {'compiled':>10s} {'python':>10s} {'speedup':>8s}")
    for name, cone in instances(a.full):
        py_t, py_out = timed(cone, "python", 1 if a.full and "rays" in name else a.repeat)
        if kernels.BACKEND == "compiled":
            c_t, c_out = timed(cone, "compiled", a.repeat)
            assert set(c_out.generators) == set(py_out.generators), name
            print(f"{name:24s} {len(py_out):6d} {c_t:9.3f}s {py_t:9.3f}s {py_t / c_t:7.1f}x")
        else:
            print(f"{name:24s} {len(py_out):6d} {'-':>10s} {py_t:9.3f}s {'-':>8s}")


if __name__ == "__main__":
    main()
