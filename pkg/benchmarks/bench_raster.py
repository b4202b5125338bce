"""Benchmark the rasterised triangle-count kernel: numba @njit vs the pure
numpy fallback, on the triangle batch the oracle actually rasterises.

Run:  python3 benchmarks/bench_raster.py [--resolution N] [--repeat K]
"""

import argparse
import time
from fractions import Fraction

from floerloops import _kernels
from floerloops.cylinder import CylinderGeometry, chord, mu_polygons


def triangle_batch(winding_bound=3):
    g = CylinderGeometry(Fraction(1), (Fraction(0), Fraction(1, 3), Fraction(3, 4)))
    out = []
    n = g.nfibers()
    for a in range(n):
        for b in range(n):
            for c_idx in range(n):
                for w1 in range(-winding_bound, winding_bound + 1):
                    for w2 in range(-winding_bound, winding_bound + 1):
                        (poly,) = mu_polygons(g, (chord(g, a, b, w1), chord(g, b, c_idx, w2)))
                        if poly.degenerate:
                            continue
                        (p0, p1, p2) = poly.vertices
                        out.append(tuple(float(v) for pt in (p0, p1, p2) for v in pt))
    return out


def run(fn, batch, resolution, repeat):
    best = float("inf")
    checksum = 0
    for _ in range(repeat):
        t0 = time.perf_counter()
        checksum = 0
        for tri in batch:
            checksum += fn(*tri, resolution, resolution)
        best = min(best, time.perf_counter() - t0)
    return best, checksum


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--resolution", type=int, default=256)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    batch = triangle_batch()
    print(f"batch: {len(batch)} triangles at {args.resolution}x{args.resolution}, "
          f"best of {args.repeat}")

    results = {}
    numpy_time, numpy_sum = run(
        _kernels.numpy_triangle_grid_count, batch, args.resolution, args.repeat
    )
    results["numpy"] = numpy_time
    print(f"numpy : {numpy_time:8.3f}s  (checksum {numpy_sum})")

    if _kernels._numba_triangle_grid_count is not None:
        kernel = _kernels._numba_triangle_grid_count
        kernel(0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 4, 4)  # compile outside timing
        numba_time, numba_sum = run(kernel, batch, args.resolution, args.repeat)
        results["numba"] = numba_time
        print(f"numba : {numba_time:8.3f}s  (checksum {numba_sum})")
        if numba_sum != numpy_sum:
            raise SystemExit("backend checksums disagree")
        print(f"speedup: {numpy_time / numba_time:.2f}x")
    else:
        print("numba : unavailable (FLOERLOOPS_BACKEND or missing install)")


if __name__ == "__main__":
    main()
