"""Compiled vs pure-Python stencil core on the operator workloads.

    python3 benchmarks/bench_core.py [--resolution 128] [--repeat 3]

Times ``binned_stencil_sums`` directly, then a full Riesz-potential field,
with each backend, and checks that both backends return the same numbers.
"""

import argparse
import time

import numpy as np

from homfrac import _backend, _core_py
from homfrac.funcspace import Box, sample
from homfrac.operators import (OperatorParams, _integral_stencil, frac_integral_field,
                               lattice_points)


def _best(fn, repeat):
    best = np.inf
    out = None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--resolution", type=int, default=128)
    ap.add_argument("--stride", type=int, default=4)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--points", type=int, default=64,
                    help="lattice points for the pure-Python timing (it is slow)")
    args = ap.parse_args(argv)

    compiled = None if _backend.BACKEND != "cython" else _backend._impl
    box = Box.cube(2, 2.0, args.resolution)
    f = sample("bump_sum", box, seed=1)
    params = OperatorParams(0.5)
    W, bins, _ = _integral_stencil(box, params)
    W = W[None]
    idx = lattice_points(box, args.stride)[: args.points]
    nb = params.shell_count + 1

    print(f"resolution {args.resolution}, {len(idx)} points, stencil {W.shape[1:]}")
    rows = []
    t_py, r_py = _best(lambda: _backend.binned_stencil_sums(W, bins, f.values, idx, nb,
                                                            impl=_core_py), args.repeat)
    rows.append(("python", t_py))
    if compiled is not None:
        t_cy, r_cy = _best(lambda: _backend.binned_stencil_sums(W, bins, f.values, idx, nb,
                                                                impl=compiled), args.repeat)
        rows.append(("cython", t_cy))
        err = float(np.max(np.abs(r_cy - r_py)) / max(np.max(np.abs(r_py)), 1e-300))
    else:
        err = None
    for name, t in rows:
        print(f"  {name:7s} {t * 1e3:10.2f} ms  ({t / len(idx) * 1e6:8.1f} us/point)")
    if compiled is not None:
        print(f"  speedup {t_py / rows[1][1]:.1f}x, max relative difference {err:.2e}")
    else:
        print("  compiled core not built; only the fallback was timed")

    # whole field at a small size, swapping the selected implementation
    small = Box.cube(2, 2.0, 64)
    g = sample("bump_sum", small, seed=1)
    saved = _backend._impl
    fields = {}
    print("Riesz field, resolution 64, stride 4")
    try:
        for name, impl in (("python", _core_py), ("cython", compiled)):
            if impl is None:
                continue
            _backend._impl = impl
            t, F = _best(lambda: frac_integral_field(g, OperatorParams(0.5), 4), args.repeat)
            fields[name] = F.values
            print(f"  {name:7s} {t * 1e3:10.2f} ms")
    finally:
        _backend._impl = saved
    if len(fields) == 2:
        print(f"  fields agree: {np.array_equal(fields['python'], fields['cython'])}")


if __name__ == "__main__":
    main()
