"""Timing comparison of the compiled kernel against the numpy fallback.

Runs the two hot primitives (batched matrix exponential and the RKMK4
right-form scan) on a reduction-sized workload and prints a small table.

    python3 benchmarks/bench_kernels.py [--rows N] [--nodes N] [--repeat K]
"""
import argparse
import time

import numpy as np

from pathtrans._kernels import pure

try:
    from pathtrans._kernels import _core
except ImportError:
    _core = None


def _skew_batch(rng, shape, scale=0.4):
    c = rng.normal(size=shape + (3,)) * scale
    out = np.zeros(shape + (3, 3))
    out[..., 0, 1], out[..., 1, 0] = -c[..., 2], c[..., 2]
    out[..., 0, 2], out[..., 2, 0] = c[..., 1], -c[..., 1]
    out[..., 1, 2], out[..., 2, 1] = -c[..., 0], c[..., 0]
    return out


def _time(fn, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--rows", type=int, default=401)
    ap.add_argument("--nodes", type=int, default=401)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    rows, nodes = args.rows, args.nodes
    xi_nodes = _skew_batch(rng, (rows, nodes + 1))
    xi_mids = _skew_batch(rng, (rows, nodes))
    y0 = np.broadcast_to(np.eye(3), (rows, 3, 3)).copy()
    dt = 1.0 / nodes
    flat = xi_nodes.reshape(-1, 3, 3)

    print("workload: %d rows x %d nodes, so(3)" % (rows, nodes))
    print("%-12s %-10s %-12s %-12s %s" % ("primitive", "impl", "best (s)",
                                          "per call", "speedup"))

    t_pure_e, ref_e = _time(lambda: pure.expm(flat), args.repeat)
    print("%-12s %-10s %-12.4f %-12.3e %s"
          % ("expm", "pure", t_pure_e, t_pure_e / flat.shape[0], ""))
    if _core is not None:
        t_c_e, got_e = _time(lambda: _core.expm(flat), args.repeat)
        err = np.max(np.abs(got_e - ref_e))
        print("%-12s %-10s %-12.4f %-12.3e %.1fx (max dev %.1e)"
              % ("expm", "cython", t_c_e, t_c_e / flat.shape[0],
                 t_pure_e / t_c_e, err))

    t_pure_s, ref_s = _time(
        lambda: pure.rkmk4_scan(xi_nodes, xi_mids, dt, y0), args.repeat)
    print("%-12s %-10s %-12.4f %-12.3e %s"
          % ("rkmk4_scan", "pure", t_pure_s, t_pure_s / rows, ""))
    if _core is not None:
        flat_y = y0.reshape(-1, 3, 3)
        t_c_s, got_s = _time(
            lambda: _core.rkmk4_scan(xi_nodes.reshape(rows, -1, 3, 3),
                                     xi_mids.reshape(rows, -1, 3, 3),
                                     dt, flat_y), args.repeat)
        err = np.max(np.abs(got_s.reshape(ref_s.shape) - ref_s))
        print("%-12s %-10s %-12.4f %-12.3e %.1fx (max dev %.1e)"
              % ("rkmk4_scan", "cython", t_c_s, t_c_s / rows,
                 t_pure_s / t_c_s, err))
    if _core is None:
        print("compiled kernel not built; only the fallback was timed")


if __name__ == "__main__":
    main()
