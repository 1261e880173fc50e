"""Compiled vs numpy Hough kernels on real edge maps.

    python3 benchmarks/bench_kernels.py [--scales 4,8,16] [--repeat 3]

Times voting, peak search and member extraction on binary edge maps of
the canonical wall, checks both backends agree, and prints a table.
"""

import argparse
import math
import time

import numpy as np

from cafewall import _fallback
from cafewall.dogfilter import build_edge_map_stack
from cafewall.hough import HoughParams, default_nhood
from cafewall.stimulus import CANONICAL, generate

try:
    from cafewall import _core
except ImportError:
    _core = None


def _best(fn, repeat):
    out, best = None, math.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return out, best


def bench_map(binary, kernels, repeat):
    ys, xs = np.nonzero(binary)
    xs, ys = xs.astype(np.intc), ys.astype(np.intc)
    th = np.deg2rad(-90.0 + np.arange(180))
    c, s = np.cos(th), np.sin(th)
    h, w = binary.shape
    q = math.ceil(math.hypot(h - 1, w - 1))
    acc, t_vote = _best(lambda: np.asarray(kernels.hough_vote(xs, ys, c, s, 1.0, q)), repeat)
    nh = default_nhood(acc.shape)
    p = HoughParams()
    peaks, t_peaks = _best(
        lambda: kernels.hough_peaks(acc, p.num_peaks, p.threshold_frac * acc.max(), nh[0], nh[1]), repeat
    )
    by_theta = {}
    for r, t in peaks:
        by_theta.setdefault(t, []).append(float(r - q))

    def members():
        return [
            kernels.line_members_batch(xs, ys, c[t], s[t], np.array(rs), p.rho_tolerance)
            for t, rs in sorted(by_theta.items())
        ]

    mem, t_members = _best(members, repeat)
    return (acc, peaks, mem), (t_vote, t_peaks, t_members)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--scales", default="4,8,16")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if _core is None:
        raise SystemExit("compiled kernels are not built; run: pip install -e . --no-build-isolation")
    scales = [float(x) for x in args.scales.split(",")]
    stack = build_edge_map_stack(generate(CANONICAL), scales)
    print(f"{'scale':>5} {'pixels':>8} {'stage':<8} {'numpy s':>9} {'compiled s':>11} {'speedup':>8}")
    totals = np.zeros(2)
    for e in stack:
        ref, t_py = bench_map(e.binary, _fallback, args.repeat)
        got, t_c = bench_map(e.binary, _core, args.repeat)
        np.testing.assert_array_equal(ref[0], got[0])
        assert ref[1] == got[1]
        for a, b in zip(ref[2], got[2]):
            for u, v in zip(a, b):
                np.testing.assert_array_equal(u, v)
        for stage, tp, tc in zip(("vote", "peaks", "members"), t_py, t_c):
            print(f"{e.sigma_c:>5g} {int(e.binary.sum()):>8} {stage:<8} {tp:>9.3f} {tc:>11.3f} {tp / tc:>7.1f}x")
        totals += [sum(t_py), sum(t_c)]
    print(f"total: numpy {totals[0]:.3f}s, compiled {totals[1]:.3f}s, speedup {totals[0] / totals[1]:.1f}x")


if __name__ == "__main__":
    main()
