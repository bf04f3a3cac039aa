"""Time the numba kernels against the numpy fallback on representative workloads.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--json out.json]

Each workload is run once per backend to warm up (numba compiles on first
call), then timed ``--repeat`` times; the best time is reported.  Both
backends must agree to 1e-9 relative, otherwise the script exits nonzero.
"""

import argparse
import json
import sys
import time

import numpy as np

from cremerlab import _kernels
from cremerlab.dynsim.flow import ST_FIELD
from cremerlab.dynsim.poly import PolyMap, PolyVectorField
from cremerlab.perk.explore import ring_seeds


def _workloads():
    henon = PolyMap.parse("y, -0.3*x + 1.2 - y^2 + 0.1*x*y^3").arrays
    neg = PolyMap.parse("-x, -x - y").arrays
    field = PolyVectorField.parse(ST_FIELD).arrays
    pts = np.random.default_rng(0).normal(size=(20000, 2)) * 0.5 + 0j
    seeds = ring_seeds(2, 1.0, rings=3, grid=16)
    lam = np.exp(2j * np.pi * (np.sqrt(5) - 1) / 2)
    xs = np.exp(2j * np.pi * np.linspace(0, 1, 4000, endpoint=False))
    return {
        "frac_dist_scan(1e6)": lambda k: k.frac_dist_scan((np.sqrt(5) - 1) / 2, 10**6),
        "poly_eval_jac(20000 pts)": lambda k: k.poly_eval_jac(henon.coef, henon.exps, henon.comp, henon.dim, pts),
        "newton_batch(769 seeds, k=2)": lambda k: k.newton_batch(neg.coef, neg.exps, neg.comp, neg.dim, seeds,
                                                                 2, 60, 1e-20, 1e-12, 1e12),
        "taylor_flow(order 16, 1024 steps)": lambda k: k.taylor_flow(field.coef, field.exps, field.comp, field.dim,
                                                                     np.array([0.2, 0.2], dtype=np.complex128),
                                                                     1.0 + 0j, 16, 1024),
        "toy_exit(4000 pts)": lambda k: k.toy_exit(lam, np.array([0.25, 1e-3], dtype=np.complex128),
                                                   np.array([2, 4], dtype=np.int64), xs, np.zeros_like(xs),
                                                   0j, 0.4, 2000),
    }


def _flat(out):
    if isinstance(out, tuple) and len(out) == 4:
        # newton_batch: status and iteration counts depend on roundoff once the
        # residual reaches machine precision, so only points and residuals are compared
        out = out[:3:2]
    if isinstance(out, tuple):
        return np.concatenate([np.ravel(np.asarray(o, dtype=np.complex128)) for o in out])
    return np.ravel(np.asarray(out, dtype=np.complex128))


def _best(fn, mod, repeat):
    out = fn(mod)
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(mod)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--json", help="also write the table as JSON")
    args = ap.parse_args(argv)
    try:
        nb = _kernels._load("numba")
    except ImportError:
        print("numba is not importable; nothing to compare")
        return 1
    npk = _kernels._load("numpy")
    rows, ok = [], True
    print(f"{'workload':36s} {'numpy [s]':>11s} {'numba [s]':>11s} {'speedup':>8s}  agree")
    for name, fn in _workloads().items():
        t_np, o_np = _best(fn, npk, args.repeat)
        t_nb, o_nb = _best(fn, nb, args.repeat)
        a, b = _flat(o_np), _flat(o_nb)
        fin = np.isfinite(a) & np.isfinite(b)
        agree = bool(np.array_equal(np.isfinite(a), np.isfinite(b))) and bool(
            np.all(np.abs(a[fin] - b[fin]) <= 1e-9 * np.maximum(1.0, np.abs(a[fin]))))
        ok &= agree
        rows.append({"workload": name, "numpy_s": t_np, "numba_s": t_nb, "speedup": t_np / t_nb, "agree": agree})
        print(f"{name:36s} {t_np:11.5f} {t_nb:11.5f} {t_np / t_nb:8.1f}  {'yes' if agree else 'NO'}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2)
    return 0 if ok else 2


if __name__ == "__main__":
    sys.exit(main())
