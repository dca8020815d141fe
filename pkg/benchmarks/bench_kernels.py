"""Compare the compiled kernel backend against the pure-numpy fallback.

Times batched RK4 integration on a few representative workloads and
prints steps/second for each backend plus the speedup.  Run as:

    python3 benchmarks/bench_kernels.py [--steps 2000]
"""

import argparse
import time

import numpy as np

from qldyn._kernels import pack as packmod
from qldyn._kernels import pyref
from qldyn.zoo import RandomGameSpec, random_normal_form, seeded_profiles

try:
    from qldyn._kernels import _core
except ImportError:
    _core = None


def _workloads():
    out = []
    for (N, n, B, label) in ((2, 2, 8, "2p 2x2"),
                             (3, 3, 16, "3p 3-action"),
                             (5, 5, 80, "5p 5-action sweep batch")):
        game = random_normal_form(RandomGameSpec(N=N, n=n, seed=1))
        profs = seeded_profiles(game.action_counts, B, 0)
        state = np.stack([p.flat for p in profs], axis=1)
        T = np.full((N, B), 1.0)
        out.append((label, game.pack, state, T))
    return out


def _time_backend(backend, pack, state, T, steps):
    t0 = time.perf_counter()
    out = backend.integrate_batch(pack, 0, state.copy(), T, 0.01, steps,
                                  steps, 1e-12, 1)
    dt = time.perf_counter() - t0
    return dt, out["final"]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--steps", type=int, default=2000)
    args = ap.parse_args()
    if _core is None:
        print("compiled backend unavailable; benchmarking fallback only")
    header = f"{'workload':<24} {'backend':<10} {'steps/s':>12} {'speedup':>9}"
    print(header)
    print("-" * len(header))
    for label, pack, state, T in _workloads():
        t_py, final_py = _time_backend(pyref, pack, state, T, args.steps)
        rows = [("python", t_py)]
        if _core is not None:
            t_c, final_c = _time_backend(_core, pack, state, T, args.steps)
            rows.append(("compiled", t_c))
            gap = np.abs(final_c - final_py).max()
            if gap > 1e-10:
                raise SystemExit(f"backend mismatch on {label}: {gap:.2e}")
        for name, dt in rows:
            rate = args.steps / dt
            speedup = f"{t_py / dt:8.1f}x" if name == "compiled" else "     1.0x"
            print(f"{label:<24} {name:<10} {rate:>12.0f} {speedup:>9}")


if __name__ == "__main__":
    main()
