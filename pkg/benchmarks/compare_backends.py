"""Timing comparison of the jitted kernels against their plain-numpy twins.

Both backends live in one process: ``cptwell.kernels`` exposes the compiled
functions under their usual names and keeps the uncompiled versions reachable
as ``*_py``, so no subprocess or environment juggling is needed.  Each kernel
is warmed up first (compilation happens on the first jitted call), then timed
over several repeats; the table reports the best wall time per backend, the
speedup, and the worst disagreement between the two results.

Run with CPTWELL_DISABLE_NUMBA=1 to check the fallback wiring; both columns
then time the very same plain function and the speedup hovers around 1.
"""

import time

import numpy as np

from cptwell import kernels
from cptwell.hamiltonian import build, symmetrize
from cptwell.spectra import _general_guesses


def best_time(fn, args, repeats):
    best = float("inf")
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def disagreement(a, b):
    if isinstance(a, tuple):
        return max(disagreement(x, y) for x, y in zip(a, b))
    a = np.asarray(a)
    b = np.asarray(b)
    if a.dtype == bool:
        return float(np.max(a ^ b, initial=0))
    return float(np.max(np.abs(a - b)))


def sturm_case(n=4000, lam=0.5, shifts=257):
    s = symmetrize(build(n, (lam, lam)))
    so2 = s.s_off * s.s_off
    lo, hi = s.gershgorin_bounds()
    grid = np.linspace(lo, hi, shifts)
    tiny = 2.3e-290 * max(1.0, float(so2.max()))
    return (np.ascontiguousarray(s.s_diag), np.ascontiguousarray(so2), grid, tiny)


def bisect_case(n=1200, lam=0.3):
    s = symmetrize(build(n, (lam, lam)))
    so2 = s.s_off * s.s_off
    lo, hi = s.gershgorin_bounds()
    span = max(hi - lo, 1.0)
    tiny = 2.3e-290 * max(1.0, float(so2.max()))
    return (
        np.ascontiguousarray(s.s_diag),
        np.ascontiguousarray(so2),
        lo - 1e-12 * span,
        hi + 1e-12 * span,
        62,
        tiny,
    )


def solve_case(n=200_000, lam=0.7):
    s = symmetrize(build(n, (lam, lam)))
    rhs = np.random.default_rng(20230817).standard_normal(n)
    return (
        np.ascontiguousarray(s.s_diag),
        np.ascontiguousarray(s.s_off),
        1.9,
        rhs,
        2.3e-290,
    )


def charpoly_case(n=20_000, lam=0.4):
    h = build(n, (lam, lam))
    return (
        np.ascontiguousarray(h.diag),
        np.ascontiguousarray(h.bonds),
        3.7 + 0.2j,
    )


def newton_case(n=48, lam=1.01):
    h = build(n, (lam, lam))
    rad = h.gershgorin_radius()
    return (
        np.ascontiguousarray(h.diag),
        np.ascontiguousarray(h.bonds),
        _general_guesses(h),
        -rad,
        rad,
        rad,
        120,
        30,
        20230817,
    )


CASES = [
    ("sturm_count", sturm_case(), 20),
    ("bisect_spectrum", bisect_case(), 5),
    ("tridiag_solve_shifted", solve_case(), 5),
    ("charpoly_terms", charpoly_case(), 20),
    ("newton_roots", newton_case(), 5),
]


def main():
    if kernels.HAS_NUMBA:
        print("Backend: numba (plain-numpy twins timed via the *_py handles)")
    else:
        print("Backend: plain numpy only; both columns time the same function")
    print("Warming up (first jitted call compiles)...")
    for name, args, _ in CASES:
        getattr(kernels, name)(*args)
        getattr(kernels, name + "_py")(*args)

    header = f"{'kernel':<24}{'workload':<16}{'jit':>12}{'python':>12}{'speedup':>10}{'max diff':>12}"
    print()
    print(header)
    print("-" * len(header))
    for name, args, repeats in CASES:
        n = len(args[0])
        t_jit, out_jit = best_time(getattr(kernels, name), args, repeats)
        t_py, out_py = best_time(getattr(kernels, name + "_py"), args, repeats)
        diff = disagreement(out_jit, out_py)
        print(
            f"{name:<24}{'n=' + str(n):<16}{t_jit * 1e3:>10.3f}ms{t_py * 1e3:>10.3f}ms"
            f"{t_py / t_jit:>9.1f}x{diff:>12.2e}"
        )


if __name__ == "__main__":
    main()
