#!/usr/bin/env python3
"""Timing comparison of the numba kernels against the pure numpy lane.

Runs the transport Euler-Maruyama / Heun paths and the diagonal linear
recursion through both code paths (`spdekit._kernels` when numba is enabled,
the per-step numpy loop in `spdekit.integrators` otherwise) and prints a
small table.  The numpy lane is exercised in-process by calling the generic
runner directly, so a single invocation covers both; results are checked to
agree bit for bit before timing.

Usage:  python benchmarks/bench_kernels.py [--modes 128] [--steps 20000]
"""

import argparse
import time

import numpy as np

from spdekit import _kernels
from spdekit.integrators import SchemeSpec, _run_fast, _run_generic, simulate
from spdekit.models import AdditiveHeat, TransportHeat
from spdekit.noise import CovarianceSpec, NoiseSampler
from spdekit.spectral import SpectralField, TorusGrid


def _setup(n_modes, n_steps, dt):
    grid = TorusGrid(n_modes)
    coef = np.zeros(n_modes + 1, dtype=np.complex128)
    coef[1:] = 0.5 / (1.0 + np.arange(1, n_modes + 1)) ** 2
    u0 = SpectralField(grid, coef)
    white = CovarianceSpec.white(grid)
    scaled = NoiseSampler(white, 2024, 0).scaled_block(0, n_steps, dt)
    return grid, u0, white, scaled


def _time(fn, repeats=3):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_case(name, model, scheme_kind, grid, u0, scaled, dt):
    n_steps = scaled.shape[0]
    scheme = SchemeSpec(scheme_kind, dt)
    spec = CovarianceSpec.white(grid) if isinstance(model, TransportHeat) else model.q

    def run_kernel():
        states = np.empty((n_steps + 1, grid.n_modes + 1), dtype=np.complex128)
        states[0] = u0.coef
        flag = _run_fast(model, scheme, states, scaled, dt)
        assert flag == -1, "kernel lane unavailable or blew up"
        return states

    def run_numpy():
        states = np.empty((n_steps + 1, grid.n_modes + 1), dtype=np.complex128)
        states[0] = u0.coef
        _run_generic(model, scheme, states, scaled, dt, spec)
        return states

    if _kernels.NUMBA_ENABLED:
        run_kernel()  # JIT warmup outside the timed region
        assert np.array_equal(run_kernel(), run_numpy()), "lanes disagree"
        t_kernel = _time(run_kernel)
    else:
        t_kernel = np.nan
    t_numpy = _time(run_numpy)
    speedup = t_numpy / t_kernel if t_kernel == t_kernel else float("nan")
    print(
        f"{name:<28s} numpy {t_numpy * 1e3:9.1f} ms   "
        f"numba {t_kernel * 1e3:9.1f} ms   speedup {speedup:5.1f}x"
    )


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--modes", type=int, default=128)
    parser.add_argument("--steps", type=int, default=20000)
    parser.add_argument("--dt", type=float, default=1e-7)
    args = parser.parse_args()

    grid, u0, white, scaled = _setup(args.modes, args.steps, args.dt)
    print(
        f"K={args.modes} modes, {args.steps} steps, numba "
        f"{'enabled' if _kernels.NUMBA_ENABLED else 'DISABLED (numpy lane only)'}"
    )
    bench_case("transport euler-maruyama", TransportHeat(grid, (1.0,)),
               "euler_maruyama", grid, u0, scaled, args.dt)
    bench_case("transport heun-stratonovich", TransportHeat(grid, (1.0,)),
               "heun_stratonovich", grid, u0, scaled, args.dt)
    bench_case("additive exact OU", AdditiveHeat(CovarianceSpec.power(grid, 1.0)),
               "exact_ou", grid, u0, scaled, args.dt)

    # end-to-end: full simulate() including draw generation and recording
    model = TransportHeat(grid, (1.0,))
    sampler = NoiseSampler(white, 7, 0)
    t0 = time.perf_counter()
    simulate(model, SchemeSpec("euler_maruyama", args.dt), u0, args.steps * args.dt,
             sampler=sampler)
    print(f"simulate() end-to-end: {(time.perf_counter() - t0) * 1e3:.1f} ms")


if __name__ == "__main__":
    main()
