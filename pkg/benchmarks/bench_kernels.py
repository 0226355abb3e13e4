#!/usr/bin/env python3
"""Benchmark the hot kernels: numba JIT path versus pure-NumPy fallback.

Both implementations are imported directly from pdmcausal.kernels, so the
comparison is independent of the PDMCAUSAL_BACKEND selection (if numba is
unavailable the "jit" column degenerates to the plain Python loops).

Run:  python3 benchmarks/bench_kernels.py
"""

import time

import numpy as np

from pdmcausal import kernels
from pdmcausal.backend import NUMBA_ENABLED
from pdmcausal.channels import mediated_partial_swap_cj, polarized_plus_state
from pdmcausal.extraction import _constraint_system
from pdmcausal.pdm import pdm_closed_form
from pdmcausal.tensor import pauli_stack, qubit_layout, _flat_offsets, _strides


def timeit(fn, *args, reps=50):
    fn(*args)  # warm up (triggers JIT compilation on the numba side)
    t0 = time.perf_counter()
    for _ in range(reps):
        fn(*args)
    return (time.perf_counter() - t0) / reps


def main():
    rng = np.random.default_rng(0)
    rows = []

    # channel application, 2 qubits
    m = np.ascontiguousarray(mediated_partial_swap_cj(0.7).mat)
    big = np.kron(m, m)
    x = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    x = np.ascontiguousarray(x + x.conj().T)
    rows.append(("apply_cj (d=4)",
                 timeit(kernels.apply_cj_np, big, x, 4, 4, reps=2000),
                 timeit(kernels.apply_cj_jit, big, x, 4, 4, reps=2000)))

    # correlator grids
    from pdmcausal.channels import cj_from_unitary, partial_swap

    cj_1q = np.ascontiguousarray(mediated_partial_swap_cj(0.7).mat)
    cj_2q = np.ascontiguousarray(cj_from_unitary(partial_swap(0.7)).mat)
    for n, mcj in ((1, cj_1q), (2, cj_2q)):
        d = 2**n
        rho = np.ascontiguousarray(np.eye(d, dtype=complex) / d)
        stack = pauli_stack(n)
        reps = 200 if n == 1 else 20
        rows.append((f"correlator_grid (n={n})",
                     timeit(kernels.correlator_grid_np, rho, mcj, stack, stack, reps=reps),
                     timeit(kernels.correlator_grid_jit, rho, mcj, stack, stack, reps=reps)))

    # partial trace, keep 3 of 6 qubits
    layout = qubit_layout(6)
    strides = _strides(layout.dims)
    kept = _flat_offsets(layout.dims, strides, [0, 2, 4])
    traced = _flat_offsets(layout.dims, strides, [1, 3, 5])
    h = rng.normal(size=(64, 64)) + 1j * rng.normal(size=(64, 64))
    h = np.ascontiguousarray(h + h.conj().T)
    rows.append(("partial trace (6->3 qubits)",
                 timeit(kernels.ptrace_indexed_np, h, kept, traced, reps=500),
                 timeit(kernels.ptrace_indexed_jit, h, kept, traced, reps=500)))

    # Douglas-Rachford trace-norm solve (the rank-deficient extraction)
    r = pdm_closed_form(polarized_plus_state(1.0), mediated_partial_swap_cj(3 * np.pi / 8))
    from pdmcausal.pdm import marginal_mat

    basis, a, b = _constraint_system(r, marginal_mat(r, "t1"))
    a_pinv = np.linalg.pinv(a, rcond=1e-12)
    shift = a_pinv @ b
    proj = np.eye(a.shape[1]) - a_pinv @ a
    rows.append(("dr_trace_norm_min (d=2, to 1e-12)",
                 timeit(kernels.dr_trace_norm_min_np, basis, proj, shift, 0.5, 200000, 1e-12, reps=5),
                 timeit(kernels.dr_trace_norm_min_jit, basis, proj, shift, 0.5, 200000, 1e-12, reps=5)))

    if not NUMBA_ENABLED:
        print("note: numba unavailable or disabled; 'jit' column runs the plain loops\n")
    width = max(len(r[0]) for r in rows)
    print(f"{'kernel':<{width}}  {'numpy':>12}  {'numba':>12}  {'speedup':>8}")
    for name, t_np, t_jit in rows:
        print(f"{name:<{width}}  {t_np * 1e6:>10.1f}us  {t_jit * 1e6:>10.1f}us  {t_np / t_jit:>7.1f}x")


if __name__ == "__main__":
    main()
