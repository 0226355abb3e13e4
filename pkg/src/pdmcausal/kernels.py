"""Hot numeric kernels, each with a NumPy reference and a numba twin.

Every kernel exists twice: ``*_np`` is the vectorized NumPy implementation
and ``*_jit`` the loop-level numba version compiled from the same module.
The public names (``apply_cj``, ``ptrace_indexed``, ``correlator_grid``,
``dr_trace_norm_min``) bind to one of the two according to
:mod:`pdmcausal.backend`.

All kernels operate on plain complex128 / float64 / int64 arrays so that
they stay compilable; shape and Hermiticity validation happens in the
calling modules.
"""

import numpy as np

from .backend import NUMBA_ENABLED, njit

# ---------------------------------------------------------------------------
# CJ-matrix application: out = Tr_in[(x (x) I) m]
# ---------------------------------------------------------------------------


def apply_cj_np(m, x, d_in, d_out):
    """Apply a channel given by its CJ matrix ``m`` to the operator ``x``."""
    m4 = m.reshape(d_in, d_out, d_in, d_out)
    return np.einsum("ij,jaib->ab", x, m4)


@njit(cache=True)
def apply_cj_jit(m, x, d_in, d_out):
    m4 = m.reshape(d_in, d_out, d_in, d_out)
    out = np.zeros((d_out, d_out), dtype=np.complex128)
    for i in range(d_in):
        for j in range(d_in):
            xij = x[i, j]
            if xij != 0:
                for a in range(d_out):
                    for b in range(d_out):
                        out[a, b] += xij * m4[j, a, i, b]
    return out


# ---------------------------------------------------------------------------
# Partial trace via precomputed flat offsets
# ---------------------------------------------------------------------------


def ptrace_indexed_np(m, kept, traced):
    """Partial trace with precomputed flat offsets.

    ``kept[a] + traced[t]`` enumerates the flat row index of the kept
    configuration ``a`` paired with the traced configuration ``t``.
    """
    rows = (kept[:, None] + traced[None, :]).ravel()
    view = m[np.ix_(rows, rows)].reshape(kept.size, traced.size, kept.size, traced.size)
    return np.einsum("atbt->ab", view)


@njit(cache=True)
def ptrace_indexed_jit(m, kept, traced):
    nk = kept.size
    nt = traced.size
    out = np.zeros((nk, nk), dtype=np.complex128)
    for a in range(nk):
        for b in range(nk):
            acc = 0.0 + 0.0j
            for t in range(nt):
                acc += m[kept[a] + traced[t], kept[b] + traced[t]]
            out[a, b] = acc
    return out


# ---------------------------------------------------------------------------
# Two-time correlator grid from coarse-grained sequential measurement
# ---------------------------------------------------------------------------


def correlator_grid_np(rho, mcj, p1s, p2s):
    """All two-time correlators for the Pauli stacks ``p1s`` and ``p2s``.

    For each pair the first observable is measured by collapsing onto its
    +/-1 eigenspace projectors, the channel ``mcj`` is applied to each
    branch, and the second observable is read out on the result.
    """
    d = rho.shape[0]
    eye = np.eye(d, dtype=np.complex128)
    out = np.zeros((p1s.shape[0], p2s.shape[0]))
    for i in range(p1s.shape[0]):
        branch = np.zeros((d, d), dtype=np.complex128)
        for sign in (1.0, -1.0):
            proj = 0.5 * (eye + sign * p1s[i])
            branch = branch + sign * apply_cj_np(mcj, proj @ rho @ proj, d, d)
        for j in range(p2s.shape[0]):
            out[i, j] = np.trace(p2s[j] @ branch).real
    return out


@njit(cache=True)
def correlator_grid_jit(rho, mcj, p1s, p2s):
    d = rho.shape[0]
    eye = np.eye(d, dtype=np.complex128)
    out = np.zeros((p1s.shape[0], p2s.shape[0]))
    for i in range(p1s.shape[0]):
        branch = np.zeros((d, d), dtype=np.complex128)
        for s in range(2):
            sign = 1.0 - 2.0 * s
            proj = 0.5 * (eye + sign * p1s[i])
            collapsed = proj @ rho @ proj
            branch = branch + sign * apply_cj_jit(mcj, collapsed, d, d)
        for j in range(p2s.shape[0]):
            acc = 0.0 + 0.0j
            for a in range(d):
                for b in range(d):
                    acc += p2s[j][a, b] * branch[b, a]
            out[i, j] = acc.real
    return out


# ---------------------------------------------------------------------------
# Douglas-Rachford splitting for trace-norm minimization on an affine set
# ---------------------------------------------------------------------------
#
# minimize ||C||_tr  subject to  A vec(C) = b,
#
# where C is Hermitian and represented by real coordinates in an orthonormal
# Hermitian basis. One iteration alternates the orthogonal projection onto
# the affine set with the eigenvalue soft-threshold (the trace-norm prox).


def dr_trace_norm_min_np(basis, proj, shift, step, max_iter, tol):
    """Run the splitting iteration; return (solution, iterations, residual).

    Parameters
    ----------
    basis : (k, d, d) complex
        Orthonormal Hermitian basis; coordinates are real.
    proj : (k, k) float
        Linear part of the orthogonal projection onto the affine set.
    shift : (k,) float
        Affine part of the projection (a feasible least-squares point).
    step : float
        Soft-threshold width; any positive value converges.
    max_iter : int
        Iteration cap.
    tol : float
        Stop once the fixed-point residual ||y - x||_2 drops below this.
    """
    z = shift.copy()
    res = np.inf
    it = 0
    for it in range(1, max_iter + 1):
        x = proj @ z + shift
        mid = np.einsum("q,qij->ij", (2.0 * x - z).astype(complex), basis)
        w, v = np.linalg.eigh(mid)
        w = np.sign(w) * np.maximum(np.abs(w) - step, 0.0)
        y_mat = (v * w) @ v.conj().T
        y = np.einsum("qij,ji->q", basis, y_mat).real
        res = float(np.linalg.norm(y - x))
        z = z + y - x
        if res < tol:
            break
    x = proj @ z + shift
    return x, it, res


@njit(cache=True)
def _to_matrix(basis, coords):
    k, d, _ = basis.shape
    out = np.zeros((d, d), dtype=np.complex128)
    for q in range(k):
        out += coords[q] * basis[q]
    return out


@njit(cache=True)
def _to_coords(basis, mat):
    k, d, _ = basis.shape
    out = np.empty(k)
    for q in range(k):
        acc = 0.0
        for i in range(d):
            for j in range(d):
                acc += (basis[q, i, j] * mat[j, i]).real
        out[q] = acc
    return out


@njit(cache=True)
def dr_trace_norm_min_jit(basis, proj, shift, step, max_iter, tol):
    k = basis.shape[0]
    z = shift.copy()
    res = np.inf
    it = 0
    for it in range(1, max_iter + 1):
        x = proj @ z + shift
        mid = _to_matrix(basis, 2.0 * x - z)
        w, v = np.linalg.eigh(mid)
        w = np.sign(w) * np.maximum(np.abs(w) - step, 0.0)
        y_mat = (v * w.astype(np.complex128)) @ np.conj(v).T
        y = _to_coords(basis, y_mat)
        res = 0.0
        for q in range(k):
            res += (y[q] - x[q]) ** 2
        res = np.sqrt(res)
        z = z + y - x
        if res < tol:
            break
    x = proj @ z + shift
    return x, it, res


# ---------------------------------------------------------------------------
# Backend binding
# ---------------------------------------------------------------------------

if NUMBA_ENABLED:
    apply_cj = apply_cj_jit
    ptrace_indexed = ptrace_indexed_jit
    correlator_grid = correlator_grid_jit
    dr_trace_norm_min = dr_trace_norm_min_jit
else:
    apply_cj = apply_cj_np
    ptrace_indexed = ptrace_indexed_np
    correlator_grid = correlator_grid_np
    dr_trace_norm_min = dr_trace_norm_min_np
