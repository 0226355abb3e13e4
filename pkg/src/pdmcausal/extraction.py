"""Recovering a channel's CJ matrix from a two-time PDM.

The PDM and the CJ matrix are linked by the anticommutator equation

    R = ((rho1 (x) I) M + M (rho1 (x) I)) / 2,

where rho1 is the time-1 marginal of R. When rho1 is full rank the
equation has the unique solution computed by :func:`spectral_solve`
(divide by eigenvalue-pair sums in the eigenbasis of rho1 (x) I). When
rho1 is rank deficient infinitely many M are consistent with R;
:func:`sdp_solve` then returns the one whose Choi matrix M^{T_in} is the
least negative, by minimizing the trace of the Choi's negative part over
the affine set of solutions. Because the constraints fix Tr M, that
objective equals the Choi trace norm up to a constant, and the program is
solved by Douglas-Rachford splitting: alternate the orthogonal projection
onto the affine constraint set with the eigenvalue soft-threshold that is
the trace-norm proximal map.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .pdm import PDM, marginal_mat, negativity, time_reverse
from .tensor import pauli_stack


@dataclass(frozen=True)
class SdpConfig:
    """Solver knobs shared by the extraction routines.

    ``rank_threshold`` decides full-rank versus deficient marginals;
    ``primal_tol`` bounds acceptable constraint violation, ``dual_tol``
    the splitting fixed-point residual at which iteration stops.
    """

    max_iterations: int = 200_000
    primal_tol: float = 1e-8
    dual_tol: float = 1e-12
    rank_threshold: float = 1e-8

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be positive")
        if self.primal_tol <= 0 or self.dual_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.rank_threshold < 0:
            raise ValueError("rank_threshold must be nonnegative")


@dataclass(frozen=True)
class ExtractionResult:
    """Extracted CJ matrix plus diagnostics.

    ``m`` is CJ-shaped but not necessarily completely positive; ``residual``
    is the Frobenius norm of the anticommutator equation's defect;
    ``objective`` (SDP only) is the trace of the negative part of the Choi
    matrix; ``possibly_degenerate`` flags rank-deficient marginals, for
    which the reported optimum need not be the unique one.
    """

    m: np.ndarray
    method: str
    residual: float
    in_dim: int
    objective: float = None
    iterations: int = 0
    possibly_degenerate: bool = False


class ExtractionError(RuntimeError):
    """Extraction failed; carries the residuals seen at failure."""

    def __init__(self, message, **diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics


def choi_of(m: np.ndarray, in_dim: int) -> np.ndarray:
    """Partial transpose on the input factor; an involution.

    The result is positive semidefinite exactly when the map carried by
    ``m`` is completely positive.
    """
    m = np.asarray(m, dtype=complex)
    out_dim = m.shape[0] // in_dim
    t = m.reshape(in_dim, out_dim, in_dim, out_dim)
    return t.transpose(2, 1, 0, 3).reshape(m.shape)


def _as_mat(x) -> np.ndarray:
    return np.asarray(getattr(x, "mat", x), dtype=complex)


def spectral_solve(r: PDM, rho1) -> np.ndarray:
    """Unique CJ matrix for a full-rank time-1 marginal.

    In the eigenbasis of ``rho1 (x) I`` with eigenvalues ``a_k`` the
    equation decouples entrywise: ``M_kl = 2 R_kl / (a_k + a_l)``. Refuses
    when any eigenvalue-pair sum drops below 1e-12, which signals a
    rank-deficient (or indefinite) marginal.
    """
    rho = _as_mat(rho1)
    d = r.block_dim
    if rho.shape[0] != d:
        raise ValueError(f"marginal dim {rho.shape[0]} != PDM block dim {d}")
    w, v = np.linalg.eigh(0.5 * (rho + rho.conj().T))
    a = np.repeat(w, d)
    den = a[:, None] + a[None, :]
    if float(den.min()) < 1e-12:
        raise ExtractionError(
            f"spectral solve refused: eigenvalue-pair sum {den.min():.3e} below 1e-12 "
            "(marginal is rank deficient; use the SDP route)",
            min_pair_sum=float(den.min()),
        )
    vv = np.kron(v, np.eye(d, dtype=complex))
    r_tilde = vv.conj().T @ r.mat @ vv
    return vv @ (2.0 * r_tilde / den) @ vv.conj().T


def _equation_residual(r: PDM, m: np.ndarray, rho: np.ndarray) -> float:
    big = np.kron(rho, np.eye(r.block_dim, dtype=complex))
    return float(np.linalg.norm(0.5 * (big @ m + m @ big) - r.mat))


def _hermitian_basis(dim: int) -> np.ndarray:
    nq = int(round(np.log2(dim)))
    if 2**nq != dim:
        raise ValueError(f"dimension {dim} is not a power of two")
    return pauli_stack(nq) / np.sqrt(dim)


def _coords(basis: np.ndarray, m: np.ndarray) -> np.ndarray:
    return np.einsum("qij,ji->q", basis, m).real


def _constraint_system(r: PDM, rho: np.ndarray):
    """Real linear system A x = b over Choi coordinates.

    Columns run over the orthonormal Hermitian basis of the Choi space;
    rows stack the anticommutator equation and the trace-preservation
    condition Tr_out M = I.
    """
    d = r.block_dim
    dim = d * d
    basis = _hermitian_basis(dim)
    basis_in = _hermitian_basis(d)
    big = np.kron(rho, np.eye(d, dtype=complex))
    cols = []
    for q in range(basis.shape[0]):
        m_q = choi_of(basis[q], d)
        g_q = 0.5 * (big @ m_q + m_q @ big)
        t_q = np.einsum("iaja->ij", m_q.reshape(d, d, d, d))
        cols.append(np.concatenate([_coords(basis, g_q), _coords(basis_in, t_q)]))
    a = np.array(cols).T
    b = np.concatenate([_coords(basis, r.mat), _coords(basis_in, np.eye(d))])
    return basis, a, b


def sdp_solve(r: PDM, cfg: SdpConfig = SdpConfig()) -> ExtractionResult:
    """Least-negative-Choi extraction by Douglas-Rachford splitting.

    Minimizes the trace of the negative part of the Choi matrix subject to
    the anticommutator equation and trace preservation. Raises
    :class:`ExtractionError` when the constraints are infeasible or the
    iteration has not reached ``dual_tol`` within ``max_iterations``.
    """
    d = r.block_dim
    rho = marginal_mat(r, "t1")
    basis, a, b = _constraint_system(r, rho)
    a_pinv = np.linalg.pinv(a, rcond=1e-12)
    shift = a_pinv @ b
    feas = float(np.linalg.norm(a @ shift - b))
    if feas > cfg.primal_tol:
        raise ExtractionError(
            f"SDP constraints are infeasible: best achievable violation {feas:.3e} "
            f"exceeds primal_tol {cfg.primal_tol:.1e}",
            feasibility=feas,
        )
    proj = np.eye(a.shape[1]) - a_pinv @ a
    x, iters, fp_res = kernels.dr_trace_norm_min(
        basis, proj, shift, 0.5, cfg.max_iterations, cfg.dual_tol
    )
    if fp_res > cfg.dual_tol:
        raise ExtractionError(
            f"SDP did not converge in {cfg.max_iterations} iterations: "
            f"fixed-point residual {fp_res:.3e} exceeds dual_tol {cfg.dual_tol:.1e}",
            fixed_point_residual=float(fp_res),
            feasibility=feas,
            iterations=int(iters),
        )
    choi = np.einsum("q,qij->ij", x.astype(complex), basis)
    m = choi_of(choi, d)
    eig = np.linalg.eigvalsh(choi)
    objective = float(np.abs(eig[eig < 0.0]).sum())
    low = float(np.linalg.eigvalsh(rho).min())
    return ExtractionResult(
        m=m,
        method="sdp",
        residual=_equation_residual(r, m, rho),
        in_dim=d,
        objective=objective,
        iterations=int(iters),
        possibly_degenerate=low <= cfg.rank_threshold,
    )


def extract_cj(r: PDM, cfg: SdpConfig = SdpConfig()) -> ExtractionResult:
    """Extract the CJ matrix from a PDM, dispatching on the marginal's rank.

    Full-rank time-1 marginal (min eigenvalue above ``cfg.rank_threshold``)
    uses the exact spectral solve; otherwise the least-negative-Choi SDP.
    """
    rho = marginal_mat(r, "t1")
    low = float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min())
    if low > cfg.rank_threshold:
        m = spectral_solve(r, rho)
        residual = _equation_residual(r, m, rho)
        result = ExtractionResult(m=m, method="spectral", residual=residual, in_dim=r.block_dim)
    else:
        result = sdp_solve(r, cfg)
    if result.residual > 1e-6:
        raise ExtractionError(
            f"extraction residual {result.residual:.3e} exceeds 1e-6",
            residual=result.residual,
            method=result.method,
        )
    return result


def reverse_choi_pipeline(r: PDM, cfg: SdpConfig = SdpConfig()):
    """Negativity of the forward and time-reversed Choi matrices.

    The pair (f_forward, f_reverse) feeds the causal classifier: a CP
    forward process has f_forward = 0, and asymmetry between the two
    values reveals the time ordering.
    """
    fwd = extract_cj(r, cfg)
    rev = extract_cj(time_reverse(r), cfg)
    f_fwd = negativity(choi_of(fwd.m, fwd.in_dim))
    f_rev = negativity(choi_of(rev.m, rev.in_dim))
    return f_fwd, f_rev
