"""Two-time pseudo-density matrices.

A 2-time n-qubit PDM is assembled from two-time Pauli correlators,

    R = 4**-n * sum_{p1, p2} <p1, p2> P(p1) (x) P(p2),

with the time-1 block as the most significant tensor factors. Correlators
come either from an explicit sequential coarse-grained measurement
(:func:`correlator_oracle`), from the anticommutator closed form against
the channel's CJ matrix (:func:`pdm_closed_form`), or from the scattering
simulator in :mod:`pdmcausal.scattering`. A PDM is Hermitian with unit
trace but, unlike a density matrix, may have negative eigenvalues; that
negativity is the temporal-correlation signal quantified by
:func:`negativity`.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .channels import ChannelCJ, DensityMatrix, apply_cj_mat, density_matrix
from .tensor import (
    QubitLayout,
    as_complex_matrix,
    eig_hermitian,
    hermiticity_defect,
    partial_trace,
    pauli_matrix,
    pauli_stack,
    pauli_strings,
)

PDM_TOL = 1e-10
VALUE_TOL = 1e-9


def _default_labels(n: int, prefix: str) -> tuple:
    if n == 1:
        return (prefix,)
    return tuple(f"{prefix}{i}" for i in range(n))


@dataclass(frozen=True)
class PDM:
    """Two-time pseudo-density matrix with named sites per time block."""

    mat: np.ndarray
    labels_t1: tuple
    labels_t2: tuple

    def __post_init__(self):
        a = as_complex_matrix(self.mat)
        object.__setattr__(self, "mat", a)
        object.__setattr__(self, "labels_t1", tuple(self.labels_t1))
        object.__setattr__(self, "labels_t2", tuple(self.labels_t2))
        if len(self.labels_t1) != len(self.labels_t2):
            raise ValueError("time blocks must hold the same number of qubits")
        n = len(self.labels_t1)
        if n < 1:
            raise ValueError("each time block needs at least one site")
        if a.shape[0] != 4**n:
            raise ValueError(f"matrix dim {a.shape[0]} != 4**{n} for {n} qubit(s) per time")
        if len(set(self.labels_t1) | set(self.labels_t2)) != 2 * n:
            raise ValueError("site labels must be unique across both time blocks")
        defect = hermiticity_defect(a)
        if defect > PDM_TOL:
            raise ValueError(f"PDM is not Hermitian: defect {defect:.3e}")
        tr = complex(np.trace(a))
        if abs(tr - 1.0) > PDM_TOL:
            raise ValueError(f"PDM trace {tr} is not 1")

    @property
    def n(self) -> int:
        """Qubits per time slice."""
        return len(self.labels_t1)

    @property
    def block_dim(self) -> int:
        return 2**self.n

    @property
    def layout(self) -> QubitLayout:
        return QubitLayout(self.labels_t1 + self.labels_t2)


def pdm(mat, labels_t1=None, labels_t2=None) -> PDM:
    """Wrap a raw matrix as a PDM, generating site labels when omitted."""
    a = as_complex_matrix(mat)
    n2 = int(round(np.log2(a.shape[0])))
    if 2**n2 != a.shape[0] or n2 % 2 != 0:
        raise ValueError(f"dim {a.shape[0]} is not 4**n for integer n")
    n = n2 // 2
    return PDM(
        mat=a,
        labels_t1=_default_labels(n, "A") if labels_t1 is None else tuple(labels_t1),
        labels_t2=_default_labels(n, "B") if labels_t2 is None else tuple(labels_t2),
    )


@dataclass(frozen=True)
class CorrelatorTable:
    """Complete map of two-time Pauli correlators on n qubits per time."""

    n: int
    values: dict

    def __post_init__(self):
        object.__setattr__(self, "values", dict(self.values))
        strings = pauli_strings(self.n)
        missing = [
            (p1, p2)
            for p1 in strings
            for p2 in strings
            if (p1, p2) not in self.values
        ]
        if missing:
            raise ValueError(
                f"correlator table is incomplete: {len(missing)} of "
                f"{len(strings)**2} entries missing, first {missing[0]}"
            )
        ident = "I" * self.n
        if abs(self.values[(ident, ident)] - 1.0) > PDM_TOL:
            raise ValueError(
                f"identity-identity correlator must be 1, got {self.values[(ident, ident)]}"
            )
        for key, val in self.values.items():
            if abs(val) > 1.0 + VALUE_TOL:
                raise ValueError(f"correlator {key} = {val} is outside [-1, 1]")

    def as_grid(self) -> np.ndarray:
        """Values as a (4**n, 4**n) array in ``pauli_strings`` order."""
        strings = pauli_strings(self.n)
        return np.array([[self.values[(p1, p2)] for p2 in strings] for p1 in strings])


def correlator_oracle(rho1: DensityMatrix, channel: ChannelCJ, p1: str, p2: str) -> float:
    """Two-time correlator from an explicit coarse-grained measurement.

    The first Pauli string is measured by collapsing the state onto the
    +/-1 eigenspace projectors (I +/- P)/2 of the full string, each branch
    is sent through the channel, and the second string is measured on the
    output; the correlator is the expectation of the outcome product.
    Identity letters enter through the same projectors and therefore
    measure nothing.
    """
    mat1 = pauli_matrix(p1)
    mat2 = pauli_matrix(p2)
    if mat1.shape[0] != rho1.dim or rho1.dim != channel.in_dim:
        raise ValueError(
            f"dimension mismatch: state {rho1.dim}, channel input {channel.in_dim}, "
            f"p1 {mat1.shape[0]}"
        )
    if mat2.shape[0] != channel.out_dim:
        raise ValueError(f"p2 dim {mat2.shape[0]} != channel output dim {channel.out_dim}")
    eye = np.eye(rho1.dim, dtype=complex)
    total = 0.0
    for sign in (1.0, -1.0):
        proj1 = 0.5 * (eye + sign * mat1)
        collapsed = proj1 @ rho1.mat @ proj1
        evolved = apply_cj_mat(channel.mat, collapsed, channel.in_dim, channel.out_dim)
        total += sign * float(np.trace(mat2 @ evolved).real)
    return total


def correlator_table(rho1: DensityMatrix, channel: ChannelCJ) -> CorrelatorTable:
    """All 4**n x 4**n coarse-grained correlators for a state/channel pair."""
    if rho1.dim != channel.in_dim or channel.in_dim != channel.out_dim:
        raise ValueError("channel must be square and match the state dimension")
    n = int(round(np.log2(rho1.dim)))
    stack = pauli_stack(n)
    grid = np.asarray(kernels.correlator_grid(
        np.ascontiguousarray(rho1.mat),
        np.ascontiguousarray(channel.mat),
        stack,
        stack,
    ))
    strings = pauli_strings(n)
    values = {
        (p1, p2): float(grid[i, j])
        for i, p1 in enumerate(strings)
        for j, p2 in enumerate(strings)
    }
    return CorrelatorTable(n=n, values=values)


def pdm_from_correlators(table: CorrelatorTable, labels_t1=None, labels_t2=None) -> PDM:
    """Assemble the PDM from a complete correlator table.

    The Pauli coefficients of the result reproduce the table:
    ``Tr[R (P(p1) (x) P(p2))]`` equals the stored correlator.
    """
    n = table.n
    strings = pauli_strings(n)
    mats = pauli_stack(n)
    dim = 4**n
    out = np.zeros((dim, dim), dtype=complex)
    for i, p1 in enumerate(strings):
        for j, p2 in enumerate(strings):
            out += table.values[(p1, p2)] * np.kron(mats[i], mats[j])
    return pdm(out / dim, labels_t1, labels_t2)


def pdm_closed_form(rho1: DensityMatrix, m: ChannelCJ, labels_t1=None, labels_t2=None) -> PDM:
    """PDM from the anticommutator closed form R = ((rho (x) I) M + M (rho (x) I)) / 2.

    Agrees with assembling the coarse-grained correlator table entry by
    entry; the closed form is the cheap route, the table the independent
    one.
    """
    if rho1.dim != m.in_dim:
        raise ValueError(f"state dim {rho1.dim} != channel input dim {m.in_dim}")
    if m.in_dim != m.out_dim:
        raise ValueError("a two-time PDM needs a square channel")
    big = np.kron(rho1.mat, np.eye(m.out_dim, dtype=complex))
    r = 0.5 * (big @ m.mat + m.mat @ big)
    return pdm(r, labels_t1, labels_t2)


def negativity(m) -> float:
    """Negativity witness f(O) = Tr sqrt(O O^dag) - Tr O of a Hermitian matrix.

    Equals sum(|eig|) - sum(eig), i.e. twice the total magnitude of the
    negative eigenvalues: zero exactly when the matrix is positive
    semidefinite.
    """
    a = as_complex_matrix(getattr(m, "mat", m))
    spec = eig_hermitian(a)
    val = float(np.abs(spec.eigenvalues).sum() - spec.eigenvalues.sum())
    return val if val > 0.0 else 0.0


def time_reverse(r: PDM) -> PDM:
    """Conjugate by the block swap exchanging the two time slices.

    A pure index permutation, hence an exact involution that preserves the
    spectrum.
    """
    d = r.block_dim
    idx = np.arange(d * d).reshape(d, d).T.ravel()
    rev = r.mat[np.ix_(idx, idx)]
    return PDM(mat=rev, labels_t1=r.labels_t2, labels_t2=r.labels_t1)


def marginal(r: PDM, which: str) -> DensityMatrix:
    """Recover the ordinary state at one time by tracing out the other block."""
    return density_matrix(marginal_mat(r, which))


def marginal_mat(r: PDM, which: str) -> np.ndarray:
    """Marginal as a raw matrix (no positivity validation; noisy tables may dip)."""
    if which not in ("t1", "t2"):
        raise ValueError(f"which must be 't1' or 't2', got {which!r}")
    keep = r.labels_t1 if which == "t1" else r.labels_t2
    return partial_trace(r.mat, r.layout, set(keep))


def reduce_pdm(r: PDM, keep) -> PDM:
    """Trace out the sites not named in ``keep``.

    Equivalent to rebuilding the PDM from the sub-table in which every
    dropped site carries the identity Pauli. Each time block must retain
    the same, nonzero number of sites.
    """
    keep = set(keep)
    unknown = keep - set(r.labels_t1) - set(r.labels_t2)
    if unknown:
        raise ValueError(f"unknown site label(s) {sorted(unknown)}")
    k1 = tuple(lab for lab in r.labels_t1 if lab in keep)
    k2 = tuple(lab for lab in r.labels_t2 if lab in keep)
    if not k1 or not k2:
        raise ValueError("keep must retain at least one site in each time block")
    if len(k1) != len(k2):
        raise ValueError("keep must retain the same number of sites in each time block")
    if len(k1) + len(k2) == 2 * r.n:
        return r
    reduced = partial_trace(r.mat, r.layout, keep)
    return PDM(mat=reduced, labels_t1=k1, labels_t2=k2)
