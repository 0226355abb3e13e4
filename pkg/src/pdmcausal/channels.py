"""Quantum states, unitaries, and channels in CJ representation.

A channel N is carried by its CJ matrix

    M = sum_ij |i><j| (x) N(|j><i|),

with the input factor first. Unitary and Kraus forms are constructors
only; application inverts the representation via
``out = Tr_in[(rho (x) I) M]``.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .tensor import (
    QubitLayout,
    as_complex_matrix,
    hermiticity_defect,
    kron,
    kron_all,
    partial_trace,
    qubit_layout,
)

TRACE_TOL = 1e-10
PSD_TOL = 1e-10
UNITARITY_TOL = 1e-10
TP_TOL = 1e-8

SWAP_2Q = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
)

KET_0 = np.array([[1, 0], [0, 0]], dtype=complex)
KET_1 = np.array([[0, 0], [0, 1]], dtype=complex)
KET_PLUS = 0.5 * np.array([[1, 1], [1, 1]], dtype=complex)


@dataclass(frozen=True)
class DensityMatrix:
    """Validated quantum state: Hermitian, unit trace, positive semidefinite."""

    mat: np.ndarray
    layout: QubitLayout

    def __post_init__(self):
        a = as_complex_matrix(self.mat)
        object.__setattr__(self, "mat", a)
        self.layout.check_dim(a)
        defect = hermiticity_defect(a)
        if defect > TRACE_TOL:
            raise ValueError(f"state is not Hermitian: defect {defect:.3e}")
        tr = complex(np.trace(a))
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValueError(f"state trace {tr} is not 1")
        low = float(np.linalg.eigvalsh(0.5 * (a + a.conj().T)).min())
        if low < -PSD_TOL:
            raise ValueError(f"state has negative eigenvalue {low:.3e}")

    @property
    def dim(self) -> int:
        return self.mat.shape[0]


@dataclass(frozen=True)
class UnitaryGate:
    """Validated unitary evolution."""

    mat: np.ndarray
    layout: QubitLayout

    def __post_init__(self):
        a = as_complex_matrix(self.mat)
        object.__setattr__(self, "mat", a)
        self.layout.check_dim(a)
        defect = float(np.abs(a.conj().T @ a - np.eye(a.shape[0])).max())
        if defect > UNITARITY_TOL:
            raise ValueError(f"matrix is not unitary: defect {defect:.3e}")

    @property
    def dim(self) -> int:
        return self.mat.shape[0]


@dataclass(frozen=True)
class ChannelCJ:
    """A channel represented by its CJ matrix (input factor first).

    Validated to be Hermitian and trace preserving (the partial trace over
    the output factor equals the identity on the input). Complete
    positivity is a property of how the matrix was built, not of the
    wrapper, and is checked in tests via the partial transpose.
    """

    mat: np.ndarray
    in_dim: int
    out_dim: int

    def __post_init__(self):
        a = as_complex_matrix(self.mat)
        object.__setattr__(self, "mat", a)
        if self.in_dim < 1 or self.out_dim < 1:
            raise ValueError("dimensions must be positive")
        if a.shape[0] != self.in_dim * self.out_dim:
            raise ValueError(
                f"CJ matrix dim {a.shape[0]} != in_dim*out_dim = {self.in_dim * self.out_dim}"
            )
        defect = hermiticity_defect(a)
        if defect > TRACE_TOL:
            raise ValueError(f"CJ matrix is not Hermitian: defect {defect:.3e}")
        tp = float(np.abs(self.trace_out() - np.eye(self.in_dim)).max())
        if tp > TP_TOL:
            raise ValueError(f"channel is not trace preserving: defect {tp:.3e}")

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    def trace_out(self) -> np.ndarray:
        """Partial trace over the output factor (identity for valid channels)."""
        m4 = self.mat.reshape(self.in_dim, self.out_dim, self.in_dim, self.out_dim)
        return np.einsum("iaja->ij", m4)


def density_matrix(mat, layout: QubitLayout = None) -> DensityMatrix:
    """Wrap a raw matrix as a DensityMatrix, inferring a qubit layout."""
    a = as_complex_matrix(mat)
    if layout is None:
        n = int(round(np.log2(a.shape[0])))
        if 2**n != a.shape[0]:
            raise ValueError(f"dim {a.shape[0]} is not a power of two; pass a layout")
        layout = qubit_layout(n)
    return DensityMatrix(mat=a, layout=layout)


def maximally_mixed(n: int = 1) -> DensityMatrix:
    d = 2**n
    return density_matrix(np.eye(d, dtype=complex) / d)


def basis_state(bits: str) -> DensityMatrix:
    """Computational basis state, e.g. ``basis_state("00")``."""
    return density_matrix(kron_all(*(KET_1 if b == "1" else KET_0 for b in bits)))


def plus_state() -> DensityMatrix:
    return density_matrix(KET_PLUS)


def polarized_plus_state(lam: float) -> DensityMatrix:
    """Single-qubit mixture ``lam |+><+| + (1-lam) I/2`` with polarization lam."""
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"polarization must be in [0, 1], got {lam}")
    return density_matrix(lam * KET_PLUS + (1.0 - lam) * np.eye(2) / 2.0)


def _cj_matrix(apply_map, d_in: int, d_out: int) -> np.ndarray:
    m = np.zeros((d_in * d_out, d_in * d_out), dtype=complex)
    for i in range(d_in):
        for j in range(d_in):
            e_ji = np.zeros((d_in, d_in), dtype=complex)
            e_ji[j, i] = 1.0
            block = apply_map(e_ji)
            m[i * d_out : (i + 1) * d_out, j * d_out : (j + 1) * d_out] = block
    return m


def cj_from_unitary(u: UnitaryGate) -> ChannelCJ:
    """CJ matrix of conjugation by ``u``; the identity gives the SWAP matrix."""
    a = u.mat
    d = a.shape[0]
    m = np.einsum("aj,bi->iajb", a, a.conj()).reshape(d * d, d * d)
    return ChannelCJ(mat=m, in_dim=d, out_dim=d)


def cj_from_kraus(ks) -> ChannelCJ:
    """CJ matrix of the channel with Kraus operators ``ks``.

    The set must be complete: ``sum K^dag K = I`` within 1e-10.
    """
    mats = [as_complex_matrix(k) for k in ks]
    if not mats:
        raise ValueError("need at least one Kraus operator")
    d = mats[0].shape[0]
    comp = sum(k.conj().T @ k for k in mats)
    deficit = float(np.abs(comp - np.eye(d)).max())
    if deficit > 1e-10:
        raise ValueError(f"Kraus set is not complete: deficit {deficit:.3e}")
    m = np.zeros((d * d, d * d), dtype=complex)
    for k in mats:
        m += np.einsum("aj,bi->iajb", k, k.conj()).reshape(d * d, d * d)
    return ChannelCJ(mat=m, in_dim=d, out_dim=d)


def apply_cj_mat(m: np.ndarray, x: np.ndarray, d_in: int, d_out: int) -> np.ndarray:
    """Apply a CJ matrix to an arbitrary (not necessarily normalized) operator."""
    return np.asarray(kernels.apply_cj(
        np.ascontiguousarray(m, dtype=np.complex128),
        np.ascontiguousarray(x, dtype=np.complex128),
        d_in,
        d_out,
    ))


def apply_channel(c: ChannelCJ, rho: DensityMatrix) -> DensityMatrix:
    """Send a state through a channel; output is a validated state."""
    if rho.dim != c.in_dim:
        raise ValueError(f"state dim {rho.dim} != channel input dim {c.in_dim}")
    out = apply_cj_mat(c.mat, rho.mat, c.in_dim, c.out_dim)
    n = int(round(np.log2(c.out_dim)))
    layout = rho.layout if c.out_dim == rho.dim else qubit_layout(n)
    return DensityMatrix(mat=out, layout=layout)


def partial_swap(theta: float) -> UnitaryGate:
    """Two-qubit unitary exp(-i theta SWAP) = cos(theta) I - i sin(theta) SWAP.

    The closed form is exact because SWAP squares to the identity.
    """
    mat = np.cos(theta) * np.eye(4, dtype=complex) - 1j * np.sin(theta) * SWAP_2Q
    return UnitaryGate(mat=mat, layout=qubit_layout(2))


def fully_decohering_cj() -> ChannelCJ:
    """CJ matrix of the channel that keeps populations and kills coherence."""
    k0 = np.array([[1, 0], [0, 0]], dtype=complex)
    k1 = np.array([[0, 0], [0, 1]], dtype=complex)
    return cj_from_kraus([k0, k1])


def cj_from_dilation(
    u: np.ndarray,
    layout: QubitLayout,
    in_site,
    out_site,
    env_states: dict,
) -> ChannelCJ:
    """CJ matrix of the channel induced by a unitary dilation.

    The register described by ``layout`` evolves under ``u``; every site
    except ``in_site`` starts in the fixed state given by ``env_states``;
    the channel maps the input site's operator to the reduced output on
    ``out_site``.
    """
    a = as_complex_matrix(u)
    layout.check_dim(a)
    if in_site not in layout.labels or out_site not in layout.labels:
        raise ValueError("in_site and out_site must be layout labels")
    needed = [lab for lab in layout.labels if lab != in_site]
    missing = [lab for lab in needed if lab not in env_states]
    if missing:
        raise ValueError(f"missing environment states for sites {missing}")
    pos = {lab: p for p, lab in enumerate(layout.labels)}
    d_in = layout.dims[pos[in_site]]
    d_out = layout.dims[pos[out_site]]

    def run(x):
        factors = [
            x if lab == in_site else np.asarray(env_states[lab], dtype=complex)
            for lab in layout.labels
        ]
        full = a @ kron_all(*factors) @ a.conj().T
        return partial_trace(full, layout, {out_site})

    m = _cj_matrix(run, d_in, d_out)
    return ChannelCJ(mat=m, in_dim=d_in, out_dim=d_out)


def mediated_partial_swap_cj(theta: float) -> ChannelCJ:
    """Effective channel of the swap-in / partial-swap-out circuit.

    The input qubit is swapped into a mediator, the mediator undergoes
    exp(-i theta SWAP) with a target qubit prepared in |0>, and the
    mediator is discarded. theta = pi/2 transports the input intact
    (identity channel); theta = 0 leaves the target in |0> (constant
    channel).
    """
    layout = QubitLayout(("in", "mid", "tgt"))
    swap_in = kron(SWAP_2Q, np.eye(2))
    interact = kron(np.eye(2), partial_swap(theta).mat)
    u = interact @ swap_in
    return cj_from_dilation(
        u, layout, "in", "tgt", {"mid": KET_0, "tgt": KET_0}
    )
