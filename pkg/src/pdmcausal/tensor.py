"""Dense complex linear algebra on multi-qubit tensor-product spaces.

Conventions used throughout the package:

* Qubit 0 is the **most significant** tensor factor: the flat index of a
  basis state is ``sum(bit_q << (n - 1 - q))``.
* Pauli strings are plain strings over the letters ``I``, ``X``, ``Y``,
  ``Z``, one letter per qubit, qubit 0 leftmost (``"XZ"`` is X on qubit 0
  tensored with Z on qubit 1).
* All matrices are dense ``complex128`` NumPy arrays.
"""

from dataclasses import dataclass
from itertools import product

import numpy as np

from . import kernels

PAULI_1Q = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

HERMITICITY_TOL = 1e-10


def as_complex_matrix(m) -> np.ndarray:
    """Coerce to a square complex128 array, rejecting non-square input."""
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    return a


def hermiticity_defect(m) -> float:
    """Largest entrywise deviation of ``m`` from its own adjoint."""
    a = np.asarray(m)
    return float(np.abs(a - a.conj().T).max())


def kron(a, b) -> np.ndarray:
    """Tensor product with the left factor most significant."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def kron_all(*mats) -> np.ndarray:
    """Tensor product of any number of factors, left to right."""
    out = np.array([[1.0 + 0j]])
    for m in mats:
        out = np.kron(out, np.asarray(m, dtype=complex))
    return out


@dataclass(frozen=True)
class QubitLayout:
    """Ordered tensor factorization of a Hilbert space.

    ``labels`` names each factor (site); ``dims`` gives the local dimension
    of each factor (2 for qubits). The product of ``dims`` is the dimension
    of any matrix the layout annotates.
    """

    labels: tuple
    dims: tuple = None

    def __post_init__(self):
        labels = tuple(self.labels)
        dims = tuple(self.dims) if self.dims is not None else (2,) * len(labels)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "dims", dims)
        if len(labels) != len(dims):
            raise ValueError("labels and dims must have the same length")
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate site labels in {labels}")
        if not labels:
            raise ValueError("layout needs at least one site")
        if any(d < 1 for d in dims):
            raise ValueError(f"factor dimensions must be positive, got {dims}")

    @property
    def dim(self) -> int:
        d = 1
        for k in self.dims:
            d *= k
        return d

    def positions(self, sites) -> list:
        """Factor positions of the given site labels, in layout order."""
        sites = set(sites)
        unknown = sites - set(self.labels)
        if unknown:
            raise ValueError(f"unknown site label(s) {sorted(unknown)}; layout has {self.labels}")
        return [p for p, lab in enumerate(self.labels) if lab in sites]

    def check_dim(self, m):
        if m.shape[0] != self.dim:
            raise ValueError(f"matrix dim {m.shape[0]} does not match layout dim {self.dim}")


def qubit_layout(n: int, prefix: str = "q") -> QubitLayout:
    """Layout of ``n`` qubits with generated labels."""
    return QubitLayout(tuple(f"{prefix}{i}" for i in range(n)))


def _strides(dims) -> np.ndarray:
    out = np.ones(len(dims), dtype=np.int64)
    for p in range(len(dims) - 2, -1, -1):
        out[p] = out[p + 1] * dims[p + 1]
    return out


def _flat_offsets(dims, strides, positions) -> np.ndarray:
    """Flat-index offsets enumerating all digit choices at ``positions``."""
    idx = np.zeros(1, dtype=np.int64)
    for p in positions:
        idx = (idx[:, None] + (np.arange(dims[p], dtype=np.int64) * strides[p])[None, :]).ravel()
    return idx


def partial_trace(m, layout: QubitLayout, keep) -> np.ndarray:
    """Trace out all sites not named in ``keep``.

    The result is ordered by the kept sites' positions in the layout; its
    dimension is the product of the kept factor dimensions. The full trace
    is preserved.
    """
    a = as_complex_matrix(m)
    layout.check_dim(a)
    kept_pos = layout.positions(keep)
    if not kept_pos:
        raise ValueError("keep must name at least one site")
    traced_pos = [p for p in range(len(layout.labels)) if p not in kept_pos]
    if not traced_pos:
        return a.copy()
    strides = _strides(layout.dims)
    kept = _flat_offsets(layout.dims, strides, kept_pos)
    traced = _flat_offsets(layout.dims, strides, traced_pos)
    return np.asarray(kernels.ptrace_indexed(a, kept, traced))


def partial_transpose(m, layout: QubitLayout, sites) -> np.ndarray:
    """Transpose the factors named in ``sites``, leaving the rest untouched.

    A pure index permutation: applying it twice returns the input exactly,
    and transposing every site equals the global transpose.
    """
    a = as_complex_matrix(m)
    layout.check_dim(a)
    pos = layout.positions(sites)
    if not pos:
        return a.copy()
    nf = len(layout.labels)
    axes = list(range(2 * nf))
    for p in pos:
        axes[p], axes[nf + p] = axes[nf + p], axes[p]
    t = a.reshape(layout.dims + layout.dims)
    return t.transpose(axes).reshape(layout.dim, layout.dim)


@dataclass(frozen=True)
class HermitianSpectrum:
    """Eigendecomposition of a Hermitian matrix.

    ``eigenvalues`` are real and ascending; ``eigenvectors`` holds the
    matching orthonormal eigenvectors as columns, so that
    ``eigenvectors @ diag(eigenvalues) @ eigenvectors.conj().T``
    reconstructs the input.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def eig_hermitian(h, tol: float = HERMITICITY_TOL) -> HermitianSpectrum:
    """Eigendecomposition of a Hermitian matrix, ascending eigenvalues.

    The input is symmetrized internally so that round-off accumulated by
    chains of tensor products cannot leak into the solve; inputs whose
    Hermiticity defect exceeds ``tol`` are rejected.
    """
    a = as_complex_matrix(h)
    defect = hermiticity_defect(a)
    if defect > tol:
        raise ValueError(f"matrix is not Hermitian: defect {defect:.3e} exceeds tolerance {tol:.1e}")
    sym = 0.5 * (a + a.conj().T)
    w, v = np.linalg.eigh(sym)
    return HermitianSpectrum(eigenvalues=w, eigenvectors=v)


def trace_norm(m) -> float:
    """Sum of singular values; for Hermitian input, the sum of |eigenvalues|."""
    a = as_complex_matrix(m)
    return float(np.linalg.svd(a, compute_uv=False).sum())


def pauli_strings(n: int) -> list:
    """All 4**n Pauli strings on ``n`` qubits in lexicographic I,X,Y,Z order."""
    if n < 1:
        raise ValueError("need at least one qubit")
    return ["".join(p) for p in product("IXYZ", repeat=n)]


def pauli_matrix(letters: str) -> np.ndarray:
    """Realize a Pauli string as its 2**n x 2**n matrix."""
    if not letters:
        raise ValueError("empty Pauli string")
    bad = set(letters) - set("IXYZ")
    if bad:
        raise ValueError(f"invalid Pauli letter(s) {sorted(bad)} in {letters!r}")
    return kron_all(*(PAULI_1Q[c] for c in letters))


def pauli_stack(n: int) -> np.ndarray:
    """Stack of all 4**n Pauli-string matrices, in ``pauli_strings`` order."""
    return np.array([pauli_matrix(s) for s in pauli_strings(n)])
