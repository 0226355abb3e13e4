import numpy as np
import pytest

from pdmcausal.tensor import (
    PAULI_1Q,
    HermitianSpectrum,
    QubitLayout,
    eig_hermitian,
    kron,
    kron_all,
    partial_trace,
    partial_transpose,
    pauli_matrix,
    pauli_strings,
    qubit_layout,
    trace_norm,
)
from conftest import random_hermitian

SWAP = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)
BELL = np.zeros((4, 4), dtype=complex)
BELL[np.ix_([0, 3], [0, 3])] = 0.5


def dyadic_matrix(rng, d):
    """Random matrix with entries k/64: triple products stay exact in floats."""
    re = rng.integers(-64, 65, size=(d, d)) / 64.0
    im = rng.integers(-64, 65, size=(d, d)) / 64.0
    return re + 1j * im


# ---------------------------------------------------------------------------
# kron
# ---------------------------------------------------------------------------


def test_kron_identity():
    assert np.array_equal(kron(np.eye(2), np.eye(2)), np.eye(4))


def test_kron_zz_diagonal():
    zz = kron(PAULI_1Q["Z"], PAULI_1Q["Z"])
    assert np.array_equal(zz, np.diag([1, -1, -1, 1]).astype(complex))


def test_kron_entry_formula(rng):
    # oracle: (a (x) b)[i*p+k, j*q+l] = a[i,j] * b[k,l], brute-force loop
    # (vectorized and scalar complex multiplies round differently at ~1e-17)
    a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    b = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    got = kron(a, b)
    p = q = 3
    for i in range(2):
        for j in range(2):
            for k in range(3):
                for l in range(3):
                    assert abs(got[i * p + k, j * q + l] - a[i, j] * b[k, l]) < 1e-14


def test_kron_associative_exact(rng):
    # dyadic entries keep every triple product exact, so equality is bitwise
    mats = [dyadic_matrix(rng, 2) for _ in range(3)]
    left = kron(kron(mats[0], mats[1]), mats[2])
    right = kron(mats[0], kron(mats[1], mats[2]))
    assert np.array_equal(left, right)
    for a, b, c in [(PAULI_1Q["X"], PAULI_1Q["Y"], PAULI_1Q["Z"])]:
        assert np.array_equal(kron(kron(a, b), c), kron(a, kron(b, c)))


# ---------------------------------------------------------------------------
# layouts / partial trace
# ---------------------------------------------------------------------------


def test_layout_validation():
    with pytest.raises(ValueError):
        QubitLayout(("a", "a"))
    with pytest.raises(ValueError):
        QubitLayout(())
    with pytest.raises(ValueError):
        QubitLayout(("a",), (0,))
    layout = QubitLayout(("a", "b"), (2, 3))
    assert layout.dim == 6


def test_partial_trace_bell_marginal():
    layout = QubitLayout(("A", "B"))
    got = partial_trace(BELL, layout, {"A"})
    assert np.abs(got - np.eye(2) / 2).max() < 1e-15


def test_partial_trace_product_factorization(rng):
    a = random_hermitian(rng, 2)
    b = random_hermitian(rng, 4)
    layout = QubitLayout(("x", "y", "z"), (2, 2, 2))
    got = partial_trace(np.kron(a, b), layout, {"x"})
    assert np.abs(got - a * np.trace(b)).max() < 1e-12


def brute_partial_trace(m, dims, keep_positions):
    """Index-summation oracle, independent of the library's gather kernel."""
    nf = len(dims)
    t = m.reshape(dims + dims)
    kept_dims = [dims[p] for p in keep_positions]
    dk = int(np.prod(kept_dims))
    out = np.zeros((dk, dk), dtype=complex)
    traced_positions = [p for p in range(nf) if p not in keep_positions]
    for a in np.ndindex(*kept_dims):
        for b in np.ndindex(*kept_dims):
            for tr in np.ndindex(*[dims[p] for p in traced_positions]):
                row = [0] * nf
                col = [0] * nf
                for p, v in zip(keep_positions, a):
                    row[p] = v
                for p, v in zip(keep_positions, b):
                    col[p] = v
                for p, v in zip(traced_positions, tr):
                    row[p] = v
                    col[p] = v
                ai = np.ravel_multi_index(a, kept_dims) if kept_dims else 0
                bi = np.ravel_multi_index(b, kept_dims) if kept_dims else 0
                out[ai, bi] += t[tuple(row) + tuple(col)]
    return out


def test_partial_trace_matches_brute_force(rng):
    m = random_hermitian(rng, 8)
    layout = qubit_layout(3)
    got = partial_trace(m, layout, {"q1"})
    want = brute_partial_trace(m, (2, 2, 2), [1])
    assert np.abs(got - want).max() < 1e-12


def test_partial_trace_order_independent(rng):
    m = random_hermitian(rng, 16)
    layout = qubit_layout(4)
    one_shot = partial_trace(m, layout, {"q0"})
    staged = partial_trace(m, layout, {"q0", "q2"})
    staged = partial_trace(staged, QubitLayout(("q0", "q2")), {"q0"})
    other = partial_trace(m, layout, {"q0", "q3"})
    other = partial_trace(other, QubitLayout(("q0", "q3")), {"q0"})
    assert np.abs(one_shot - staged).max() < 1e-12
    assert np.abs(one_shot - other).max() < 1e-12


def test_partial_trace_preserves_trace(rng):
    m = random_hermitian(rng, 8)
    layout = qubit_layout(3)
    got = partial_trace(m, layout, {"q2"})
    assert abs(np.trace(got) - np.trace(m)) < 1e-12


def test_partial_trace_mixed_dimensions(rng):
    # layouts permit non-qubit factors; check a qubit-qutrit split
    m = random_hermitian(rng, 6)
    layout = QubitLayout(("q", "t"), (2, 3))
    got = partial_trace(m, layout, {"t"})
    want = brute_partial_trace(m, (2, 3), [1])
    assert np.abs(got - want).max() < 1e-12
    assert got.shape == (3, 3)


def test_partial_trace_keep_all_is_copy(rng):
    m = random_hermitian(rng, 4)
    layout = qubit_layout(2)
    got = partial_trace(m, layout, {"q0", "q1"})
    assert np.array_equal(got, m)
    assert got is not m


def test_partial_trace_unknown_site():
    with pytest.raises(ValueError, match="unknown site"):
        partial_trace(np.eye(4), qubit_layout(2), {"nope"})


# ---------------------------------------------------------------------------
# partial transpose
# ---------------------------------------------------------------------------


def test_partial_transpose_swap_gives_bell():
    # entrywise oracle: SWAP^{T_1}[(i,a),(j,b)] = SWAP[(j,a),(i,b)]
    layout = QubitLayout(("in", "out"))
    got = partial_transpose(SWAP, layout, {"in"})
    want = np.zeros((4, 4), dtype=complex)
    for i in range(2):
        for a in range(2):
            for j in range(2):
                for b in range(2):
                    want[2 * i + a, 2 * j + b] = SWAP[2 * j + a, 2 * i + b]
    assert np.array_equal(got, want)
    assert np.abs(got - 2 * BELL).max() < 1e-15


def test_partial_transpose_empty_and_involution(rng):
    m = random_hermitian(rng, 8)
    layout = qubit_layout(3)
    assert np.array_equal(partial_transpose(m, layout, set()), m)
    twice = partial_transpose(partial_transpose(m, layout, {"q0", "q2"}), layout, {"q0", "q2"})
    assert np.array_equal(twice, m)


def test_partial_transpose_all_sites_is_global(rng):
    m = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
    layout = qubit_layout(3)
    got = partial_transpose(m, layout, set(layout.labels))
    assert np.array_equal(got, m.T)


# ---------------------------------------------------------------------------
# eigendecomposition
# ---------------------------------------------------------------------------


def test_eig_pauli_z():
    spec = eig_hermitian(PAULI_1Q["Z"])
    assert np.allclose(spec.eigenvalues, [-1.0, 1.0])


def test_eig_swap_spectrum():
    # antisymmetric singlet carries -1, the symmetric triplet +1
    spec = eig_hermitian(SWAP)
    assert np.allclose(spec.eigenvalues, [-1.0, 1.0, 1.0, 1.0])
    singlet = np.array([0, 1, -1, 0]) / np.sqrt(2)
    assert abs(singlet @ SWAP @ singlet - (-1.0)) < 1e-15


def test_eig_reconstruction_and_gram(rng):
    for d in (2, 4, 8, 16):
        h = random_hermitian(rng, d)
        spec = eig_hermitian(h)
        assert np.linalg.norm(spec.reconstruct() - h) < 1e-10
        gram = spec.eigenvectors.conj().T @ spec.eigenvectors
        assert np.linalg.norm(gram - np.eye(d)) < 1e-10
        assert np.all(np.diff(spec.eigenvalues) >= 0)


def test_eig_rejects_non_hermitian():
    bad = np.array([[0, 1], [0, 0]], dtype=complex)
    with pytest.raises(ValueError, match="defect"):
        eig_hermitian(bad)


def test_eig_matches_characteristic_polynomial(rng):
    # oracle: char poly from determinant samples (LU-based), roots via np.roots
    for d in (2, 3, 4):
        h = random_hermitian(rng, d)
        xs = np.linspace(-1, 1, d + 1) * (np.abs(h).sum() + 1)
        vals = [np.linalg.det(h - x * np.eye(d)) for x in xs]
        coeffs = np.polyfit(xs, np.real(vals), d)
        roots = np.sort(np.real(np.roots(coeffs)))
        assert np.abs(roots - eig_hermitian(h).eigenvalues).max() < 1e-8


# ---------------------------------------------------------------------------
# trace norm
# ---------------------------------------------------------------------------


def test_trace_norm_examples():
    assert abs(trace_norm(np.eye(4)) - 4.0) < 1e-12
    assert abs(trace_norm(SWAP / 2) - 2.0) < 1e-12
    assert abs(trace_norm(np.diag([3.0, -1.0])) - 4.0) < 1e-12


def test_trace_norm_dominates_trace(rng):
    for _ in range(20):
        m = random_hermitian(rng, 4)
        assert trace_norm(m) >= abs(np.trace(m).real) - 1e-12


def test_trace_norm_equality_iff_psd(rng):
    for _ in range(10):
        z = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        psd = z @ z.conj().T
        assert abs(trace_norm(psd) - np.trace(psd).real) < 1e-10
    indefinite = np.diag([1.0, -0.5])
    assert trace_norm(indefinite) - np.trace(indefinite).real > 0.5


# ---------------------------------------------------------------------------
# Pauli strings
# ---------------------------------------------------------------------------


def test_pauli_matrix_examples():
    assert np.array_equal(pauli_matrix("I"), np.eye(2))
    assert np.array_equal(pauli_matrix("ZZ"), np.diag([1, -1, -1, 1]).astype(complex))
    want = kron_all(PAULI_1Q["X"], PAULI_1Q["Y"], PAULI_1Q["Z"])
    assert np.array_equal(pauli_matrix("XYZ"), want)


def test_pauli_matrix_invariants():
    for s in pauli_strings(2):
        p = pauli_matrix(s)
        assert p.shape == (4, 4)
        assert np.abs(p - p.conj().T).max() == 0
        assert np.abs(p @ p - np.eye(4)).max() < 1e-15


def test_pauli_matrix_rejects_bad_letters():
    with pytest.raises(ValueError):
        pauli_matrix("XQ")
    with pytest.raises(ValueError):
        pauli_matrix("")


def test_pauli_strings_count_and_order():
    strings = pauli_strings(2)
    assert len(strings) == 16
    assert strings[0] == "II" and strings[1] == "IX" and strings[-1] == "ZZ"


def test_hermitian_spectrum_is_plain_dataclass():
    spec = HermitianSpectrum(np.array([1.0]), np.array([[1.0]]))
    assert spec.eigenvalues[0] == 1.0
