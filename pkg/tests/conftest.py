"""Shared randomized-input helpers for the test suite."""

import numpy as np
import pytest

from pdmcausal.channels import ChannelCJ, UnitaryGate, cj_from_kraus, cj_from_unitary, density_matrix
from pdmcausal.tensor import qubit_layout


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_hermitian(rng, d):
    z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return z + z.conj().T


def random_unitary(rng, d):
    """Haar-distributed unitary via QR with the standard phase fix."""
    z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_density(rng, d, rank=None):
    k = d if rank is None else rank
    z = rng.normal(size=(d, k)) + 1j * rng.normal(size=(d, k))
    rho = z @ z.conj().T
    return density_matrix(rho / np.trace(rho))


def random_kraus_set(rng, d, n_ops=3):
    """Complete Kraus set from the column blocks of a Haar unitary."""
    u = random_unitary(rng, d * n_ops)
    return [u[i * d : (i + 1) * d, :d] for i in range(n_ops)]


def random_channel(rng, d, kind="mixed"):
    """Random CP trace-preserving channel as a ChannelCJ."""
    n = int(round(np.log2(d)))
    if kind == "unitary" or (kind == "mixed" and rng.random() < 0.5):
        return cj_from_unitary(UnitaryGate(random_unitary(rng, d), qubit_layout(n)))
    return cj_from_kraus(random_kraus_set(rng, d))
