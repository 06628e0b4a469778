import numpy as np
import pytest

from zenopath import QuantumState, random_ff_instance


def random_fixture(seed):
    """Random frustration-free instance (1..3 qubits, 1..5 terms) plus a random mixed state."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 4))
    m = int(rng.integers(1, 6))
    h = random_ff_instance(n, m, seed=seed)
    rho = QuantumState.density(random_density_matrix(rng, 2**n))
    return h, rho


def random_hermitian(rng, dim, scale=1.0):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return (a + a.conj().T) / 2 * scale


def random_unitary(rng, dim):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(a)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_density_matrix(rng, dim):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


def random_unit_vector(rng, dim):
    z = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return z / np.linalg.norm(z)


@pytest.fixture
def rng():
    return np.random.default_rng(20250808)
