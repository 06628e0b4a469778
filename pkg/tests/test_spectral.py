import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zenopath import (
    HermitianOperator,
    Projector,
    QuantumState,
    eigendecompose,
    ground_projector,
    ground_space_basis,
    psd_sqrt,
    spectral_gap,
    spectral_norm,
    trace_distance,
)
from zenopath.errors import (
    DimensionMismatch,
    NoGap,
    NonHermitianInput,
    NotPositiveSemidefinite,
)

from conftest import random_density_matrix, random_hermitian, random_unitary

seeds = st.integers(min_value=0, max_value=2**32 - 1)
dims = st.sampled_from([2, 3, 4, 6, 8])


def plane_vector(theta):
    return np.array([math.cos(theta), math.sin(theta)], dtype=complex)


class TestHermitianOperator:
    def test_rejects_non_hermitian(self):
        with pytest.raises(NonHermitianInput):
            HermitianOperator([[0, 1], [0, 0]])

    def test_symmetrizes_round_off(self):
        a = np.array([[1.0, 0.5 + 4e-13j], [0.5 - 2e-13j, 2.0]])
        op = HermitianOperator(a)
        assert np.max(np.abs(op.entries - op.entries.conj().T)) == 0.0

    def test_entries_read_only(self):
        op = HermitianOperator(np.diag([0.0, 1.0]))
        with pytest.raises(ValueError):
            op.entries[0, 0] = 5.0


class TestEigendecompose:
    def test_already_diagonal(self):
        vals, vecs = eigendecompose(HermitianOperator(np.diag([0.0, 1.0])))
        assert np.allclose(vals, [0.0, 1.0])
        assert np.allclose(np.abs(vecs), np.eye(2))

    def test_pauli_x(self):
        vals, vecs = eigendecompose(HermitianOperator([[0, 1], [1, 0]]))
        assert np.allclose(vals, [-1.0, 1.0])
        minus = np.array([1, -1]) / math.sqrt(2)
        plus = np.array([1, 1]) / math.sqrt(2)
        assert abs(np.vdot(minus, vecs[:, 0])) == pytest.approx(1.0, abs=1e-12)
        assert abs(np.vdot(plus, vecs[:, 1])) == pytest.approx(1.0, abs=1e-12)

    def test_random_reconstruction(self, rng):
        op = HermitianOperator(random_hermitian(rng, 8))
        vals, vecs = eigendecompose(op)
        assert np.all(np.diff(vals) >= 0)
        assert np.max(np.abs((vecs * vals) @ vecs.conj().T - op.entries)) < 1e-10
        assert np.max(np.abs(vecs.conj().T @ vecs - np.eye(8))) < 1e-10


class TestPsdSqrt:
    def test_projector_is_fixed_point(self, rng):
        u = random_unitary(rng, 4)
        p = u[:, :2] @ u[:, :2].conj().T
        root = psd_sqrt(HermitianOperator(p))
        # zero modes of a numerical projector sit at ~1e-17, so the root
        # carries sqrt-of-that noise entrywise; squaring restores 1e-9
        assert np.max(np.abs(root.entries - p)) < 1e-8
        assert np.max(np.abs(root.entries @ root.entries - p)) < 1e-9

    def test_diagonal(self):
        root = psd_sqrt(HermitianOperator(np.diag([0.0, 0.25])))
        assert np.allclose(root.entries, np.diag([0.0, 0.5]))

    def test_squares_back(self, rng):
        a = random_hermitian(rng, 4)
        psd = HermitianOperator(a.conj().T @ a)
        root = psd_sqrt(psd)
        assert np.max(np.abs(root.entries @ root.entries - psd.entries)) < 1e-9

    def test_clips_tolerable_negatives(self):
        root = psd_sqrt(HermitianOperator(np.diag([-5e-11, 1.0])))
        assert root.min_eigenvalue >= 0.0

    def test_rejects_negative(self):
        with pytest.raises(NotPositiveSemidefinite):
            psd_sqrt(HermitianOperator(np.diag([-1.0, 1.0])))


class TestSpectralNorm:
    def test_diagonal_max(self):
        assert spectral_norm(HermitianOperator(np.diag([0.0, 0.3, 0.7, 0.0]))) == 0.7

    def test_absolute_value(self):
        assert spectral_norm(HermitianOperator(-np.eye(4))) == pytest.approx(1.0)

    @pytest.mark.parametrize("phi", [0.1, 0.5, 1.2])
    def test_projector_difference(self, phi):
        theta = 0.3
        p1 = np.outer(plane_vector(theta), plane_vector(theta))
        p2 = np.outer(plane_vector(theta + phi), plane_vector(theta + phi))
        norm = spectral_norm(HermitianOperator(p1 - p2))
        assert norm == pytest.approx(abs(math.sin(phi)), abs=1e-12)


class TestTraceDistance:
    def test_identical(self, rng):
        rho = QuantumState.density(random_density_matrix(rng, 4))
        assert trace_distance(rho, rho) == 0.0

    def test_orthogonal_pure(self):
        zero = QuantumState.pure([1, 0])
        one = QuantumState.pure([0, 1])
        assert trace_distance(zero, one) == pytest.approx(1.0, abs=1e-12)

    def test_zero_vs_plus(self):
        zero = QuantumState.pure([1, 0])
        plus = QuantumState.pure(np.array([1, 1]) / math.sqrt(2))
        assert trace_distance(zero, plus) == pytest.approx(1 / math.sqrt(2), abs=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            trace_distance(QuantumState.pure([1, 0]), QuantumState.pure([1, 0, 0, 0]))

    def test_symmetry(self, rng):
        a = QuantumState.density(random_density_matrix(rng, 4))
        b = QuantumState.density(random_density_matrix(rng, 4))
        assert trace_distance(a, b) == pytest.approx(trace_distance(b, a), abs=1e-14)


class TestGroundProjector:
    def test_simple_diagonal(self):
        proj = ground_projector(HermitianOperator(np.diag([0.0, 1.0])), 1e-10)
        assert proj.rank == 1
        assert np.allclose(proj.entries, np.diag([1.0, 0.0]))

    def test_degenerate_ground(self):
        proj = ground_projector(HermitianOperator(np.diag([0.0, 0.0, 1.0, 1.0])), 1e-10)
        assert proj.rank == 2
        assert np.allclose(proj.entries, np.diag([1.0, 1.0, 0.0, 0.0]))

    def test_band_is_anchored_at_minimum(self, rng):
        u = random_unitary(rng, 3)
        op = HermitianOperator(u @ np.diag([0.0, 1e-14, 0.5]) @ u.conj().T)
        assert ground_projector(op, 1e-10).rank == 2

    def test_eigenvalues_are_binary(self, rng):
        op = HermitianOperator(random_hermitian(rng, 6))
        proj = ground_projector(op)
        vals = np.linalg.eigvalsh(proj.entries)
        assert np.all(np.minimum(np.abs(vals), np.abs(vals - 1)) < 1e-10)

    def test_basis_matches_projector(self, rng):
        op = HermitianOperator(random_hermitian(rng, 6))
        basis = ground_space_basis(op)
        proj = ground_projector(op)
        assert np.max(np.abs(basis @ basis.conj().T - proj.entries)) < 1e-12


class TestSpectralGap:
    def test_diagonal(self):
        assert spectral_gap(HermitianOperator(np.diag([0.0, 0.4, 1.0])), 1e-10) == pytest.approx(0.4)

    def test_rank_one_projector(self):
        mat = np.zeros((8, 8))
        mat[3, 3] = 1.0
        assert spectral_gap(HermitianOperator(mat), 1e-10) == pytest.approx(1.0)

    def test_identity_has_no_gap(self):
        with pytest.raises(NoGap):
            spectral_gap(HermitianOperator(np.eye(4)), 1e-10)


class TestQuantumState:
    def test_pure_norm_enforced(self):
        with pytest.raises(ValueError):
            QuantumState.pure([1.0, 1.0])

    def test_density_trace_enforced(self):
        with pytest.raises(ValueError):
            QuantumState.density(np.diag([0.7, 0.7]))

    def test_density_psd_enforced(self):
        with pytest.raises(ValueError):
            QuantumState.density(np.diag([1.5, -0.5]))

    def test_dimension_must_be_power_of_two(self):
        with pytest.raises(ValueError):
            QuantumState.pure([1.0, 0.0, 0.0])

    def test_pure_density_view(self):
        plus = QuantumState.pure(np.array([1, 1]) / math.sqrt(2))
        assert np.allclose(plus.rho, np.full((2, 2), 0.5))
        assert plus.to_density().is_pure is False


class TestProjectorType:
    def test_rejects_non_idempotent(self):
        with pytest.raises(ValueError):
            Projector(HermitianOperator(np.diag([0.5, 0.0])), rank=1)

    def test_rejects_wrong_rank(self):
        with pytest.raises(ValueError):
            Projector(HermitianOperator(np.diag([1.0, 1.0])), rank=1)


@settings(max_examples=40, deadline=None)
@given(seed=seeds, dim=dims)
def test_shifted_sqrt_reconstructs(seed, dim):
    rng = np.random.default_rng(seed)
    a = random_hermitian(rng, dim)
    shifted = HermitianOperator(a - np.linalg.eigvalsh(a)[0] * np.eye(dim))
    root = psd_sqrt(shifted)
    assert np.max(np.abs(root.entries @ root.entries - shifted.entries)) < 1e-9


@settings(max_examples=40, deadline=None)
@given(seed=seeds, dim=dims)
def test_norm_negation_and_triangle(seed, dim):
    rng = np.random.default_rng(seed)
    a = HermitianOperator(random_hermitian(rng, dim))
    b = HermitianOperator(random_hermitian(rng, dim))
    assert spectral_norm(a) == pytest.approx(spectral_norm(-a), abs=1e-12)
    assert spectral_norm(a + b) <= spectral_norm(a) + spectral_norm(b) + 1e-12


@settings(max_examples=40, deadline=None)
@given(seed=seeds, dim=dims)
def test_ground_projector_sandwich(seed, dim):
    rng = np.random.default_rng(seed)
    op = HermitianOperator(random_hermitian(rng, dim))
    proj = ground_projector(op)
    sandwich = proj.entries @ op.entries @ proj.entries
    assert np.max(np.abs(sandwich - op.min_eigenvalue * proj.entries)) < 1e-9


@settings(max_examples=40, deadline=None)
@given(seed=seeds, dim=st.sampled_from([2, 4, 8]))
def test_trace_distance_triangle(seed, dim):
    rng = np.random.default_rng(seed)
    a = QuantumState.density(random_density_matrix(rng, dim))
    b = QuantumState.density(random_density_matrix(rng, dim))
    c = QuantumState.density(random_density_matrix(rng, dim))
    assert trace_distance(a, c) <= trace_distance(a, b) + trace_distance(b, c) + 1e-10
