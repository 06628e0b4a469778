"""Dense Hermitian linear algebra: eigensystems, PSD square roots, projectors, distances.

Everything here is dense and exact at desk scale (registers up to ~10 qubits).
All types are immutable after construction; eigendecompositions are cached
write-once on first use.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import (
    DimensionMismatch,
    NoGap,
    NonHermitianInput,
    NotPositiveSemidefinite,
)

HERMITICITY_TOL = 1e-12
PSD_CLIP_TOL = 1e-10
DEGENERACY_TOL = 1e-10
STATE_NORM_TOL = 1e-12
STATE_EIG_TOL = 1e-10


def _as_square_complex(entries) -> np.ndarray:
    arr = np.array(entries, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
        raise ValueError(f"expected a non-empty square matrix, got shape {arr.shape}")
    return arr


class HermitianOperator:
    """Immutable dense Hermitian matrix with a lazily cached eigensystem.

    Inputs within the Hermiticity tolerance are symmetrized to (A + A^dag)/2 at
    construction so round-off does not drift through long channel compositions.
    """

    def __init__(self, entries) -> None:
        arr = _as_square_complex(entries)
        deviation = float(np.max(np.abs(arr - arr.conj().T)))
        if deviation > HERMITICITY_TOL:
            raise NonHermitianInput(
                f"max |A - A^dag| entry = {deviation:.3e} exceeds {HERMITICITY_TOL:.0e}"
            )
        sym = (arr + arr.conj().T) / 2
        sym.setflags(write=False)
        self._entries = sym

    @property
    def entries(self) -> np.ndarray:
        return self._entries

    @property
    def dim(self) -> int:
        return self._entries.shape[0]

    @cached_property
    def _eigensystem(self) -> tuple[np.ndarray, np.ndarray]:
        vals, vecs = np.linalg.eigh(self._entries)
        vals.setflags(write=False)
        vecs.setflags(write=False)
        return vals, vecs

    @property
    def eigenvalues(self) -> np.ndarray:
        """Real eigenvalues in ascending order."""
        return self._eigensystem[0]

    @property
    def eigenvectors(self) -> np.ndarray:
        """Unitary matrix whose columns match `eigenvalues`."""
        return self._eigensystem[1]

    @property
    def min_eigenvalue(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def max_eigenvalue(self) -> float:
        return float(self.eigenvalues[-1])

    @classmethod
    def identity(cls, dim: int) -> "HermitianOperator":
        return cls(np.eye(dim, dtype=complex))

    def scaled(self, factor: float) -> "HermitianOperator":
        return HermitianOperator(self._entries * float(factor))

    def __add__(self, other: "HermitianOperator") -> "HermitianOperator":
        if not isinstance(other, HermitianOperator):
            return NotImplemented
        if other.dim != self.dim:
            raise DimensionMismatch(f"dims {self.dim} and {other.dim}")
        return HermitianOperator(self._entries + other._entries)

    def __sub__(self, other: "HermitianOperator") -> "HermitianOperator":
        if not isinstance(other, HermitianOperator):
            return NotImplemented
        if other.dim != self.dim:
            raise DimensionMismatch(f"dims {self.dim} and {other.dim}")
        return HermitianOperator(self._entries - other._entries)

    def __neg__(self) -> "HermitianOperator":
        return HermitianOperator(-self._entries)

    def __repr__(self) -> str:
        return f"HermitianOperator(dim={self.dim})"


class QuantumState:
    """State of an n-qubit register, stored as a pure vector or a density matrix."""

    __slots__ = ("_vector", "_rho", "_n_qubits")

    def __init__(self, *, vector: np.ndarray | None = None, rho: np.ndarray | None = None):
        # Direct construction trusts the caller (hot paths pass data that is
        # normalized by construction); use pure()/density() for validated input.
        if (vector is None) == (rho is None):
            raise ValueError("provide exactly one of vector/rho")
        dim = vector.shape[0] if vector is not None else rho.shape[0]
        n = int(dim).bit_length() - 1
        if 2**n != dim:
            raise ValueError(f"dimension {dim} is not a power of two")
        self._vector = vector
        self._rho = rho
        self._n_qubits = n

    @classmethod
    def pure(cls, vector) -> "QuantumState":
        vec = np.array(vector, dtype=complex).reshape(-1)
        norm = float(np.linalg.norm(vec))
        if abs(norm - 1.0) > STATE_NORM_TOL:
            raise ValueError(f"pure state norm {norm} is not 1 within {STATE_NORM_TOL:.0e}")
        vec = vec / norm
        vec.setflags(write=False)
        return cls(vector=vec)

    @classmethod
    def density(cls, matrix) -> "QuantumState":
        arr = _as_square_complex(matrix)
        dev = float(np.max(np.abs(arr - arr.conj().T)))
        if dev > STATE_NORM_TOL:
            raise ValueError(f"density matrix not Hermitian: deviation {dev:.3e}")
        arr = (arr + arr.conj().T) / 2
        evals = np.linalg.eigvalsh(arr)
        if float(evals[0]) < -STATE_EIG_TOL:
            raise ValueError(f"density matrix has eigenvalue {evals[0]:.3e} < -{STATE_EIG_TOL:.0e}")
        tr = float(np.trace(arr).real)
        if abs(tr - 1.0) > STATE_NORM_TOL:
            raise ValueError(f"density matrix trace {tr} is not 1 within {STATE_NORM_TOL:.0e}")
        arr = arr / tr
        arr.setflags(write=False)
        return cls(rho=arr)

    @classmethod
    def _density_unchecked(cls, matrix: np.ndarray) -> "QuantumState":
        # Hot path for channel compositions: PSD holds by construction, only
        # re-symmetrize and renormalize the trace.
        arr = (matrix + matrix.conj().T) / 2
        arr = arr / float(np.trace(arr).real)
        arr.setflags(write=False)
        return cls(rho=arr)

    @property
    def is_pure(self) -> bool:
        return self._vector is not None

    @property
    def n_qubits(self) -> int:
        return self._n_qubits

    @property
    def dim(self) -> int:
        return 2**self._n_qubits

    @property
    def vector(self) -> np.ndarray:
        if self._vector is None:
            raise ValueError("state is stored in density form")
        return self._vector

    @property
    def rho(self) -> np.ndarray:
        """Density-matrix view (outer product for pure states)."""
        if self._rho is not None:
            return self._rho
        return np.outer(self._vector, self._vector.conj())

    def to_density(self) -> "QuantumState":
        if self._rho is not None:
            return self
        return QuantumState._density_unchecked(self.rho)

    def __repr__(self) -> str:
        form = "pure" if self.is_pure else "density"
        return f"QuantumState(n_qubits={self._n_qubits}, form={form})"


@dataclass(frozen=True)
class Projector:
    """Orthogonal projector together with its rank.

    Idempotency plus Hermiticity forces the spectrum into {0, 1}; the trace
    check then pins the number of unit eigenvalues to `rank`.
    """

    operator: HermitianOperator
    rank: int

    def __post_init__(self) -> None:
        if self.rank < 1:
            raise ValueError("projector rank must be >= 1")
        p = self.operator.entries
        residual = float(np.max(np.abs(p @ p - p)))
        if residual > 1e-10:
            raise ValueError(f"not idempotent: max |P^2 - P| = {residual:.3e}")
        tr = float(np.trace(p).real)
        if abs(tr - self.rank) > 1e-8:
            raise ValueError(f"trace {tr} does not match rank {self.rank}")

    @property
    def entries(self) -> np.ndarray:
        return self.operator.entries

    @property
    def dim(self) -> int:
        return self.operator.dim

    def expectation(self, state: QuantumState) -> float:
        """Tr(P rho), clipped into [0, 1]."""
        if state.dim != self.dim:
            raise DimensionMismatch(f"projector dim {self.dim}, state dim {state.dim}")
        val = float(np.trace(self.entries @ state.rho).real)
        return min(1.0, max(0.0, val))


def eigendecompose(op: HermitianOperator) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and a unitary of matching eigenvectors."""
    return op.eigenvalues, op.eigenvectors


def psd_sqrt(op: HermitianOperator) -> HermitianOperator:
    """Operator square root of a PSD operator.

    Eigenvalues in [-PSD_CLIP_TOL, 0) are clipped to 0; anything below that
    raises NotPositiveSemidefinite.
    """
    vals, vecs = eigendecompose(op)
    if float(vals[0]) < -PSD_CLIP_TOL:
        raise NotPositiveSemidefinite(
            f"eigenvalue {vals[0]:.3e} below -{PSD_CLIP_TOL:.0e}"
        )
    clipped = np.clip(vals, 0.0, None)
    root = (vecs * np.sqrt(clipped)) @ vecs.conj().T
    return HermitianOperator(root)


def spectral_norm(op: HermitianOperator) -> float:
    """Largest absolute eigenvalue (the operator infinity-norm for Hermitian input)."""
    vals = op.eigenvalues
    return float(max(abs(vals[0]), abs(vals[-1])))


def trace_distance(a: QuantumState, b: QuantumState) -> float:
    """Half the sum of absolute eigenvalues of rho_a - rho_b."""
    if a.dim != b.dim:
        raise DimensionMismatch(f"state dims {a.dim} and {b.dim}")
    diff = a.rho - b.rho
    vals = np.linalg.eigvalsh((diff + diff.conj().T) / 2)
    return min(1.0, max(0.0, 0.5 * float(np.sum(np.abs(vals)))))


def ground_band_size(op: HermitianOperator, degeneracy_tol: float = DEGENERACY_TOL) -> int:
    """Number of eigenvalues within degeneracy_tol of the minimum.

    The band is anchored at the minimum eigenvalue, not at zero.
    """
    vals = op.eigenvalues
    return int(np.count_nonzero(vals <= vals[0] + degeneracy_tol))


def ground_space_basis(op: HermitianOperator, degeneracy_tol: float = DEGENERACY_TOL) -> np.ndarray:
    """Orthonormal columns spanning the ground band."""
    r = ground_band_size(op, degeneracy_tol)
    return op.eigenvectors[:, :r]


def ground_projector(op: HermitianOperator, degeneracy_tol: float = DEGENERACY_TOL) -> Projector:
    """Projector onto the span of eigenvectors in the ground band."""
    if degeneracy_tol <= 0:
        raise ValueError("degeneracy_tol must be positive")
    basis = ground_space_basis(op, degeneracy_tol)
    proj = basis @ basis.conj().T
    return Projector(HermitianOperator(proj), rank=basis.shape[1])


def spectral_gap(op: HermitianOperator, degeneracy_tol: float = DEGENERACY_TOL) -> float:
    """First eigenvalue above the ground band minus the minimum eigenvalue."""
    vals = op.eigenvalues
    r = ground_band_size(op, degeneracy_tol)
    if r == len(vals):
        raise NoGap("all eigenvalues lie within the ground band")
    return float(vals[r] - vals[0])
