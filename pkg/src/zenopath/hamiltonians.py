"""Frustration-free Hamiltonians as weighted sums of normalized local terms.

Conventions fixed here and shared by every other module:
  * each local term has spectrum inside [0, 1] with minimum eigenvalue 0,
  * term weights are strictly positive and sum to 1,
  * qubit index 0 is the most significant tensor factor of the register.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import cached_property
from types import MappingProxyType
from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import IndexOutOfRange, NotNormalizedTerm, SupportOutOfRange
from .spectral import (
    DEGENERACY_TOL,
    HermitianOperator,
    Projector,
    ground_projector,
    ground_space_basis,
    spectral_gap,
    spectral_norm,
)

TERM_SPECTRUM_TOL = 1e-10
WEIGHT_SUM_TOL = 1e-12
ASSEMBLY_FF_TOL = 1e-9

LINEAR = "linear"
CUSTOM_SAMPLED = "custom-sampled"


def embed_on_qubits(local: np.ndarray, support: Sequence[int], n_qubits: int) -> np.ndarray:
    """Embed a 2^k x 2^k operator acting on `support` into the full register.

    Factor j of `local` acts on qubit support[j]; qubit 0 is the most
    significant tensor factor of the result.
    """
    support = tuple(int(q) for q in support)
    k = len(support)
    if len(set(support)) != k:
        raise SupportOutOfRange(f"support {support} has repeated qubits")
    if any(q < 0 or q >= n_qubits for q in support):
        raise SupportOutOfRange(f"support {support} outside 0..{n_qubits - 1}")
    if local.shape != (2**k, 2**k):
        raise ValueError(f"operator shape {local.shape} does not match support size {k}")
    if support == tuple(range(n_qubits)):
        return np.array(local, dtype=complex)
    rest = [q for q in range(n_qubits) if q not in set(support)]
    order = list(support) + rest
    full = np.kron(local, np.eye(2 ** (n_qubits - k), dtype=complex))
    axis_of_qubit = {q: j for j, q in enumerate(order)}
    perm = [axis_of_qubit[q] for q in range(n_qubits)]
    tensor = full.reshape((2,) * (2 * n_qubits))
    tensor = tensor.transpose(perm + [n_qubits + p for p in perm])
    return np.ascontiguousarray(tensor.reshape(2**n_qubits, 2**n_qubits))


def normalize_term(raw: HermitianOperator) -> HermitianOperator:
    """Affinely rescale so the spectrum spans [0, 1] with minimum exactly 0.

    Operators proportional to the identity carry no information and map to the
    zero operator of the same dimension.
    """
    lo, hi = raw.min_eigenvalue, raw.max_eigenvalue
    span = hi - lo
    if span <= 1e-14 * max(1.0, abs(hi)):
        return HermitianOperator(np.zeros((raw.dim, raw.dim), dtype=complex))
    shifted = raw.entries - lo * np.eye(raw.dim)
    return HermitianOperator(shifted / span)


@dataclass(frozen=True)
class LocalTerm:
    """Normalized Hermitian operator on a subset of qubits, with weight > 0."""

    support: tuple[int, ...]
    operator: HermitianOperator
    weight: float

    def __post_init__(self) -> None:
        support = tuple(int(q) for q in self.support)
        object.__setattr__(self, "support", support)
        if len(support) == 0 or len(set(support)) != len(support):
            raise ValueError(f"support must be non-empty and distinct, got {support}")
        if any(q < 0 for q in support):
            raise SupportOutOfRange(f"negative qubit index in {support}")
        if self.operator.dim != 2 ** len(support):
            raise ValueError(
                f"operator dim {self.operator.dim} does not match support size {len(support)}"
            )
        if not self.weight > 0:
            raise ValueError(f"weight must be positive, got {self.weight}")
        lo, hi = self.operator.min_eigenvalue, self.operator.max_eigenvalue
        if lo < -TERM_SPECTRUM_TOL or hi > 1 + TERM_SPECTRUM_TOL or lo > TERM_SPECTRUM_TOL:
            raise NotNormalizedTerm(
                f"term spectrum [{lo:.3e}, {hi:.3e}] not normalized to [0, 1] with min 0"
            )

    def embedded(self, n_qubits: int) -> np.ndarray:
        return embed_on_qubits(self.operator.entries, self.support, n_qubits)


class FrustrationFreeHamiltonian:
    """Weighted sum H = sum_i w_i H_i of normalized local terms, sum w_i = 1.

    Frustration-freeness (ground energy 0) is a property to verify, not an
    assumption: `is_frustration_free` computes it from the assembled operator
    unless a generator recorded the answer analytically.
    """

    def __init__(
        self,
        n_qubits: int,
        terms: Sequence[LocalTerm],
        degeneracy_tol: float = DEGENERACY_TOL,
        metadata: Mapping | None = None,
    ) -> None:
        if n_qubits < 1:
            raise ValueError("n_qubits must be >= 1")
        terms = tuple(terms)
        if not terms:
            raise ValueError("at least one term is required")
        for t in terms:
            if max(t.support) >= n_qubits:
                raise SupportOutOfRange(
                    f"support {t.support} outside register of {n_qubits} qubits"
                )
        total = float(sum(t.weight for t in terms))
        if abs(total - 1.0) > WEIGHT_SUM_TOL:
            raise ValueError(f"term weights sum to {total!r}, expected 1")
        self._n_qubits = int(n_qubits)
        self._terms = terms
        self._degeneracy_tol = float(degeneracy_tol)
        self._metadata = dict(metadata) if metadata else {}
        self._ff_flag: bool | None = None

    @property
    def n_qubits(self) -> int:
        return self._n_qubits

    @property
    def dim(self) -> int:
        return 2**self._n_qubits

    @property
    def terms(self) -> tuple[LocalTerm, ...]:
        return self._terms

    @property
    def m(self) -> int:
        return len(self._terms)

    @property
    def weights(self) -> tuple[float, ...]:
        return tuple(t.weight for t in self._terms)

    @property
    def degeneracy_tol(self) -> float:
        return self._degeneracy_tol

    @property
    def metadata(self) -> Mapping:
        return MappingProxyType(self._metadata)

    @cached_property
    def _assembled(self) -> HermitianOperator:
        total = np.zeros((self.dim, self.dim), dtype=complex)
        for t in self._terms:
            total += t.weight * t.embedded(self._n_qubits)
        return HermitianOperator(total)

    def assemble(self) -> HermitianOperator:
        return self._assembled

    def ground_energy(self) -> float:
        return self._assembled.min_eigenvalue

    def ground_projector(self, degeneracy_tol: float | None = None) -> Projector:
        return ground_projector(self._assembled, degeneracy_tol or self._degeneracy_tol)

    def ground_basis(self, degeneracy_tol: float | None = None) -> np.ndarray:
        return ground_space_basis(self._assembled, degeneracy_tol or self._degeneracy_tol)

    def spectral_gap(self, degeneracy_tol: float | None = None) -> float:
        return spectral_gap(self._assembled, degeneracy_tol or self._degeneracy_tol)

    def is_frustration_free(self, tol: float = ASSEMBLY_FF_TOL) -> bool:
        if self._ff_flag is not None:
            return self._ff_flag
        flag = self.ground_energy() <= tol
        self._ff_flag = flag
        return flag

    def _mark_frustration_free(self, value: bool) -> None:
        # Write-once hook for generators that know the answer analytically
        # (for example from a satisfiability check that never assembles H).
        if self._ff_flag is None:
            self._ff_flag = bool(value)

    def __repr__(self) -> str:
        return f"FrustrationFreeHamiltonian(n_qubits={self._n_qubits}, m={self.m})"


def assemble_full(h: FrustrationFreeHamiltonian) -> HermitianOperator:
    """Dense 2^n x 2^n operator sum_i w_i (H_i embedded on its support)."""
    return h.assemble()


class InterpolationPath:
    """Family H(s), s in [0, 1], joining two Hamiltonians on the same register.

    Linear paths mix the endpoint term lists with weights (1-s) and s, which
    keeps every instantaneous Hamiltonian a weighted term sum that individual
    term measurements can sample. Custom paths delegate to a sampler; the
    endpoints are always returned exactly.
    """

    def __init__(
        self,
        initial: FrustrationFreeHamiltonian,
        final: FrustrationFreeHamiltonian,
        kind: str,
        sampler: Callable[[float], FrustrationFreeHamiltonian] | None = None,
        ff_report=None,
    ) -> None:
        if initial.n_qubits != final.n_qubits:
            raise ValueError("endpoints act on different registers")
        if kind not in (LINEAR, CUSTOM_SAMPLED):
            raise ValueError(f"unknown path kind {kind!r}")
        if kind == CUSTOM_SAMPLED:
            if sampler is None:
                raise ValueError("custom-sampled path requires a sampler")
            for s, ref in ((0.0, initial), (1.0, final)):
                dev = np.max(np.abs(sampler(s).assemble().entries - ref.assemble().entries))
                if dev > 1e-12:
                    raise ValueError(f"sampler({s}) deviates from declared endpoint by {dev:.3e}")
        self.initial = initial
        self.final = final
        self.kind = kind
        self._sampler = sampler
        self.ff_report = ff_report

    @classmethod
    def linear(cls, initial, final) -> "InterpolationPath":
        return cls(initial, final, LINEAR)

    @classmethod
    def from_sampler(cls, initial, final, sampler) -> "InterpolationPath":
        return cls(initial, final, CUSTOM_SAMPLED, sampler=sampler)

    @property
    def n_qubits(self) -> int:
        return self.initial.n_qubits

    def at(self, s: float) -> FrustrationFreeHamiltonian:
        s = float(s)
        if s < -1e-12 or s > 1 + 1e-12:
            raise ValueError(f"s = {s} outside [0, 1]")
        s = min(1.0, max(0.0, s))
        if s == 0.0:
            return self.initial
        if s == 1.0:
            return self.final
        if self.kind == CUSTOM_SAMPLED:
            return self._sampler(s)
        terms = tuple(replace(t, weight=t.weight * (1 - s)) for t in self.initial.terms)
        terms += tuple(replace(t, weight=t.weight * s) for t in self.final.terms)
        return FrustrationFreeHamiltonian(
            self.n_qubits, terms, degeneracy_tol=self.initial.degeneracy_tol
        )

    def __repr__(self) -> str:
        return f"InterpolationPath(kind={self.kind!r}, n_qubits={self.n_qubits})"


@dataclass(frozen=True)
class DiscretizedPath:
    """Hamiltonians at s_n = n/N for n = 0..N."""

    steps: tuple[FrustrationFreeHamiltonian, ...]

    def __post_init__(self) -> None:
        if len(self.steps) < 2:
            raise ValueError("a discretized path has at least two entries (N >= 1)")

    @property
    def N(self) -> int:
        return len(self.steps) - 1


def discretize(path: InterpolationPath, N: int) -> DiscretizedPath:
    """Evaluate the path on the uniform grid n/N with exact endpoints."""
    if N < 1:
        raise ValueError("N must be >= 1")
    steps = [path.initial]
    steps += [path.at(n / N) for n in range(1, N)]
    steps.append(path.final)
    return DiscretizedPath(tuple(steps))


def step_difference_norm(d: DiscretizedPath, n: int) -> float:
    """Spectral norm of H_n - H_{n-1} on the assembled operators."""
    if n < 1 or n > d.N:
        raise IndexOutOfRange(f"step index {n} outside 1..{d.N}")
    return spectral_norm(d.steps[n].assemble() - d.steps[n - 1].assemble())


@dataclass(frozen=True)
class FrustrationFreeReport:
    """Grid check of ground energies along a path."""

    passed: bool
    max_residual: float
    worst_s: float
    n_samples: int
    tol: float
    residuals: tuple[tuple[float, float], ...]

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "max_residual": self.max_residual,
            "worst_s": self.worst_s,
            "n_samples": self.n_samples,
            "tol": self.tol,
            "residuals": [list(pair) for pair in self.residuals],
        }


def verify_frustration_free(
    path: InterpolationPath, n_samples: int = 33, tol: float = ASSEMBLY_FF_TOL
) -> FrustrationFreeReport:
    """Sample ground energies on a uniform grid; pass iff all are <= tol.

    Failure is a report outcome, not an exception: paths that leave the
    frustration-free regime are legitimate diagnostic inputs.
    """
    if n_samples < 2:
        raise ValueError("n_samples must be >= 2")
    residuals = []
    for i in range(n_samples):
        s = i / (n_samples - 1)
        residuals.append((s, path.at(s).ground_energy()))
    worst_s, max_residual = max(residuals, key=lambda pair: pair[1])
    return FrustrationFreeReport(
        passed=max_residual <= tol,
        max_residual=max_residual,
        worst_s=worst_s,
        n_samples=n_samples,
        tol=tol,
        residuals=tuple(residuals),
    )
