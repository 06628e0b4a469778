"""Per-term POVM measurements and the random-term measurement operation.

The operation draws term i with probability w_i and measures the pair
(sqrt(I - H_i), sqrt(H_i)). Its success probability on rho is 1 - Tr(H rho),
and conditioning on success multiplies the ground-space overlap by
1/(1 - Tr(H rho)). Two backends are provided: the exact success-conditioned
density-matrix channel, and stochastic pure-state trajectories.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import (
    DimensionMismatch,
    KMaxExceeded,
    NotNormalizedTerm,
    ZeroGroundOverlap,
    ZeroSuccessProbability,
)
from .hamiltonians import FrustrationFreeHamiltonian, LocalTerm, embed_on_qubits
from .spectral import HermitianOperator, QuantumState, psd_sqrt, trace_distance

POVM_COMPLETENESS_TOL = 1e-9
_PROJECTIVE_TOL = 1e-10
_MIN_PROBABILITY = 1e-14

FIXED_K = "fixed-k"
ADAPTIVE = "adaptive"


class PovmPair:
    """Accept/reject measurement operators for one local term.

    Operators are stored on the term's support; embeddings into the full
    register are built on demand and cached per register size.
    """

    def __init__(
        self,
        term_index: int,
        support: tuple[int, ...],
        accept: HermitianOperator,
        reject: HermitianOperator,
    ) -> None:
        self.term_index = term_index
        self.support = support
        self.accept = accept
        self.reject = reject
        self._full_cache: dict[int, tuple[np.ndarray, np.ndarray]] = {}

    def _full(self, n_qubits: int) -> tuple[np.ndarray, np.ndarray]:
        cached = self._full_cache.get(n_qubits)
        if cached is None:
            cached = (
                embed_on_qubits(self.accept.entries, self.support, n_qubits),
                embed_on_qubits(self.reject.entries, self.support, n_qubits),
            )
            self._full_cache[n_qubits] = cached
        return cached

    def accept_full(self, n_qubits: int) -> np.ndarray:
        return self._full(n_qubits)[0]

    def reject_full(self, n_qubits: int) -> np.ndarray:
        return self._full(n_qubits)[1]


@dataclass(frozen=True)
class MeasurementOutcome:
    """One sampled application: chosen term, branch taken, and the accept probability."""

    success: bool
    term_index: int
    pre_success_probability: float

    def __post_init__(self) -> None:
        if not -1e-12 <= self.pre_success_probability <= 1 + 1e-12:
            raise ValueError(
                f"probability {self.pre_success_probability} outside [0, 1]"
            )


@dataclass(frozen=True)
class RepetitionPolicy:
    """How many times to repeat the measurement operation per protocol step.

    fixed-k applies the channel exactly k times. adaptive starts from
    ceil(alpha / gap) applications and keeps going until the state is within
    target_distance (trace distance) of the normalized ground-space projection
    of the input, capped at k_max.
    """

    mode: str
    k: int | None = None
    alpha: float | None = None
    target_distance: float | None = None
    k_max: int = 100_000

    def __post_init__(self) -> None:
        if self.mode == FIXED_K:
            if self.k is None or self.k < 1:
                raise ValueError("fixed-k policy requires k >= 1")
            if self.k_max < self.k:
                raise ValueError("k_max must be >= k")
        elif self.mode == ADAPTIVE:
            if self.alpha is None or self.alpha <= 0:
                raise ValueError("adaptive policy requires alpha > 0")
            if self.target_distance is not None and self.target_distance <= 0:
                raise ValueError("target_distance must be positive")
            if self.k_max < 1:
                raise ValueError("k_max must be >= 1")
        else:
            raise ValueError(f"unknown repetition mode {self.mode!r}")

    @classmethod
    def fixed(cls, k: int, k_max: int | None = None) -> "RepetitionPolicy":
        return cls(mode=FIXED_K, k=k, k_max=k_max if k_max is not None else k)

    @classmethod
    def adaptive(
        cls, alpha: float, target_distance: float | None = None, k_max: int = 100_000
    ) -> "RepetitionPolicy":
        return cls(mode=ADAPTIVE, alpha=alpha, target_distance=target_distance, k_max=k_max)


def build_povm(term: LocalTerm, term_index: int = 0) -> PovmPair:
    """POVM pair (sqrt(I - H_i), sqrt(H_i)) for one normalized term.

    When the term spectrum is {0, 1} the pair degenerates to the projective
    measurement (I - H_i, H_i) and is built without square roots.
    """
    vals = term.operator.eigenvalues
    lo, hi = float(vals[0]), float(vals[-1])
    if lo < -_PROJECTIVE_TOL or hi > 1 + _PROJECTIVE_TOL or lo > _PROJECTIVE_TOL:
        raise NotNormalizedTerm(f"term spectrum [{lo:.3e}, {hi:.3e}] not in [0, 1] with min 0")
    dim = term.operator.dim
    identity = np.eye(dim)
    if bool(np.all(np.minimum(np.abs(vals), np.abs(vals - 1.0)) <= _PROJECTIVE_TOL)):
        accept = HermitianOperator(identity - term.operator.entries)
        reject = term.operator
    else:
        accept = psd_sqrt(HermitianOperator(identity - term.operator.entries))
        reject = psd_sqrt(term.operator)
    pair = PovmPair(term_index, term.support, accept, reject)
    completeness = np.max(
        np.abs(accept.entries @ accept.entries + reject.entries @ reject.entries - identity)
    )
    if completeness > POVM_COMPLETENESS_TOL:
        raise ValueError(f"POVM completeness residual {completeness:.3e}")
    return pair


def povm_ensemble(h: FrustrationFreeHamiltonian) -> tuple[PovmPair, ...]:
    """POVM pairs for every term of h, cached write-once on the Hamiltonian."""
    pairs = getattr(h, "_povm_pairs", None)
    if pairs is None:
        pairs = tuple(build_povm(t, i) for i, t in enumerate(h.terms))
        h._povm_pairs = pairs
    return pairs


def _weight_cumsum(h: FrustrationFreeHamiltonian) -> np.ndarray:
    cum = getattr(h, "_weight_cumsum", None)
    if cum is None:
        cum = np.cumsum(np.array(h.weights, dtype=float))
        h._weight_cumsum = cum
    return cum


def success_probability(h: FrustrationFreeHamiltonian, rho: QuantumState) -> float:
    """p = 1 - Tr(H rho)."""
    if rho.dim != h.dim:
        raise DimensionMismatch(f"hamiltonian dim {h.dim}, state dim {rho.dim}")
    val = 1.0 - float(np.trace(h.assemble().entries @ rho.rho).real)
    return min(1.0, max(0.0, val))


def apply_m_channel(
    h: FrustrationFreeHamiltonian, rho: QuantumState
) -> tuple[QuantumState, float]:
    """Success-conditioned channel: sum_i w_i E_i rho E_i, renormalized.

    Returns the conditioned state and the success probability 1 - Tr(H rho).
    """
    p = success_probability(h, rho)
    if p <= _MIN_PROBABILITY:
        raise ZeroSuccessProbability(f"success probability {p:.3e}")
    n = h.n_qubits
    dense = rho.rho
    out = np.zeros_like(dense)
    for term, pair in zip(h.terms, povm_ensemble(h)):
        e = pair.accept_full(n)
        out += term.weight * (e @ dense @ e)
    return QuantumState._density_unchecked(out / p), p


def apply_m_trajectory(
    h: FrustrationFreeHamiltonian, psi: QuantumState, rng: np.random.Generator
) -> tuple[QuantumState, MeasurementOutcome]:
    """One stochastic application on a pure state.

    Samples term i with probability w_i, then the accept branch with
    probability ||E_i psi||^2. A reject outcome is a recorded failure, not an
    exception; recovery strategies are the caller's business.
    """
    if not psi.is_pure:
        raise ValueError("trajectory backend requires a pure state")
    if psi.dim != h.dim:
        raise DimensionMismatch(f"hamiltonian dim {h.dim}, state dim {psi.dim}")
    n = h.n_qubits
    cum = _weight_cumsum(h)
    i = int(np.searchsorted(cum, rng.random(), side="right"))
    i = min(i, h.m - 1)
    pair = povm_ensemble(h)[i]
    accepted = pair.accept_full(n) @ psi.vector
    p_acc = min(1.0, float(np.vdot(accepted, accepted).real))
    outcome_is_success = rng.random() < p_acc
    if outcome_is_success:
        vec = accepted / math.sqrt(p_acc)
    else:
        rejected = pair.reject_full(n) @ psi.vector
        nrm = float(np.linalg.norm(rejected))
        if nrm <= 1e-150:
            raise ZeroSuccessProbability("reject branch drawn with vanishing amplitude")
        vec = rejected / nrm
    state = QuantumState(vector=vec)
    return state, MeasurementOutcome(outcome_is_success, i, p_acc)


class RepeatedResult(NamedTuple):
    state: QuantumState
    k_used: int
    cumulative_success: float
    overlap_trace: tuple[float, ...]


def apply_m_repeated(
    h: FrustrationFreeHamiltonian, rho: QuantumState, policy: RepetitionPolicy
) -> RepeatedResult:
    """k-fold success-conditioned channel with the ground overlap recorded per step.

    overlap_trace[l] is Tr(P_gs rho) after l applications (entry 0 is the
    input overlap). cumulative_success is the product of per-application
    success probabilities, which equals the probability that all k raw
    measurements accept.
    """
    proj = h.ground_projector()
    state = rho.to_density()
    overlap = proj.expectation(state)
    if overlap <= _MIN_PROBABILITY:
        raise ZeroGroundOverlap(f"ground overlap {overlap:.3e}")
    trace = [overlap]
    cumulative = 1.0

    if policy.mode == FIXED_K:
        for _ in range(policy.k):
            state, p = apply_m_channel(h, state)
            cumulative *= p
            trace.append(proj.expectation(state))
        return RepeatedResult(state, policy.k, cumulative, tuple(trace))

    if policy.target_distance is None:
        raise ValueError("adaptive policy used without a resolved target_distance")
    gap = h.spectral_gap()
    k_start = max(1, math.ceil(policy.alpha / gap))
    target_mat = proj.entries @ state.rho @ proj.entries
    target = QuantumState._density_unchecked(target_mat)
    k = 0
    while k < policy.k_max:
        state, p = apply_m_channel(h, state)
        cumulative *= p
        k += 1
        trace.append(proj.expectation(state))
        if k >= k_start and trace_distance(state, target) <= policy.target_distance:
            return RepeatedResult(state, k, cumulative, tuple(trace))
    raise KMaxExceeded(
        f"distance {trace_distance(state, target):.3e} above target "
        f"{policy.target_distance:.3e} after k_max = {policy.k_max} applications"
    )
