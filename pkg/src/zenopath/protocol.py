"""Ground-state tracking along a discretized path, by exact projection or repeated measurement.

run_ideal measures the instantaneous ground-space projector at every step and
records per-step success probabilities against the gap/step-norm bound.
run_measured replaces each projection with k applications of the random-term
measurement operation, targeting a per-step trace distance of delta/(2N), and
optionally samples seeded pure-state trajectories for empirical statistics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    DegeneratePath,
    FrustrationFreeViolation,
    NoGap,
    ZeroGroundOverlap,
)
from .hamiltonians import (
    ASSEMBLY_FF_TOL,
    DiscretizedPath,
    FrustrationFreeHamiltonian,
    InterpolationPath,
    discretize,
)
from .measurement import (
    ADAPTIVE,
    RepetitionPolicy,
    apply_m_repeated,
    apply_m_trajectory,
)
from .schedule import ScheduleAnalysis, required_steps
from .spectral import (
    DEGENERACY_TOL,
    QuantumState,
    spectral_norm,
    trace_distance,
)

EXACT_CHANNEL = "exact-channel"
TRAJECTORY = "trajectory"
BOTH = "both"
_MODES = (EXACT_CHANNEL, TRAJECTORY, BOTH)

_MIN_PROBABILITY = 1e-14


@dataclass(frozen=True)
class ProtocolConfig:
    """Inputs of one protocol run.

    delta = 0 selects the idealized variant (exact projections); delta > 0
    selects the measured variant. When N is omitted it is certified via
    required_steps. All randomness derives from `seed`.
    """

    path: InterpolationPath
    epsilon: float
    delta: float = 0.0
    N: int | None = None
    repetition: RepetitionPolicy | None = None
    trajectories: int = 0
    seed: int = 0
    mode: str = EXACT_CHANNEL
    degeneracy_tol: float = DEGENERACY_TOL
    ff_tol: float = ASSEMBLY_FF_TOL
    enforce_frustration_free: bool = True

    def __post_init__(self) -> None:
        if not 0 < self.epsilon < 1:
            raise ValueError("epsilon must lie in (0, 1)")
        if not 0 <= self.delta < 1:
            raise ValueError("delta must lie in [0, 1)")
        if self.epsilon + self.delta >= 1:
            raise ValueError("epsilon + delta must be < 1")
        if self.mode not in _MODES:
            raise ValueError(f"mode must be one of {_MODES}")
        if self.N is not None and self.N < 1:
            raise ValueError("N must be >= 1 when given")
        if self.trajectories < 0:
            raise ValueError("trajectories must be >= 0")
        if self.seed < 0:
            raise ValueError("seed must be a non-negative integer")


@dataclass(frozen=True)
class StepRecord:
    n: int
    p_n: float
    epsilon_n: float
    bound_epsilon_n: float
    overlap_after: float
    k_used: int
    distance_to_ground: float


@dataclass(frozen=True)
class EmpiricalStats:
    rate: float
    std_error: float
    n_trajectories: int


@dataclass(frozen=True)
class ProtocolReport:
    """Everything a run produces; JSON round-trips via to_dict/from_dict."""

    N_used: int
    per_step: tuple[StepRecord, ...]
    overall_success_exact: float
    overall_success_empirical: EmpiricalStats | None
    success_lower_bound: float
    final_state_fidelity: float
    seed: int
    mode: str
    frustration_free: bool | None = None

    def to_dict(self) -> dict:
        return {
            "N_used": self.N_used,
            "per_step": [
                {
                    "n": r.n,
                    "p_n": r.p_n,
                    "epsilon_n": r.epsilon_n,
                    "bound_epsilon_n": r.bound_epsilon_n,
                    "overlap_after": r.overlap_after,
                    "k_used": r.k_used,
                    "distance_to_ground": r.distance_to_ground,
                }
                for r in self.per_step
            ],
            "overall_success_exact": self.overall_success_exact,
            "overall_success_empirical": (
                None
                if self.overall_success_empirical is None
                else {
                    "rate": self.overall_success_empirical.rate,
                    "std_error": self.overall_success_empirical.std_error,
                    "n_trajectories": self.overall_success_empirical.n_trajectories,
                }
            ),
            "success_lower_bound": self.success_lower_bound,
            "final_state_fidelity": self.final_state_fidelity,
            "seed": self.seed,
            "mode": self.mode,
            "frustration_free": self.frustration_free,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ProtocolReport":
        empirical = data["overall_success_empirical"]
        return cls(
            N_used=int(data["N_used"]),
            per_step=tuple(StepRecord(**row) for row in data["per_step"]),
            overall_success_exact=float(data["overall_success_exact"]),
            overall_success_empirical=(
                None if empirical is None else EmpiricalStats(**empirical)
            ),
            success_lower_bound=float(data["success_lower_bound"]),
            final_state_fidelity=float(data["final_state_fidelity"]),
            seed=int(data["seed"]),
            mode=str(data["mode"]),
            frustration_free=data["frustration_free"],
        )


def _resolve_steps(config: ProtocolConfig) -> DiscretizedPath:
    N = config.N
    if N is None:
        N = required_steps(config.path, config.epsilon, degeneracy_tol=config.degeneracy_tol)
    return discretize(config.path, N)


def _initial_mixed_state(h: FrustrationFreeHamiltonian, tol: float) -> QuantumState:
    proj = h.ground_projector(tol)
    return QuantumState._density_unchecked(proj.entries / proj.rank)


def _sample_ground_vector(basis: np.ndarray, rng: np.random.Generator) -> QuantumState:
    r = basis.shape[1]
    z = rng.normal(size=r) + 1j * rng.normal(size=r)
    vec = basis @ z
    return QuantumState(vector=vec / np.linalg.norm(vec))


def _frustration_residual(steps: DiscretizedPath) -> float:
    return max(h.ground_energy() for h in steps.steps)


def _empirical(successes: int, total: int) -> EmpiricalStats:
    rate = successes / total
    return EmpiricalStats(rate, math.sqrt(rate * (1 - rate) / total), total)


def run_ideal(config: ProtocolConfig) -> ProtocolReport:
    """Sweep with exact ground-space projections at every step.

    The initial state is the (possibly degenerate) ground state of the first
    Hamiltonian: the normalized ground projector in the exact pass, a
    uniformly drawn ground vector per trajectory. Each per-step failure
    epsilon_n is checked against the operator bound (step norm / gap)^2.
    """
    d = _resolve_steps(config)
    N = d.N
    tol = config.degeneracy_tol
    ff = _frustration_residual(d) <= config.ff_tol

    rho = _initial_mixed_state(d.steps[0], tol)
    records: list[StepRecord] = []
    overall = 1.0
    bound_sum = 0.0
    prev_assembled = d.steps[0].assemble()
    projectors = []
    for n in range(1, N + 1):
        h = d.steps[n]
        assembled = h.assemble()
        delta_norm = spectral_norm(assembled - prev_assembled)
        try:
            gap = h.spectral_gap(tol)
        except NoGap as exc:
            raise NoGap(f"no spectral gap at step n={n}") from exc
        bound = (delta_norm / gap) ** 2
        proj = h.ground_projector(tol)
        projectors.append(proj)
        p_n = proj.expectation(rho)
        if p_n <= _MIN_PROBABILITY:
            raise ZeroGroundOverlap(f"state has no overlap with the ground space at step {n}")
        rho = QuantumState._density_unchecked(proj.entries @ rho.rho @ proj.entries)
        eps_n = 1.0 - p_n
        if ff:  # the operator bound is proven for interpolants with ground energy 0
            assert eps_n <= bound + 1e-9, f"step {n}: failure {eps_n} above bound {bound}"
        overlap_after = proj.expectation(rho)
        records.append(StepRecord(n, p_n, eps_n, bound, overlap_after, 0, 0.0))
        overall *= p_n
        bound_sum += bound
        prev_assembled = assembled

    lower = max(0.0, 1.0 - bound_sum)
    if config.N is None:
        assert overall >= 1 - config.epsilon - 1e-9, (
            f"certified N={N} but success {overall} below 1 - epsilon"
        )
    fidelity = projectors[-1].expectation(rho) if projectors else 1.0

    empirical = None
    if config.mode in (TRAJECTORY, BOTH) and config.trajectories > 0:
        basis0 = d.steps[0].ground_basis(tol)
        successes = 0
        for t in range(config.trajectories):
            rng = np.random.default_rng([config.seed, t])
            psi = _sample_ground_vector(basis0, rng)
            survived = True
            for proj in projectors:
                vec = proj.entries @ psi.vector
                p = min(1.0, float(np.vdot(vec, vec).real))
                if rng.random() >= p:
                    survived = False
                    break
                psi = QuantumState(vector=vec / math.sqrt(p))
            successes += survived
        empirical = _empirical(successes, config.trajectories)

    return ProtocolReport(
        N_used=N,
        per_step=tuple(records),
        overall_success_exact=overall,
        overall_success_empirical=empirical,
        success_lower_bound=lower,
        final_state_fidelity=fidelity,
        seed=config.seed,
        mode=config.mode,
        frustration_free=ff,
    )


def _resolve_policy(config: ProtocolConfig, N: int) -> RepetitionPolicy:
    default_target = config.delta / (2 * N)
    policy = config.repetition
    if policy is None:
        return RepetitionPolicy.adaptive(
            alpha=math.log(4 * N / config.delta), target_distance=default_target
        )
    if policy.mode == ADAPTIVE and policy.target_distance is None:
        return RepetitionPolicy.adaptive(
            alpha=policy.alpha, target_distance=default_target, k_max=policy.k_max
        )
    return policy


def run_measured(config: ProtocolConfig) -> ProtocolReport:
    """Sweep with each projection replaced by repeated term measurements.

    Requires delta > 0. Adaptive repetition targets trace distance
    delta/(2N) to the normalized ground-space projection of the incoming
    state. Steps whose Hamiltonian is not frustration-free invalidate the
    repeated-measurement guarantee; by default such paths raise
    FrustrationFreeViolation, or they run flagged when
    enforce_frustration_free is off.
    """
    if config.delta <= 0:
        raise ValueError("run_measured requires delta > 0; use run_ideal for delta = 0")
    d = _resolve_steps(config)
    N = d.N
    tol = config.degeneracy_tol
    policy = _resolve_policy(config, N)

    residual = _frustration_residual(d)
    ff = residual <= config.ff_tol
    if not ff and config.enforce_frustration_free:
        raise FrustrationFreeViolation(
            f"ground-energy residual {residual:.3e} along the path exceeds {config.ff_tol:.0e}; "
            "the repeated-measurement guarantee does not apply (run is flagged and excluded)"
        )

    rho = _initial_mixed_state(d.steps[0], tol)
    records: list[StepRecord] = []
    overall = 1.0
    bound_sum = 0.0
    targets_met = True
    k_schedule: list[int] = []
    prev_assembled = d.steps[0].assemble()
    for n in range(1, N + 1):
        h = d.steps[n]
        assembled = h.assemble()
        delta_norm = spectral_norm(assembled - prev_assembled)
        gap = h.spectral_gap(tol)
        bound = (delta_norm / gap) ** 2
        proj = h.ground_projector(tol)
        overlap_before = proj.expectation(rho)
        target = QuantumState._density_unchecked(proj.entries @ rho.rho @ proj.entries)
        result = apply_m_repeated(h, rho, policy)
        rho = result.state
        p_n = result.cumulative_success
        if ff:  # the step lower bound only holds when H_n annihilates its ground space
            assert p_n >= overlap_before - 1e-9, (
                f"step {n}: success {p_n} below incoming ground overlap {overlap_before}"
            )
        distance = trace_distance(rho, target)
        if policy.mode == ADAPTIVE and distance > policy.target_distance + 1e-12:
            targets_met = False
        records.append(
            StepRecord(
                n, p_n, 1.0 - p_n, bound, proj.expectation(rho), result.k_used, distance
            )
        )
        k_schedule.append(result.k_used)
        overall *= p_n
        bound_sum += bound
        prev_assembled = assembled

    lower = max(0.0, 1.0 - bound_sum)
    certified = config.N is None and policy.mode == ADAPTIVE and targets_met
    if certified:
        assert overall >= 1 - config.epsilon - config.delta - 1e-6, (
            f"success {overall} below 1 - epsilon - delta with per-step targets met"
        )
    fidelity = d.steps[N].ground_projector(tol).expectation(rho)

    empirical = None
    if config.mode in (TRAJECTORY, BOTH) and config.trajectories > 0:
        empirical = _run_trajectories(config, d, k_schedule)
        if certified:
            floor = 1 - config.epsilon - config.delta - 3 * empirical.std_error
            assert empirical.rate >= floor, (
                f"empirical rate {empirical.rate} below {floor}"
            )

    return ProtocolReport(
        N_used=N,
        per_step=tuple(records),
        overall_success_exact=overall,
        overall_success_empirical=empirical,
        success_lower_bound=lower,
        final_state_fidelity=fidelity,
        seed=config.seed,
        mode=config.mode,
        frustration_free=ff,
    )


def _run_trajectories(
    config: ProtocolConfig, d: DiscretizedPath, k_schedule: Sequence[int]
) -> EmpiricalStats:
    """Independent seeded pure-state runs using the exact pass's k schedule.

    A rejected measurement anywhere aborts the trajectory; only the aggregate
    no-failure rate is reported, matching the probability the exact pass
    multiplies out.
    """
    basis0 = d.steps[0].ground_basis(config.degeneracy_tol)
    successes = 0
    for t in range(config.trajectories):
        rng = np.random.default_rng([config.seed, t])
        psi = _sample_ground_vector(basis0, rng)
        survived = True
        for n in range(1, d.N + 1):
            h = d.steps[n]
            for _ in range(k_schedule[n - 1]):
                psi, outcome = apply_m_trajectory(h, psi, rng)
                if not outcome.success:
                    survived = False
                    break
            if not survived:
                break
        successes += survived
    return _empirical(successes, config.trajectories)


def run(config: ProtocolConfig) -> ProtocolReport:
    """Dispatch on delta: 0 runs the idealized variant, positive the measured one."""
    if config.delta == 0:
        return run_ideal(config)
    return run_measured(config)


def compute_conventional_time(analysis: ScheduleAnalysis) -> float:
    """Diagnostic time scale N / max_n ||N (H_n - H_{n-1})||, no dynamics attached."""
    max_delta = max(r.delta_norm for r in analysis.per_step)
    if max_delta <= 1e-15:
        raise DegeneratePath("all step differences vanish")
    return analysis.N / (analysis.N * max_delta)
