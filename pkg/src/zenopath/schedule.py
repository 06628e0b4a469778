"""Discretization analysis: per-step gap/step-norm ratios and step-count selection.

The controlling quantity per step is ||H_n - H_{n-1}||_inf^2 / gap(H_n)^2; a
sweep of N steps tolerates total failure probability N * max_ratio, so the
step count needed for a failure budget eps is found by probing the path and
validating (with doubling) until N * max_ratio <= eps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import NoGap, NonConvergent
from .hamiltonians import DiscretizedPath, InterpolationPath, discretize
from .spectral import DEGENERACY_TOL, spectral_norm

MAX_STEPS = 2**30
DEFAULT_PROBE = 64


@dataclass(frozen=True)
class ScheduleStep:
    n: int
    s: float
    gap: float
    delta_norm: float
    ratio: float


@dataclass(frozen=True)
class ScheduleAnalysis:
    """Per-step condition data for a given discretization."""

    N: int
    per_step: tuple[ScheduleStep, ...]
    max_ratio: float
    epsilon_bound: float


def _analyze_discretized(d: DiscretizedPath, degeneracy_tol: float) -> ScheduleAnalysis:
    N = d.N
    records = []
    prev = d.steps[0].assemble()
    for n in range(1, N + 1):
        step = d.steps[n]
        current = step.assemble()
        delta_norm = spectral_norm(current - prev)
        try:
            gap = step.spectral_gap(degeneracy_tol)
        except NoGap as exc:
            raise NoGap(f"no spectral gap at step n={n} (s={n / N})") from exc
        records.append(ScheduleStep(n, n / N, gap, delta_norm, (delta_norm / gap) ** 2))
        prev = current
    max_ratio = max(r.ratio for r in records)
    return ScheduleAnalysis(N, tuple(records), max_ratio, N * max_ratio)


def analyze_schedule(
    path: InterpolationPath, N: int, degeneracy_tol: float = DEGENERACY_TOL
) -> ScheduleAnalysis:
    """Gap, step norm, and their squared ratio for each of the N steps.

    epsilon_bound = N * max_ratio is the smallest failure budget for which
    this discretization satisfies the sweep condition.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    return _analyze_discretized(discretize(path, N), degeneracy_tol)


def required_steps(
    path: InterpolationPath,
    epsilon: float,
    N_probe: int = DEFAULT_PROBE,
    degeneracy_tol: float = DEGENERACY_TOL,
) -> int:
    """Step count certified to satisfy the sweep condition for budget epsilon.

    A probe discretization estimates max ||N dH||^2 / gap^2, which is nearly
    N-independent for smooth paths because N * (H_n - H_{n-1}) approaches the
    s-derivative. The candidate N = ceil(estimate / epsilon) is then validated
    directly and doubled until the bound actually holds, so the returned value
    is certified rather than asymptotic (doubling may overshoot the minimal N
    on paths where the probe underestimates).
    """
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    if N_probe < 1:
        raise ValueError("N_probe must be >= 1")
    probe = analyze_schedule(path, N_probe, degeneracy_tol)
    estimate = N_probe**2 * probe.max_ratio
    N = max(1, math.ceil(estimate / epsilon))
    while True:
        if analyze_schedule(path, N, degeneracy_tol).epsilon_bound <= epsilon:
            return N
        N *= 2
        if N > MAX_STEPS:
            raise NonConvergent(f"no certified N below {MAX_STEPS}")


@dataclass(frozen=True)
class GapPoint:
    """One sample of the gap profile; gap is None where the spectrum is fully degenerate."""

    s: float
    gap: float | None
    ground_energy: float


def gap_profile(
    path: InterpolationPath, n_samples: int, degeneracy_tol: float = DEGENERACY_TOL
) -> tuple[GapPoint, ...]:
    """Spectral gap and ground energy on a uniform grid over [0, 1]."""
    if n_samples < 2:
        raise ValueError("n_samples must be >= 2")
    points = []
    for i in range(n_samples):
        s = i / (n_samples - 1)
        h = path.at(s)
        try:
            gap = h.spectral_gap(degeneracy_tol)
        except NoGap:
            gap = None
        points.append(GapPoint(s, gap, h.ground_energy()))
    return tuple(points)
