import math

import numpy as np
import pytest

from zenopath import (
    FrustrationFreeHamiltonian,
    HermitianOperator,
    InterpolationPath,
    LocalTerm,
    analyze_schedule,
    gap_profile,
    required_steps,
    rotating_projector_path,
    stabilizer_path,
)
from zenopath.errors import NoGap


def diag_hamiltonian(diag):
    op = HermitianOperator(np.diag(diag).astype(complex))
    return FrustrationFreeHamiltonian(1, [LocalTerm((0,), op, 1.0)])


def constant_path(h=None):
    h = h or diag_hamiltonian([0.0, 1.0])
    return InterpolationPath.linear(h, h)


def gapless_path():
    zero = HermitianOperator(np.zeros((2, 2), dtype=complex))
    h = FrustrationFreeHamiltonian(1, [LocalTerm((0,), zero, 1.0)])
    return InterpolationPath.linear(h, h)


class TestAnalyzeSchedule:
    def test_rotating_quarter_turn(self):
        analysis = analyze_schedule(rotating_projector_path(math.pi / 2), 25)
        assert analysis.N == 25
        phi = math.pi / 50
        for record in analysis.per_step:
            assert record.gap == pytest.approx(1.0, abs=1e-12)
            assert record.delta_norm == pytest.approx(math.sin(phi), abs=1e-12)
        assert analysis.max_ratio == pytest.approx(math.sin(phi) ** 2, abs=1e-12)
        assert analysis.epsilon_bound == pytest.approx(25 * math.sin(phi) ** 2, abs=1e-12)
        assert analysis.epsilon_bound == pytest.approx(0.0986, abs=5e-5)

    def test_constant_path(self):
        analysis = analyze_schedule(constant_path(), 7)
        assert all(r.delta_norm == 0.0 for r in analysis.per_step)
        assert analysis.epsilon_bound == 0.0

    def test_single_step_definition(self):
        h_i = diag_hamiltonian([0.0, 1.0])
        h_f = diag_hamiltonian([0.0, 0.5])
        analysis = analyze_schedule(InterpolationPath.linear(h_i, h_f), 1)
        delta = np.max(
            np.abs(np.linalg.eigvalsh(h_f.assemble().entries - h_i.assemble().entries))
        )
        gap_f = h_f.spectral_gap()
        assert analysis.epsilon_bound == pytest.approx((delta / gap_f) ** 2, abs=1e-12)

    def test_gapless_step_raises_with_index(self):
        with pytest.raises(NoGap, match="n=1"):
            analyze_schedule(gapless_path(), 2)


class TestRequiredSteps:
    def test_rotating_quarter_turn(self):
        assert required_steps(rotating_projector_path(math.pi / 2), 0.1) == 25

    def test_constant_path(self):
        assert required_steps(constant_path(), 0.3) == 1

    def test_result_is_certified(self):
        path = rotating_projector_path(1.1)
        for eps in (0.2, 0.07, 0.013):
            n = required_steps(path, eps)
            assert analyze_schedule(path, n).epsilon_bound <= eps

    def test_halving_epsilon_doubles_n(self):
        path = rotating_projector_path(math.pi / 2)
        previous = required_steps(path, 0.1)
        for eps in (0.05, 0.025):
            current = required_steps(path, eps)
            assert abs(current - 2 * previous) <= 1
            previous = current

    def test_epsilon_validated(self):
        with pytest.raises(ValueError):
            required_steps(constant_path(), 0.0)

    def test_bound_non_increasing_in_n(self):
        path = rotating_projector_path(math.pi / 2)
        bounds = [analyze_schedule(path, n).epsilon_bound for n in (10, 20, 40, 80)]
        for coarse, fine in zip(bounds, bounds[1:]):
            assert fine <= coarse * 1.05


class TestGapProfile:
    def test_rotating_gap_is_one(self):
        for point in gap_profile(rotating_projector_path(math.pi / 2), 9):
            assert point.gap == pytest.approx(1.0, abs=1e-12)
            assert point.ground_energy == pytest.approx(0.0, abs=1e-12)

    def test_constant_profile(self):
        points = gap_profile(constant_path(), 5)
        assert all(p.gap == pytest.approx(1.0) for p in points)

    def test_matches_independent_diagonalization(self):
        path = stabilizer_path(["XI", "IX"], ["ZZ", "XX"], 2)
        points = gap_profile(path, 11)
        for p in points:
            vals = np.linalg.eigvalsh(path.at(p.s).assemble().entries)
            ground = vals[0]
            above = vals[vals > ground + 1e-10]
            assert p.ground_energy == pytest.approx(float(ground), abs=1e-12)
            assert p.gap == pytest.approx(float(above[0] - ground), abs=1e-12)

    def test_gapless_points_marked(self):
        points = gap_profile(gapless_path(), 4)
        assert all(p.gap is None for p in points)
        assert all(p.ground_energy == pytest.approx(0.0) for p in points)
