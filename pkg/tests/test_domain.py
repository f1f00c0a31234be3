import numpy as np
import pytest
from hypothesis import given, strategies as st

from orgsim.domain import (
    HIGH_MISMATCH,
    REGIMES,
    TRANSFERABLE,
    CompetenceVector,
    Regime,
    RoleProfile,
    compute_performance,
    performance_at_levels,
    total_competence,
)

# Worked skill vectors reused across the suite (see also test_acceptance).
MISFIT_VECTOR = CompetenceVector(
    0.9810806939771801, 0.6931592421945483, 0.9239861161586994, 0.922179441944758
)


unit = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)


class TestComputePerformance:
    def test_high_tech_vector_at_entry_level(self):
        assert compute_performance(MISFIT_VECTOR, HIGH_MISMATCH.profile(1)) == pytest.approx(
            0.9752, abs=5e-5
        )

    def test_same_vector_at_mid_level(self):
        assert compute_performance(MISFIT_VECTOR, HIGH_MISMATCH.profile(3)) == pytest.approx(
            0.8082, abs=5e-5
        )

    def test_perfect_skills_score_one_under_any_profile(self):
        ones = CompetenceVector(1, 1, 1, 1)
        for regime in REGIMES.values():
            for lvl in range(1, 6):
                assert compute_performance(ones, regime.profile(lvl)) == 1.0

    def test_single_skill_profile_reads_that_skill(self):
        c = CompetenceVector(0.25, 0.9, 0.9, 0.9)
        w = RoleProfile((1.0, 0.0, 0.0, 0.0))
        assert compute_performance(c, w) == 0.25

    @given(unit, unit, unit, unit)
    def test_output_in_unit_interval(self, a, b, c, d):
        v = CompetenceVector(a, b, c, d)
        for lvl in range(1, 6):
            p = compute_performance(v, HIGH_MISMATCH.profile(lvl))
            assert 0.0 <= p <= 1.0

    @given(unit, unit, unit, unit, st.floats(min_value=0.0, max_value=1.0))
    def test_monotone_in_each_component(self, a, b, c, d, bump):
        base = CompetenceVector(a, b, c, d)
        w = TRANSFERABLE.profile(4)
        p0 = compute_performance(base, w)
        for i in range(4):
            raised = list(base.as_tuple())
            raised[i] = min(1.0, raised[i] + bump)
            assert compute_performance(CompetenceVector(*raised), w) >= p0

    def test_clip_is_identity_on_valid_inputs(self):
        rng = np.random.default_rng(0)
        for _ in range(200):
            v = CompetenceVector(*rng.random(4))
            w = HIGH_MISMATCH.profile(int(rng.integers(1, 6)))
            raw = sum(x * y for x, y in zip(v.as_tuple(), w.weights))
            assert compute_performance(v, w) == pytest.approx(raw, abs=0)


class TestTotalCompetence:
    def test_quarter_skills(self):
        assert total_competence(CompetenceVector(0.25, 0.25, 0.25, 0.25)) == 1.0

    def test_zero(self):
        assert total_competence(CompetenceVector(0, 0, 0, 0)) == 0.0

    def test_uniform_draws_match_sum_of_four_uniforms(self):
        # Mean 2 and SD sqrt(1/3) for the sum of four iid U(0,1) draws.
        rng = np.random.default_rng(42)
        totals = rng.random((100_000, 4)).sum(axis=1)
        assert totals.mean() == pytest.approx(2.0, abs=0.01)
        assert totals.std() == pytest.approx(0.577, abs=0.01)


class TestVectorKernel:
    def test_matches_scalar_kernel_bitwise(self):
        rng = np.random.default_rng(7)
        skills = rng.random((500, 4))
        levels = rng.integers(1, 6, size=500)
        w = HIGH_MISMATCH.weight_matrix()
        vec = performance_at_levels(skills, levels, w)
        for i in range(500):
            scalar = compute_performance(
                CompetenceVector(*skills[i]), HIGH_MISMATCH.profile(int(levels[i]))
            )
            assert vec[i] == scalar


class TestTypes:
    def test_competence_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            CompetenceVector(1.2, 0, 0, 0)
        with pytest.raises(ValueError):
            CompetenceVector(-0.1, 1, 1, 1)

    def test_profile_rejects_bad_sum(self):
        with pytest.raises(ValueError):
            RoleProfile((0.5, 0.5, 0.1, 0.0))

    def test_profile_rejects_negative_weight(self):
        with pytest.raises(ValueError):
            RoleProfile((1.1, -0.1, 0.0, 0.0))

    def test_profile_demanded_mask_ignores_zero_weights(self):
        assert HIGH_MISMATCH.profile(1).demanded() == (True, False, False, True)

    def test_regime_needs_five_profiles(self):
        with pytest.raises(ValueError):
            Regime("short", tuple(HIGH_MISMATCH.profiles[:4]))

    def test_preset_tables(self):
        assert HIGH_MISMATCH.profile(5).weights == (0.0, 0.8, 0.1, 0.1)
        assert TRANSFERABLE.profile(3).weights == (0.65, 0.15, 0.1, 0.1)
