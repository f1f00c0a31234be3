import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from orgsim.domain import Agent, CompetenceVector, HIGH_MISMATCH
from orgsim.strategies import (
    PromotionCause,
    StrategyConfig,
    StrategyKind,
    TenureNorm,
    gated_descending,
    hybrid_score,
    nearest_rank_percentile,
    normalize_tenure,
    order_hybrid,
    order_merit,
    order_random,
    order_seniority,
    promote_step,
)

from conftest import build_org


def make_agents(perfs=None, tenures=None, ids=None):
    perfs = list(perfs) if perfs is not None else [0.5] * len(tenures)
    tenures = list(tenures) if tenures is not None else [0] * len(perfs)
    ids = list(ids) if ids is not None else list(range(len(perfs)))
    c = CompetenceVector(0.5, 0.5, 0.5, 0.5)
    return [
        Agent(id=i, level=1, tenure_years=y, competence=c, performance=p)
        for i, p, y in zip(ids, perfs, tenures)
    ]


class TestOrderMerit:
    def test_partition_then_sort(self):
        agents = make_agents(perfs=[0.9, 0.7, 0.85])
        assert [a.performance for a in order_merit(agents, 0.8)] == [0.9, 0.85, 0.7]

    def test_all_below_gate_is_plain_descending(self):
        agents = make_agents(perfs=[0.1, 0.5, 0.3])
        assert [a.performance for a in order_merit(agents, 0.8)] == [0.5, 0.3, 0.1]

    def test_gate_is_inclusive(self):
        agents = make_agents(perfs=[0.8, 0.79])
        ordered = order_merit(agents, 0.8)
        assert [a.performance for a in ordered] == [0.8, 0.79]

    def test_ties_keep_candidate_list_order(self):
        # Oracle: stable sort of the literal candidate list.
        agents = make_agents(perfs=[0.8, 0.8], ids=[7, 3])
        assert [a.id for a in order_merit(agents, 0.8)] == [7, 3]
        flipped = make_agents(perfs=[0.8, 0.8], ids=[3, 7])
        assert [a.id for a in order_merit(flipped, 0.8)] == [3, 7]

    def test_empty_input(self):
        assert order_merit([], 0.8) == []

    @given(st.lists(st.floats(min_value=0, max_value=1, allow_nan=False), max_size=40))
    def test_returns_permutation_with_gate_blocks(self, perfs):
        agents = make_agents(perfs=perfs)
        ordered = order_merit(agents, 0.8)
        assert sorted(a.id for a in ordered) == sorted(a.id for a in agents)
        flags = [a.performance >= 0.8 for a in ordered]
        assert flags == sorted(flags, reverse=True)  # no Below before Above
        above = [a.performance for a in ordered if a.performance >= 0.8]
        below = [a.performance for a in ordered if a.performance < 0.8]
        assert above == sorted(above, reverse=True)
        assert below == sorted(below, reverse=True)


class TestOrderSeniority:
    def test_gate_then_descending(self):
        agents = make_agents(tenures=[10, 2, 6])
        assert [a.tenure_years for a in order_seniority(agents, 5)] == [10, 6, 2]

    def test_all_above_gate(self):
        agents = make_agents(tenures=[6, 9, 7])
        assert [a.tenure_years for a in order_seniority(agents, 5)] == [9, 7, 6]

    def test_equal_tenures_preserve_input_order(self):
        agents = make_agents(tenures=[4, 4, 4], ids=[11, 5, 8])
        assert [a.id for a in order_seniority(agents, 5)] == [11, 5, 8]


class TestNormalizeTenure:
    def test_fixed_cap_midpoint(self):
        assert normalize_tenure(6, TenureNorm.FIXED_CAP, cap=12) == 0.5

    def test_fixed_cap_saturates(self):
        # Years beyond the cap stop raising the seniority term.
        assert normalize_tenure(20, TenureNorm.FIXED_CAP, cap=12) == 1.0

    def test_adaptive_max_self_normalizes(self):
        assert normalize_tenure(8, TenureNorm.ADAPTIVE_MAX, pool=[3, 8, 1]) == 1.0

    def test_adaptive_max_zero_pool(self):
        assert normalize_tenure(0, TenureNorm.ADAPTIVE_MAX, pool=[0, 0]) == 0.0

    def test_quantile_cap(self):
        pool = list(range(1, 101))
        assert normalize_tenure(95, TenureNorm.QUANTILE_95, pool=pool) == 1.0
        assert normalize_tenure(47.5, TenureNorm.QUANTILE_95, pool=pool) == 0.5

    def test_pool_required(self):
        with pytest.raises(ValueError):
            normalize_tenure(3, TenureNorm.ADAPTIVE_MAX, pool=[])
        with pytest.raises(ValueError):
            normalize_tenure(3, TenureNorm.QUANTILE_95, pool=None)

    def test_nearest_rank_is_exact_order_statistic(self):
        assert nearest_rank_percentile(np.array([3.0, 1.0, 2.0]), 0.5) == 2.0
        assert nearest_rank_percentile(np.array([1.0, 2.0]), 0.5) == 1.0


class TestHybrid:
    def test_blend_example(self):
        assert hybrid_score(0.8, 6, 0.7, TenureNorm.FIXED_CAP, cap=12) == pytest.approx(0.71)

    def test_pure_performance(self):
        for years in (0, 5, 40):
            assert hybrid_score(0.37, years, 1.0, TenureNorm.FIXED_CAP, cap=12) == pytest.approx(0.37)

    def test_pure_tenure_saturated(self):
        assert hybrid_score(0.1, 15, 0.0, TenureNorm.FIXED_CAP, cap=12) == 1.0

    def test_score_gate_ordering(self):
        agents = make_agents(perfs=[0.95, 0.6, 0.8], tenures=[2, 1, 1])
        cfg = StrategyConfig(kind=StrategyKind.HYBRID, performance_weight=0.7, tenure_cap=12.0)
        ordered = order_hybrid(agents, cfg)
        scores = [0.7 * a.performance + 0.3 * min(a.tenure_years / 12, 1) for a in agents]
        expect = [agents[i].id for i in np.argsort(-np.array(scores), kind="stable")]
        assert [a.id for a in ordered] == expect

    def test_alpha_one_matches_merit_pointwise(self):
        # Oracle: run both orderings on the same pool and compare throughout.
        rng = np.random.default_rng(3)
        agents = make_agents(perfs=rng.random(50).tolist(), tenures=rng.integers(0, 20, 50).tolist())
        cfg = StrategyConfig(
            kind=StrategyKind.HYBRID, performance_weight=1.0, score_gate=0.8, tenure_cap=12.0
        )
        assert [a.id for a in order_hybrid(agents, cfg)] == [
            a.id for a in order_merit(agents, 0.8)
        ]

    def test_alpha_zero_matches_seniority_below_cap(self):
        # With no saturation and a zero gate, pure tenure blending reduces to
        # the seniority order with a zero-year gate.
        rng = np.random.default_rng(4)
        agents = make_agents(perfs=rng.random(40).tolist(), tenures=rng.integers(0, 30, 40).tolist())
        cfg = StrategyConfig(
            kind=StrategyKind.HYBRID, performance_weight=0.0, score_gate=0.0, tenure_cap=1000.0
        )
        assert [a.id for a in order_hybrid(agents, cfg)] == [
            a.id for a in order_seniority(agents, 0)
        ]


class TestOrderRandom:
    def test_single_candidate(self):
        agents = make_agents(perfs=[0.4])
        assert [a.id for a in order_random(agents, np.random.default_rng(0))] == [0]

    def test_fixed_seed_reproducible(self):
        agents = make_agents(perfs=[0.1, 0.2, 0.3, 0.4])
        a = order_random(agents, np.random.default_rng(12))
        b = order_random(agents, np.random.default_rng(12))
        assert [x.id for x in a] == [x.id for x in b]

    def test_permutations_near_uniform(self):
        # Oracle: count each of the 6 permutations of 3 candidates.
        agents = make_agents(perfs=[0.1, 0.2, 0.3])
        rng = np.random.default_rng(99)
        counts = {}
        trials = 10_000
        for _ in range(trials):
            key = tuple(a.id for a in order_random(agents, rng))
            counts[key] = counts.get(key, 0) + 1
        assert len(counts) == 6
        for count in counts.values():
            assert abs(count / trials - 1 / 6) < 0.02


class TestGatedDescending:
    @given(
        st.lists(st.floats(min_value=0, max_value=1, allow_nan=False), max_size=60),
        st.floats(min_value=0, max_value=1),
    )
    def test_always_a_permutation(self, values, gate):
        order = gated_descending(np.array(values), gate)
        assert sorted(order.tolist()) == list(range(len(values)))


class TestPromoteStep:
    def _org_with_upper_chain(self):
        # Ten agents: ids 0..5 at L1, 6 at L2, 7 at L3, 8 at L4, 9 at L5.
        skills = np.array(
            [
                [0.30, 0.2, 0.2, 0.2],
                [0.90, 0.3, 0.2, 0.8],  # best L1 performer
                [0.70, 0.2, 0.2, 0.2],
                [0.50, 0.9, 0.9, 0.9],
                [0.20, 0.2, 0.2, 0.2],
                [0.60, 0.2, 0.2, 0.2],
                [0.80, 0.8, 0.5, 0.5],
                [0.10, 0.9, 0.8, 0.6],
                [0.10, 0.8, 0.9, 0.9],
                [0.10, 0.9, 0.9, 0.9],
            ]
        )
        levels = [1, 1, 1, 1, 1, 1, 2, 3, 4, 5]
        return build_org(HIGH_MISMATCH, (6, 1, 1, 1, 1), skills, levels)

    def test_no_vacancies_no_events(self):
        org = self._org_with_upper_chain()
        events = promote_step(org, StrategyConfig(), 1, np.random.default_rng(0))
        assert events == []

    def test_single_top_vacancy_cascades_to_bottom(self):
        # Hand trace: the L5 exit opens one seat per level on the way down;
        # each fill is the unique upper agent, then the best L1 performer.
        org = self._org_with_upper_chain()
        org.exit_agents(np.array([9]), 1)
        events = promote_step(org, StrategyConfig(), 1, np.random.default_rng(0))
        moves = [(e.agent_id, e.from_level, e.to_level) for e in events]
        assert moves == [(8, 4, 5), (7, 3, 4), (6, 2, 3), (1, 1, 2)]
        assert all(e.cause is PromotionCause.VACANCY_FILL for e in events)
        assert org.level_counts()[1:].tolist() == [5, 1, 1, 1, 1]
        assert org.just_promoted[[8, 7, 6, 1]].all()

    def test_promotion_shock_for_misfit_vector(self):
        # High-mismatch L2 -> L3 with the reference high-tech vector: 0.8829 -> 0.8082.
        skills = np.array(
            [
                [0.9810806939771801, 0.6931592421945483, 0.9239861161586994, 0.922179441944758],
                [0.2, 0.2, 0.2, 0.2],
                [0.3, 0.3, 0.3, 0.3],
            ]
        )
        org = build_org(HIGH_MISMATCH, (2, 1, 0, 0, 0), skills, [2, 1, 1])
        org.caps[3] = 1  # open one L3 seat
        events = promote_step(org, StrategyConfig(), 1, np.random.default_rng(0))
        assert len(events) == 2  # L2->L3 then backfill L1->L2
        assert events[0].agent_id == 0
        assert events[0].delta_p == pytest.approx(-0.0747, abs=5e-5)

    def test_pool_exhaustion_leaves_seats_open(self):
        skills = np.full((3, 4), 0.5)
        org = build_org(HIGH_MISMATCH, (1, 1, 1, 0, 0), skills, [1, 2, 3])
        org.exit_agents(np.array([0]), 1)  # L1 empties; nobody can fill L2's future seat
        org.exit_agents(np.array([1]), 1)
        events = promote_step(org, StrategyConfig(), 1, np.random.default_rng(0))
        assert [(e.from_level, e.to_level) for e in events] == []
        assert org.level_counts()[2] == 0  # vacancy persists

    def test_never_overfills_caps(self):
        rng = np.random.default_rng(5)
        skills = rng.random((40, 4))
        levels = [1] * 25 + [2] * 8 + [3] * 4 + [4] * 2 + [5]
        org = build_org(HIGH_MISMATCH, (25, 8, 4, 2, 1), skills, levels)
        org.exit_agents(np.array([0, 1, 25, 26, 33, 37]), 1)
        for kind in StrategyKind:
            clone = org.clone()
            promote_step(clone, StrategyConfig(kind=kind), 1, np.random.default_rng(1))
            assert (clone.level_counts()[1:] <= clone.caps[1:]).all()

    def test_merit_promotes_ahead_of_every_unpromoted_peer(self):
        rng = np.random.default_rng(6)
        skills = rng.random((30, 4))
        org = build_org(HIGH_MISMATCH, (24, 6, 0, 0, 0), skills, [1] * 24 + [2] * 6)
        org.exit_agents(np.array([24, 25]), 1)
        events = promote_step(org, StrategyConfig(), 1, np.random.default_rng(0))
        promoted = {e.agent_id for e in events}
        pre_perf = {e.agent_id: e.perf_pre for e in events}
        gate = 0.8
        stayed = [i for i in range(24) if i not in promoted]
        worst_promoted_above = min(
            (p for p in pre_perf.values() if p >= gate), default=None
        )
        if worst_promoted_above is not None:
            for i in stayed:
                if org.performance[i] >= gate:
                    assert org.performance[i] <= worst_promoted_above
