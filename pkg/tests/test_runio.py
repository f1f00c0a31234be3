import numpy as np
import pytest

from orgsim import ScenarioConfig
from orgsim.config import ScenarioError, config_from_dict, config_to_dict
from orgsim.domain import HIGH_MISMATCH, TRANSFERABLE
from orgsim.engine import run_simulation
from orgsim.runio import (
    EXPORT_FILES,
    RunFormatError,
    export_run,
    load_run,
    load_scenario,
    save_run,
)

REGIME_A_TABLE = [
    [0.9, 0.0, 0.0, 0.1],
    [0.5, 0.3, 0.0, 0.2],
    [0.0, 0.5, 0.3, 0.2],
    [0.0, 0.7, 0.1, 0.2],
    [0.0, 0.8, 0.1, 0.1],
]


class TestLoadScenario:
    def test_empty_document_is_full_default(self):
        config = load_scenario("")
        assert config == ScenarioConfig()
        assert config.n_agents == 100_000
        assert config.steps == 100
        assert config.seed == 42
        assert config.regime == HIGH_MISMATCH
        assert config.strategy.kind.value == "merit"
        assert config.attrition_rates == (0.05, 0.02, 0.01, 0.005, 0.002)

    def test_reads_file_path(self, tmp_path):
        path = tmp_path / "scenario.yaml"
        path.write_text("n_agents: 500\nsteps: 3\nstrategy: seniority\n")
        config = load_scenario(path)
        assert (config.n_agents, config.steps) == (500, 3)
        assert config.strategy.kind.value == "seniority"
        assert load_scenario(str(path)) == config

    def test_bad_shares_rejected_with_field(self):
        with pytest.raises(ScenarioError) as err:
            load_scenario("level_shares: [0.5, 0.5, 0.1, 0, 0]")
        assert err.value.field == "level_shares"

    def test_bad_weight_row_names_level(self):
        table = [row[:] for row in REGIME_A_TABLE]
        table[2] = [0.3, 0.3, 0.3, 0.3]
        with pytest.raises(ScenarioError) as err:
            config_from_dict({"regime": {"weights": table}})
        assert err.value.field == "regime.weights[2]"

    def test_explicit_regime_table_matches_preset(self):
        config = config_from_dict({"regime": {"name": "high_mismatch", "weights": REGIME_A_TABLE}})
        assert config.regime == HIGH_MISMATCH

    def test_named_presets(self):
        assert config_from_dict({"regime": "transferable"}).regime == TRANSFERABLE
        with pytest.raises(ScenarioError):
            config_from_dict({"regime": "nope"})

    def test_unknown_field_rejected(self):
        with pytest.raises(ScenarioError) as err:
            config_from_dict({"population": 10})
        assert err.value.field == "population"

    def test_strategy_knobs(self):
        config = load_scenario(
            "strategy:\n  kind: hybrid\n  performance_weight: 0.5\n  tenure_norm: adaptive_max\n"
        )
        assert config.strategy.performance_weight == 0.5
        assert config.strategy.tenure_norm.value == "adaptive_max"

    def test_invalid_yaml(self):
        with pytest.raises(ScenarioError):
            load_scenario("strategy: [unclosed")

    def test_round_trip_through_dict(self):
        config = ScenarioConfig(n_agents=77, steps=5, seed=3).with_overrides(
            kind="selective_demotion", demotion_tolerance=0.07
        )
        assert config_from_dict(config_to_dict(config)) == config


class TestExportRun:
    def test_zero_step_run_single_data_row(self, tmp_path):
        run = run_simulation(ScenarioConfig(n_agents=30, steps=0, seed=2))
        export_run(run, tmp_path)
        lines = (tmp_path / "efficiency.csv").read_text().splitlines()
        assert lines[0] == "step,efficiency"
        assert len(lines) == 2

    def test_all_files_present(self, small_config, tmp_path):
        paths = export_run(run_simulation(small_config), tmp_path)
        assert sorted(p.name for p in paths) == sorted(EXPORT_FILES)
        for p in paths:
            assert p.stat().st_size > 0

    def test_reexport_is_byte_identical(self, small_config, tmp_path):
        run = run_simulation(small_config)
        export_run(run, tmp_path / "a")
        export_run(run, tmp_path / "b")
        for name in EXPORT_FILES:
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_event_rows_match_effective_log(self, small_config, tmp_path):
        run = run_simulation(small_config.with_overrides(kind="selective_demotion"))
        export_run(run, tmp_path)
        rows = (tmp_path / "promotions.csv").read_text().splitlines()[1:]
        assert len(rows) == len(run.effective_promotions)
        demo_rows = (tmp_path / "demotions.csv").read_text().splitlines()[1:]
        assert len(demo_rows) == len(run.demotions)

    def test_flow_counts_match_logs(self, small_config, tmp_path):
        run = run_simulation(small_config)
        export_run(run, tmp_path)
        rows = (tmp_path / "flows.csv").read_text().splitlines()[1:]
        assert len(rows) == run.n_steps * 5
        total_exits = sum(int(r.split(",")[2]) for r in rows)
        total_hires = sum(int(r.split(",")[3]) for r in rows)
        assert total_exits == len(run.attrition)
        assert total_hires == len(run.hires)

    def test_metadata_excludes_wall_time(self, small_config, tmp_path):
        run = run_simulation(small_config)
        export_run(run, tmp_path)
        text = (tmp_path / "metadata.yaml").read_text()
        assert "wall_time" not in text
        assert "seed: 9" in text


class TestSaveLoad:
    def test_round_trip_equality(self, small_config, tmp_path):
        for kind in ("merit", "selective_demotion", "merit_training"):
            run = run_simulation(small_config.with_overrides(kind=kind))
            path = save_run(run, tmp_path / f"{kind}.tar.gz")
            assert load_run(path) == run

    def test_save_bytes_deterministic(self, small_config, tmp_path):
        run = run_simulation(small_config)
        a = save_run(run, tmp_path / "a.tar.gz").read_bytes()
        b = save_run(run, tmp_path / "b.tar.gz").read_bytes()
        assert a == b

    def test_truncated_file_rejected(self, small_config, tmp_path):
        run = run_simulation(small_config)
        path = save_run(run, tmp_path / "run.tar.gz")
        blob = path.read_bytes()
        broken = tmp_path / "broken.tar.gz"
        broken.write_bytes(blob[: len(blob) // 2])
        with pytest.raises(RunFormatError):
            load_run(broken)

    def test_garbage_file_rejected(self, tmp_path):
        path = tmp_path / "junk.tar.gz"
        path.write_bytes(b"not a run at all")
        with pytest.raises(RunFormatError):
            load_run(path)

    def test_version_mismatch_names_both_versions(self, small_config, tmp_path, monkeypatch):
        run = run_simulation(small_config)
        import orgsim.runio as runio

        monkeypatch.setattr(runio, "FORMAT_VERSION", "0-experimental")
        path = save_run(run, tmp_path / "old.tar.gz")
        monkeypatch.undo()
        with pytest.raises(RunFormatError) as err:
            load_run(path)
        assert "0-experimental" in str(err.value)
        assert "'1'" in str(err.value)

    def test_saved_config_reruns_identically(self, small_config, tmp_path):
        # Oracle: a fresh simulation from the reloaded config.
        run = run_simulation(small_config)
        loaded = load_run(save_run(run, tmp_path / "run.tar.gz"))
        again = run_simulation(loaded.config)
        assert again == loaded
        assert np.array_equal(again.efficiency, run.efficiency)


def synthetic_run():
    """Hand-built run (no RNG involved) backing the golden-file checks."""
    from orgsim.engine import (
        AttritionLog,
        CompetenceUpdates,
        DemotionLog,
        HireLog,
        PromotionLog,
        RunMeta,
        RunResult,
    )
    from orgsim.strategies import PromotionCause, PromotionEvent

    config = ScenarioConfig(n_agents=3, steps=2, seed=7)
    events = [
        PromotionEvent(1, 1, 1, 2, 0.625, 0.5125, -0.1125, PromotionCause.VACANCY_FILL),
        PromotionEvent(2, 1, 1, 2, 0.75, 0.5, -0.25, PromotionCause.VACANCY_FILL, reversed=True),
        PromotionEvent(0, 2, 1, 2, 0.5, 0.625, 0.125, PromotionCause.DEMOTION_REFILL),
    ]
    return RunResult(
        config=config,
        efficiency=np.array([0.5, 0.5625, 0.625]),
        promotions=PromotionLog.from_events(events),
        demotions=DemotionLog.from_events([]),
        attrition=AttritionLog(
            step=np.array([1], dtype=np.int32),
            level=np.array([1], dtype=np.int8),
            agent_id=np.array([0], dtype=np.int64),
        ),
        hires=HireLog(step=np.array([2], dtype=np.int32), agent_id=np.array([3], dtype=np.int64)),
        level_history=np.array([[1, 1, 2, 0], [1, 2, 2, 0], [2, 2, 2, 1]], dtype=np.int8),
        base_competence=np.array(
            [
                [0.5, 0.5, 0.5, 0.5],
                [0.625, 0.25, 0.25, 0.5],
                [0.75, 0.125, 0.5, 0.25],
                [0.5, 0.25, 0.75, 0.125],
            ]
        ),
        competence_updates=CompetenceUpdates(
            step=np.array([], dtype=np.int32),
            agent_id=np.array([], dtype=np.int64),
            values=np.empty((0, 4)),
        ),
        joined_at=np.array([0, 0, 0, 2], dtype=np.int32),
        exited_at=np.array([-1, -1, -1, -1], dtype=np.int32),
        final_level=np.array([2, 2, 2, 1], dtype=np.int8),
        final_tenure=np.array([4, 3, 6, 0], dtype=np.int32),
        final_performance=np.array([0.5, 0.4375, 0.6875, 0.475]),
        blacklisted=np.array([False, False, True, False]),
        meta=RunMeta(seed=7, version="golden", wall_time_s=0.0, n_agents_total=4),
    )


class TestGoldenFiles:
    def test_exports_match_committed_goldens(self, tmp_path):
        # Column orders and formatting are frozen; regenerate deliberately.
        from pathlib import Path

        golden_dir = Path(__file__).parent / "golden"
        export_run(synthetic_run(), tmp_path)
        for name in EXPORT_FILES:
            produced = (tmp_path / name).read_text()
            expected = (golden_dir / name).read_text()
            assert produced == expected, f"{name} drifted from its golden copy"

    def test_reversed_events_absent_from_golden_table(self):
        from pathlib import Path

        rows = (Path(__file__).parent / "golden" / "promotions.csv").read_text().splitlines()
        assert len(rows) == 3  # header + two effective events; reversal excluded
