import numpy as np
import pytest

from orgsim import ScenarioConfig
from orgsim.state import Organization


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One PASS/FAIL line per acceptance criterion at the end of the run."""
    rows = []
    for outcome in ("passed", "failed"):
        for report in terminalreporter.stats.get(outcome, []):
            if getattr(report, "when", None) != "call":
                continue
            if "test_acceptance" not in report.nodeid:
                continue
            rows.append((report.nodeid.split("::")[-1], outcome))
    if not rows:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for name, outcome in sorted(rows):
        terminalreporter.write_line(f"{'PASS' if outcome == 'passed' else 'FAIL'}  {name}")


@pytest.fixture
def rng():
    return np.random.default_rng(123)


@pytest.fixture
def small_config():
    """A fast scenario with enough attrition to generate promotion flow."""
    return ScenarioConfig(
        n_agents=400,
        steps=6,
        seed=9,
        attrition_rates=(0.10, 0.06, 0.04, 0.02, 0.01),
    )


def build_org(regime, caps5, skills, levels, tenure=None):
    """Hand-built organization for targeted tests; caps5 is Level-1-first."""
    caps = np.zeros(6, dtype=np.int64)
    caps[1:] = caps5
    skills = np.asarray(skills, dtype=np.float64)
    levels = np.asarray(levels)
    if tenure is None:
        tenure = np.zeros(len(levels), dtype=np.int32)
    return Organization(regime, caps, skills, levels, np.asarray(tenure))
