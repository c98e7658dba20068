"""Shared fixtures: one full-size benchmark and one miniature pipeline config.

The full-size benchmark is generated once per session and shared by every
test that only reads it.  The miniature config keeps end-to-end pipeline
tests (train/score/compare/service/CLI) in the sub-second range.
"""

import pytest

from entcur.config import NetworkConfig, ProbeConfig, RunConfig, TrainingConfig
from entcur.data.generate import GeneratorSpec, generate


@pytest.fixture(scope="session")
def default_benchmark():
    """(train, test) pair for the shipped generator defaults."""
    return generate(GeneratorSpec())


def make_tiny_config(**overrides) -> RunConfig:
    """A miniature run configuration for fast end-to-end tests."""
    fields = dict(
        seed=11,
        fractions=[1.0],
        n_seeds=1,
        generator=GeneratorSpec(
            seed=404,
            n_scenes=3,
            n_seen=2,
            n_unseen=1,
            n_bins=16,
            train_counts=[120, 60],
            test_count_per_device=30,
        ),
        network=NetworkConfig(hidden_dims=[24], feature_dim=8),
        probe=ProbeConfig(warm_up_epochs=2, hidden_dim=16, epochs=40, patience=10),
        training=TrainingConfig(
            batch_size=16, stage1_max_epochs=4, stage2_epochs=3, patience=2
        ),
    )
    fields.update(overrides)
    return RunConfig(**fields)


@pytest.fixture(scope="session")
def tiny_config() -> RunConfig:
    return make_tiny_config()


@pytest.fixture(scope="session")
def tiny_benchmark(tiny_config):
    return generate(tiny_config.generator)


# The acceptance tests append one "criterion N: PASS/FAIL (...)" line each;
# the hook below prints them as a block at the end of the run so the
# verdicts survive in captured output even when -v noise is long.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)
