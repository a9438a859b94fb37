"""Shared fixtures: heavy chains are sampled once per session.

Acceptance tests append one line per criterion to ACCEPTANCE_LINES; the
terminal-summary hook prints the whole table at the end of the run so a
single look at the output shows every criterion's verdict.
"""

from __future__ import annotations

import dataclasses

import pytest

from hgauge.group import GroupParams
from hgauge.measures import MeasureSpec, SamplerConfig, run_chain, run_chains

ACCEPTANCE_LINES: list[str] = []


def record_line(line: str) -> None:
    ACCEPTANCE_LINES.append(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


PARAMS6 = GroupParams(6)
POWER4 = MeasureSpec(family="power", k=4.0, q=2.0)
LONG_CFG = SamplerConfig(n_steps=110_000, burn_in=10_000, step=0.25, seed=11, n_chains=2)


@pytest.fixture(scope="session")
def params6():
    return PARAMS6


@pytest.fixture(scope="session")
def power4_chains():
    """Two independent long chains for the power(k=4) measure, n=6."""
    return run_chains(POWER4, PARAMS6, LONG_CFG)


@pytest.fixture(scope="session")
def family_chains():
    """One long chain per measure family used by the feasibility checks."""
    specs = {
        "cosh1": MeasureSpec(family="cosh-power", k=1.0),
        "cosh2": MeasureSpec(family="cosh-power", k=2.0),
        "plog3": MeasureSpec(family="power-log", k=3.0),
    }
    cfg = dataclasses.replace(LONG_CFG, seed=12, n_chains=1)
    chains = {name: run_chain(spec, PARAMS6, cfg, 0) for name, spec in specs.items()}
    chains["specs"] = specs
    return chains


@pytest.fixture(scope="session")
def alpha_chain():
    spec = MeasureSpec(family="alpha-power", alpha=1.0, p=4.0, beta=0.25, q=2.0)
    cfg = dataclasses.replace(LONG_CFG, seed=13, n_chains=1)
    return spec, run_chain(spec, PARAMS6, cfg, 0)


@pytest.fixture(scope="session")
def stability_chains():
    """Five seeds of the power(k=4) chain for ratio-stability checks."""
    out = []
    for seed in (101, 102, 103, 104, 105):
        cfg = dataclasses.replace(LONG_CFG, seed=seed, n_chains=1)
        out.append(run_chain(POWER4, PARAMS6, cfg, 0))
    return out
