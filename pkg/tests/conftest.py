from __future__ import annotations

import numpy as np
import pytest

from relaymarket import radio, topology


@pytest.fixture(name="default_params")
def default_params_fixture():
    return topology.params_from_dict({})


@pytest.fixture(name="tiny_params")
def tiny_params_fixture():
    """Two-by-two scenario with a grid coarse enough to enumerate."""
    return topology.params_from_dict({
        "l_pu": 2, "l_su": 2,
        "xi_init": 1.0, "beta_init": 1.0,
        "delta": 0.25, "epsilon": 0.25,
    })


def scenario(params, seed):
    """Realization plus its rate floors, the way the engine consumes them."""
    real = topology.make_realization(params, seed)
    req = radio.requirements_for(params, real.snr)
    return real, req


@pytest.fixture(name="scenario_at")
def scenario_at_fixture():
    return scenario


def assert_outcome_well_formed(outcome, l_pu, l_su):
    """Structural checks every matching outcome must satisfy."""
    assert outcome.m.shape == (l_pu, l_su)
    assert set(np.unique(outcome.m)) <= {0, 1}
    assert np.all(outcome.m.sum(axis=0) <= 1)
    assert np.all(outcome.m.sum(axis=1) <= 1)
    unmatched = outcome.m == 0
    assert np.all(outcome.g[unmatched] == 0.0)
    assert np.all(outcome.b[unmatched] == 0.0)


# Verdict lines registered by the acceptance tests; replayed after the run
# summary because output capture would otherwise hide the passing ones.
acceptance_lines = []


def pytest_terminal_summary(terminalreporter):
    if acceptance_lines:
        terminalreporter.section("acceptance report")
        for line in acceptance_lines:
            terminalreporter.write_line(line)
