import copy
import json

import pytest

from jrcc.scenario import bundled_path, from_dict, load_bundled


def small_doc(**overrides):
    """Two symmetric users, deterministic-unit fading, one far warden."""
    doc = {
        "radar": {"transmit_power": 10.0, "tx_gain": 1.0, "rx_gain": 1.0, "wavelength": 0.03,
                  "rcs": 1.0, "pulse_duration": 1e-5, "estimator_variance": 25.0,
                  "snr_threshold": 20.0},
        "ris": {"num_elements": 4, "num_modules": 4},
        "covert": {"user_noise_power": 1e-3, "warden_noise_power": 0.1},
        "geometry": {"transmitter_position": [0, 0, 0], "ris_position": [10, 0, 0],
                     "user_positions": [[10, 5, 0], [10, -5, 0]],
                     "warden_positions": [[-200, 0, 0]]},
        "budgets": {"total_bandwidth": 1e3},
        "fading_mode": "deterministic-unit",
    }
    for path, value in overrides.items():
        section, key = path.split(".")
        doc[section][key] = value
    return doc


@pytest.fixture
def small_scenario():
    return from_dict(small_doc())


@pytest.fixture(scope="session")
def fig5():
    return load_bundled("paper_fig5")


@pytest.fixture(scope="session")
def fig4():
    return load_bundled("paper_fig4")


@pytest.fixture
def fig5_doc():
    return copy.deepcopy(json.loads(bundled_path("paper_fig5").read_text()))


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
