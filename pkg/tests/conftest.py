from __future__ import annotations

import json
from pathlib import Path
from typing import TYPE_CHECKING

import pytest

from channelnet.channel import ChannelScenario
from channelnet.modulation import build_constellation
from channelnet.numerics import MISC_NAMESPACE, RngStream, make_stream_id

if TYPE_CHECKING:
    from pytest_django.fixtures import SettingsWrapper


def pytest_addoption(parser):
    parser.addoption(
        "--runslow", action="store_true", default=False, help="run desk-scale reproductions"
    )


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture(autouse=True)
def test_settings(settings: SettingsWrapper) -> SettingsWrapper:
    settings.TEST = True

    return settings


@pytest.fixture
def realization_reference(settings: SettingsWrapper) -> SettingsWrapper:
    settings.CHANNELNET_SNR_REFERENCE = "realization"

    return settings


@pytest.fixture
def stream() -> RngStream:
    return RngStream(1234, make_stream_id(MISC_NAMESPACE, 7))


@pytest.fixture
def qpsk():
    return build_constellation(4)


@pytest.fixture
def qam16():
    return build_constellation(16)


@pytest.fixture
def small_scenario() -> ChannelScenario:
    return ChannelScenario(n_r=4, n_t=4, qam_order=4)


GOLDEN_DIR = Path(__file__).parent / "golden"


@pytest.fixture
def golden():
    """Compare a JSON-serializable value against ``tests/golden/<name>.json``.

    A missing file is recorded from the current value and the test is skipped; commit
    the file so later runs assert against it.
    """

    def check(name, value):
        path = GOLDEN_DIR / f"{name}.json"
        if not path.exists():
            GOLDEN_DIR.mkdir(exist_ok=True)
            path.write_text(json.dumps(value, indent=2) + "\n")
            pytest.skip(f"recorded golden value {path.name}")
        assert value == json.loads(path.read_text())

    return check
