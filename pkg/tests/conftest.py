import os

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("ci", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "ci"))

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def forged():
    from cremerlab.seedforge import forge

    return forge()


@pytest.fixture(scope="session")
def forged_spec():
    from cremerlab.cremermap import CremerMapSpec

    return CremerMapSpec.forged()


@pytest.fixture(scope="session")
def toy_spec():
    from cremerlab.cremermap import CremerMapSpec

    return CremerMapSpec.toy_map()


@pytest.fixture(scope="session")
def seed_file(tmp_path_factory, forged):
    from cremerlab.seedforge import save_seed

    path = tmp_path_factory.mktemp("seed") / "seed.json"
    save_seed(str(path), *forged)
    return str(path)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
