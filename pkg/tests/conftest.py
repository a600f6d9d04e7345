import numpy as np
import pytest

from ssmsep.ssm import DiagonalSSM


def pytest_addoption(parser):
    parser.addoption(
        "--runslow",
        action="store_true",
        default=False,
        help="Also run desk-scale acceptance experiments (minutes each).",
    )


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running acceptance experiment, needs --runslow")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture(scope="module")
def real_corpus():
    """Seeded real stable systems with n <= 8, shared across a test module."""
    systems = []
    for seed in range(25):
        g = np.random.default_rng(seed)
        n = int(g.integers(1, 9))
        a = g.uniform(-0.95, 0.95, size=n)
        systems.append(DiagonalSSM.real(a, g.standard_normal(n), g.standard_normal(n)))
    return systems


@pytest.fixture(scope="module")
def complex_corpus():
    systems = []
    for seed in range(25):
        g = np.random.default_rng(1000 + seed)
        n = int(g.integers(1, 9))
        a = g.uniform(0.0, 0.95, size=n) * np.exp(1j * g.uniform(0, 2 * np.pi, size=n))
        b = g.standard_normal(n) + 1j * g.standard_normal(n)
        c = g.standard_normal(n) + 1j * g.standard_normal(n)
        systems.append(DiagonalSSM.complex(a, b, c))
    return systems


@pytest.fixture
def results_dir(tmp_path):
    out = tmp_path / "results"
    out.mkdir()
    return out
