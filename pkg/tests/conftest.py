"""
Pytest configuration and fixtures for the test suite.
"""
import sys
import shutil
import tempfile
from pathlib import Path
from typing import Generator, Dict, Any

import numpy as np
import pytest
from _pytest.config import Config

# Add the project root to the Python path
PROJECT_ROOT = Path(__file__).parent.parent
sys.path.insert(0, str(PROJECT_ROOT))

from fockbundle import settings  # noqa: E402
from fockbundle.fock import FockSpace  # noqa: E402
from fockbundle.lagrangian import standard_lagrangian  # noqa: E402
from fockbundle.modespace import build_mode_space  # noqa: E402

# Test configuration
TEST_CONFIG = {
    "app": {
        "name": "fockbundle-test",
    },
    "tolerances": {
        "car": 1e-9,
        "gerbe": 1e-8,
    },
    "fock": {
        "max_dim": 4096,
    },
    "logging": {
        "level": "DEBUG",
    },
}


@pytest.fixture(scope="session")
def project_root() -> Path:
    """Return the project root directory."""
    return PROJECT_ROOT


@pytest.fixture(scope="session")
def test_config() -> Dict[str, Any]:
    """Return the test configuration."""
    return TEST_CONFIG


@pytest.fixture(scope="function")
def temp_dir() -> Generator[Path, None, None]:
    """Create and clean up a temporary directory for tests."""
    temp_dir = Path(tempfile.mkdtemp(prefix="pytest_"))
    yield temp_dir
    if temp_dir.exists():
        shutil.rmtree(temp_dir, ignore_errors=True)


@pytest.fixture
def rng() -> np.random.Generator:
    """Seeded generator so every random test is reproducible."""
    return np.random.default_rng(1234)


@pytest.fixture
def odd_space():
    """Odd mode space with d=2, N=2 (dimension 8)."""
    return build_mode_space('odd', 2, 2)


@pytest.fixture
def even_space():
    """Even mode space with d=2, N=1 (dimension 6)."""
    return build_mode_space('even', 2, 1)


@pytest.fixture
def odd_fock(odd_space):
    """Fock space over the standard odd Lagrangian (m=4, dim 16)."""
    return FockSpace(standard_lagrangian(odd_space))


@pytest.fixture
def small_fock():
    """Fock space of the smallest odd space (d=1, N=1, m=1)."""
    return FockSpace(standard_lagrangian(build_mode_space('odd', 1, 1)))


def pytest_configure(config: Config) -> None:
    """Configure pytest with custom settings."""
    # Register custom markers
    config.addinivalue_line(
        "markers",
        "integration: mark test as an integration test (deselect with '-m "
        "not integration')",
    )
    config.addinivalue_line(
        "markers", "unit: mark test as a unit test (deselect with '-m unit')"
    )
    config.addinivalue_line(
        "markers", "e2e: mark test as an end-to-end test (deselect with '-m not e2e')"
    )
    config.addinivalue_line(
        "markers", "slow: mark test as slow (run with '--run-slow')",
    )


# Add a command-line option to run slow tests
def pytest_addoption(parser: pytest.Parser) -> None:
    """Add custom command-line options to pytest."""
    parser.addoption(
        "--run-slow",
        action="store_true",
        default=False,
        help="run tests marked as slow (large Fock spaces, fine transport grids)",
    )


# Configure test collection
def pytest_collection_modifyitems(
    config: pytest.Config, items: list
) -> None:
    """Modify test collection based on command-line options."""
    if not config.getoption("--run-slow"):
        skip_slow = pytest.mark.skip(reason="need --run-slow option to run")
        for item in items:
            if "slow" in item.keywords:
                item.add_marker(skip_slow)


@pytest.fixture(autouse=True)
def isolated_settings(tmp_path, monkeypatch) -> Generator[None, None, None]:
    """Send log files to a temporary directory and reset installed settings."""
    monkeypatch.setenv("FOCKBUNDLE_LOG_DIR", str(tmp_path / "logs"))
    for name in ("FOCKBUNDLE_MAX_FOCK_DIM", "FOCKBUNDLE_LOG_LEVEL"):
        monkeypatch.delenv(name, raising=False)
    settings.install(None)
    yield
    settings.install(None)
