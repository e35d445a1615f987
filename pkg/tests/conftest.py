from pathlib import Path

import pytest

from floerd.core.config import settings
from floerd.services.complex_service import ComplexService
from floerd.services.knot_service import KnotService

GOLDEN = Path(__file__).parent / "golden"


@pytest.fixture
def golden():
    """Reads a file from tests/golden."""

    def read(name: str) -> str:
        return (GOLDEN / name).read_text(encoding="utf-8")

    return read


@pytest.fixture
def unknot():
    return ComplexService.unknot()


@pytest.fixture
def trefoil():
    return KnotService.torus_staircase(3)


@pytest.fixture
def t45():
    return KnotService.torus_staircase(5)


@pytest.fixture
def double():
    return KnotService.doubled_trefoil_model()


@pytest.fixture
def small_settings(monkeypatch):
    """Tight limits so the size and budget guards trip on small inputs."""
    monkeypatch.setattr(settings, "MAX_GENERATORS", 1000)
    monkeypatch.setattr(settings, "METABOLIZER_BUDGET", 1000)
    return settings


@pytest.fixture(scope="session")
def lp3():
    return KnotService.lp_complex(3)
