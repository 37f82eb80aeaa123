# tests/conftest.py
import pytest
from fastapi.testclient import TestClient

from src.core.config import REPO_ROOT
from src.repositories.model_repository import ModelRepository
from src.schemas.surfaces import K3Type
from src.services.ci_engine import CompleteIntersectionEngine

MODEL_DIR = REPO_ROOT / "models"


@pytest.fixture(scope="session")
def repository():
    return ModelRepository(MODEL_DIR)


@pytest.fixture(scope="session")
def quartic_model(repository):
    return repository.load(K3Type.QUARTIC)


@pytest.fixture(scope="session")
def quadric_cubic_model(repository):
    return repository.load(K3Type.QUADRIC_CUBIC)


@pytest.fixture(scope="session")
def three_quadrics_model(repository):
    return repository.load(K3Type.THREE_QUADRICS)


@pytest.fixture(scope="session")
def engine():
    """Chase-only engine, no oracle fallback"""
    return CompleteIntersectionEngine(oracle_provider=None, oracle_fallback=False)


@pytest.fixture(scope="session")
def oracle_engine(repository):
    return CompleteIntersectionEngine(oracle_provider=repository.load, oracle_fallback=True)


@pytest.fixture
def client():
    from src.main import app

    return TestClient(app)
