import pytest
from fastapi.testclient import TestClient

from assort_sidecar.app import create_app
from assort_sidecar.config import SidecarConfig


def stub_config(**overrides) -> SidecarConfig:
    values = dict(stub=True, stub_dimension=768, stub_seed=0)
    values.update(overrides)
    return SidecarConfig(**values)


@pytest.fixture(scope="session")
def client():
    return TestClient(create_app(stub_config()))
