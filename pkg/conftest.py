import numpy as np
import pytest

from curves import RefinementPolicy
from systems import CatMap, SolenoidMap


@pytest.fixture
def cat():
    return CatMap(2, 1, 1, 1)


@pytest.fixture
def solenoid():
    return SolenoidMap(0.1, 'corrected')


@pytest.fixture
def coarse_policy():
    return RefinementPolicy(max_spacing=0.05)


@pytest.fixture
def rng():
    return np.random.default_rng(42)


@pytest.fixture(autouse=True)
def no_ledger_database(monkeypatch):
    monkeypatch.delenv('DATABASE_URL', raising=False)
    monkeypatch.delenv('UG_THREADS', raising=False)
