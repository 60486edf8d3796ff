"""
Shared fixtures: every test starts from settings read fresh from the environment.
"""
import pytest

from app.settings import reset_settings


@pytest.fixture(autouse=True)
def fresh_settings():
    reset_settings()
    yield
    reset_settings()
