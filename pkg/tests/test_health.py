"""
Health endpoint test for the weylfiber service.
"""
from fastapi.testclient import TestClient
from app.main import app


def test_health_ok() -> None:
    """
    The health endpoint answers 200 with a status body and needs no engine work.
    """
    client = TestClient(app)
    res = client.get("/health")
    assert res.status_code == 200
    assert res.json() == {"status": "ok"}


def test_health_rejects_post() -> None:
    """
    Only GET is routed on /health.
    """
    client = TestClient(app)
    res = client.post("/health")
    assert res.status_code == 405
