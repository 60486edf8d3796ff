"""Smoke test for a running weylfiber server.

Usage:
  python scripts/smoke.py

Requires the backend to be running at http://127.0.0.1:8000 by default.
Set BASE to point elsewhere. Runs a handful of battery sessions through
POST /sessions/run and checks the verdicts and the error mapping.
"""

import os
import sys

import requests

BASE = os.environ.get("BASE", "http://127.0.0.1:8000")

TATE = "ring W(1) over QQ;\nmodule M = coker [[d1]];\n"
VANISHING = "ring W(1) over QZ;\nmodule M = coker [[z*d1 - 1]];\nlattice L = M;\n"

CASES = [
    ("holonomic", TATE + "check M holonomic", {"minimal_dimension": True, "grade": 1}),
    ("derham", TATE + "check M derham", {"oracle_chi": 1}),
    ("bfunction", "ring W(1) over QQ;\nmodule K = coker [[x1*d1 - 1/2]];\ncheck K bfunction", {"b_function": "s - 1/2"}),
    ("holonomic-hat", VANISHING + "check L holonomic-hat", {"minimal_dimension": True}),
]


def fail(msg):
    print("FAIL:", msg)
    sys.exit(2)


def ok(msg):
    print("OK:", msg)


def run_session(source, **overrides):
    url = f"{BASE}/sessions/run"
    payload = {"source": source, **overrides}
    print("POST", url)
    return requests.post(url, json=payload, timeout=120)


def health():
    r = requests.get(f"{BASE}/health", timeout=10)
    if r.status_code != 200:
        fail(f"GET /health returned {r.status_code}: {r.text}")
    ok("health endpoint responded")


def battery():
    for label, source, expected in CASES:
        r = run_session(source)
        if r.status_code != 200:
            fail(f"{label}: status {r.status_code} {r.text}")
        verdicts = r.json().get("verdicts", {})
        for key, value in expected.items():
            if verdicts.get(key) != value:
                fail(f"{label}: {key} = {verdicts.get(key)!r}, expected {value!r}")
        ok(f"{label} verdicts match")


def error_mapping():
    r = run_session("ring W(1) over QQ;\nmodule M = coker [[x1 +]];\n")
    if r.status_code != 400:
        fail(f"parse error mapped to {r.status_code}, expected 400")
    err = r.json()["detail"]["error"]
    if err.get("code") != "E_PARSE":
        fail(f"unexpected parse error record: {err}")
    ok("parse error reported with position")

    r = run_session("ring W(1) over QQ;\nmodule F = coker [];\ncheck F dual")
    if r.status_code != 422:
        fail(f"precondition failure mapped to {r.status_code}, expected 422")
    ok("precondition failure reported")


if __name__ == "__main__":
    print("Smoke test starting against:", BASE)
    try:
        health()
        battery()
        error_mapping()
    except requests.RequestException as e:
        fail(f"server unreachable: {e}")

    print("Smoke test completed successfully")
    sys.exit(0)
