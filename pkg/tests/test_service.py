import json

import pytest
from fastapi.testclient import TestClient

from nonvanish.schemas import CensusRequest, ProportionRequest, Report, SpecParams
from nonvanish.service import app, run_census, run_proportion


@pytest.fixture(scope="module")
def client():
    return TestClient(app)


def test_health(client):
    assert client.get("/health").json() == {"status": "ok"}


def test_proportion_endpoint_headline(client):
    r = client.post("/proportion", json={"spec": {"preset": "paper"}})
    assert r.status_code == 200
    body = r.json()
    assert body["results"]["proportion"] == "23763/69665"
    assert body["results"]["s1_main"] == "89/80"
    assert abs(body["results"]["decimals"]["proportion"] - 23763 / 69665) < 1e-15
    # report re-parses into (config, results)
    report = Report.model_validate(body)
    assert ProportionRequest.model_validate(report.config)


def test_optimize_endpoint_baseline(client):
    r = client.post("/optimize", json={"dp": 1, "dq": 0, "theta1": "1/2"})
    assert r.status_code == 200
    assert r.json()["results"]["optimum"]["proportion"] == "1/3"


def test_census_endpoint_counts(client):
    r = client.post(
        "/census",
        json={"spec": {"preset": "paper"}, "q_list": [5], "with_moments": False},
    )
    assert r.status_code == 200
    row = r.json()["results"]["rows"][0]
    assert row["total"] == 1 and row["nonzero"] == 1
    csv = r.json()["results"]["csv"]
    assert csv.splitlines()[0].startswith("q,total,nonzero")


def test_moments_endpoint_rational_strings_survive(client):
    req = {"spec": {"theta1": "1/2", "theta2": "1/2",
                    "p_coeffs": ["21/20", "-1/20"], "q_coeffs": ["9/10"]}}
    r = client.post("/moments", json=req)
    assert r.status_code == 200
    res = r.json()["results"]
    assert res["lambda"] == "13933/3840"
    assert res["spec"]["P"] == ["0/1", "21/20", "-1/20"]


def test_validation_error_maps_to_400(client):
    r = client.post("/proportion", json={"spec": {"theta1": "1/4", "theta2": "1/2"}})
    assert r.status_code == 400
    assert r.json()["error"]["kind"] == "validation"


def test_capacity_error_maps_to_413(client):
    r = client.post(
        "/census", json={"spec": {"preset": "paper"}, "q_list": [200_001]}
    )
    assert r.status_code == 413
    assert r.json()["error"]["kind"] == "capacity"


def test_kernels_endpoint(client):
    r = client.post(
        "/kernels",
        json={"points": [{"x": 1.0}], "mellin": [{"i": 2, "y": 100.0, "h": 10.0}]},
    )
    assert r.status_code == 200
    res = r.json()["results"]
    assert abs(res["points"][0]["value"] - 0.5) < 1e-10
    import math

    assert abs(res["mellin"][0]["value"] - math.log(10.0) ** 2 / 2) < 1e-8


def test_oracles_orthogonality_endpoint(client):
    r = client.post(
        "/oracles", json={"which": "orthogonality", "q": 12, "count": 8, "seed": 1}
    )
    assert r.status_code == 200
    assert r.json()["results"]["all_equal"] is True


def test_oracles_missing_params_rejected(client):
    r = client.post("/oracles", json={"which": "twisted"})
    assert r.status_code == 400


def test_shifted_endpoint(client):
    r = client.post(
        "/shifted",
        json={
            "spec": {"preset": "paper"},
            "q": 101,
            "alpha": 0.0,
            "beta": 0.0,
        },
    )
    assert r.status_code == 200
    res = r.json()["results"]
    assert abs(res["J1"] - 417 / 1600) < 1e-9
    assert abs(res["J2"] - 27 / 256) < 1e-9
    assert abs(res["I"] - 9 / 80) < 1e-12


def test_handlers_usable_without_http():
    rep = run_proportion(ProportionRequest(spec=SpecParams(preset="paper")))
    assert rep.results["proportion"] == "23763/69665"
    rep = run_census(
        CensusRequest(spec=SpecParams(preset="paper"), q_list=[7], with_moments=False)
    )
    assert rep.results["rows"][0]["nonzero"] == 2


def test_report_json_is_deterministic():
    a = run_proportion(ProportionRequest(spec=SpecParams(preset="paper")))
    b = run_proportion(ProportionRequest(spec=SpecParams(preset="paper")))
    assert json.dumps(a.model_dump(), sort_keys=True) == json.dumps(
        b.model_dump(), sort_keys=True
    )
