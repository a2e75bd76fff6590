import json
import math

import numpy as np
import pytest
from fastapi.testclient import TestClient

from repfam.service import create_app


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app())


def test_health(client):
    response = client.get("/health")
    assert response.status_code == 200
    body = response.json()
    assert body["status"] == "ok" and body["version"]


def test_check_worked_example(client, gig_spec_dict):
    response = client.post("/check", json=gig_spec_dict)
    assert response.status_code == 200
    report = response.json()
    assert report["injective"]["value"] is True
    assert report["cyclic"]["value"] is True
    assert report["affine_span"]["value"] is True
    assert report["span_conditions"]["dual_fixed_trivial"] is True
    # verdicts carry numeric evidence
    assert report["cyclic"]["evidence"]["rank"] == 2
    assert len(report["cyclic"]["evidence"]["singular_values"]) > 0
    assert report["provenance"]["seed"] == 0
    assert report["provenance"]["tolerances"]["rank_rel"] == 1e-9


def test_check_axis_vector_not_cyclic(client, gig_spec_dict):
    gig_spec_dict["v0"] = [1.0, 0.0]
    report = client.post("/check", json=gig_spec_dict).json()
    assert report["cyclic"]["value"] is False
    assert report["injective"]["value"] is False
    assert report["injective"]["witness"] is not None


def test_check_rejects_unknown_field(client, gig_spec_dict):
    gig_spec_dict["extra_knob"] = 1
    response = client.post("/check", json=gig_spec_dict)
    assert response.status_code == 422


def test_check_rejects_v0_length_mismatch(client, gig_spec_dict):
    gig_spec_dict["v0"] = [1.0, 2.0, 3.0]
    response = client.post("/check", json=gig_spec_dict)
    assert response.status_code == 422
    assert "v0" in json.dumps(response.json())


def test_check_rejects_bad_characters(client, gig_spec_dict):
    gig_spec_dict["characters"] = {"kind": "linear"}  # not additive on this chart
    response = client.post("/check", json=gig_spec_dict)
    assert response.status_code == 422


def test_check_reports_byte_identical(client, gig_spec_dict):
    a = client.post("/check", json=gig_spec_dict).content
    b = client.post("/check", json=gig_spec_dict).content
    assert a == b


def test_equiv_rescaled_vectors(client, gig_spec_dict):
    other = json.loads(json.dumps(gig_spec_dict))
    other["v0"] = [3.0, -1.0]
    response = client.post("/equiv", json={"spec_a": gig_spec_dict, "spec_b": other})
    assert response.status_code == 200
    report = response.json()
    assert report["equivalent"] is True
    assert report["same_family"] is True
    assert np.allclose(report["psi"], [[6.0, 0.0], [0.0, -2.0]], atol=1e-8)


def test_equiv_distinct_weights(client, gig_spec_dict):
    other = json.loads(json.dumps(gig_spec_dict))
    other["representation"] = {"kind": "diagonal_weights", "weights": [1.0, 2.0]}
    other["v0"] = [1.0, 1.0]
    other["characters"] = {"kind": "power"}
    report = client.post("/equiv", json={"spec_a": gig_spec_dict, "spec_b": other}).json()
    assert report["equivalent"] is False
    assert report["same_family"] is False
    assert report["status"] == "not equivalent"


def test_equiv_identical_specs(client, gig_spec_dict):
    report = client.post("/equiv", json={"spec_a": gig_spec_dict,
                                         "spec_b": gig_spec_dict}).json()
    assert report["equivalent"] is True
    assert np.allclose(report["psi"], np.eye(2), atol=1e-8)


def test_equiv_noncyclic_rejected(client, gig_spec_dict):
    bad = json.loads(json.dumps(gig_spec_dict))
    bad["v0"] = [1.0, 0.0]
    response = client.post("/equiv", json={"spec_a": bad, "spec_b": gig_spec_dict})
    assert response.status_code == 422


def test_family_grid_exponential(client, gig_spec_dict):
    payload = {"spec": gig_spec_dict, "theta": [2.0, 0.0, 1.0],
               "grid": {"lo": 0.1, "hi": 5.0, "n": 5}}
    response = client.post("/family", json=payload)
    assert response.status_code == 200
    report = response.json()
    assert report["status"] == "ok"
    assert report["phi"] == pytest.approx(0.0, abs=1e-9)
    for x, value in report["grid"]:
        assert value == pytest.approx(math.exp(-x), rel=1e-9)


def test_family_outside_domain(client, gig_spec_dict):
    payload = {"spec": gig_spec_dict, "theta": [1.0, 0.0, -1.0],
               "grid": {"lo": 0.1, "hi": 5.0, "n": 3}}
    report = client.post("/family", json=payload).json()
    assert report["status"] == "outside_domain"
    assert report["membership"]["method"] == "analytic-gig"
    assert report["membership"]["detail"]["case"] is None


def test_family_sample_deterministic(client, gig_spec_dict):
    payload = {"spec": gig_spec_dict, "theta": [2.0, 2.0, 0.5],
               "sample": {"n": 10, "seed": 1}}
    a = client.post("/family", json=payload).json()["samples"]
    b = client.post("/family", json=payload).json()["samples"]
    assert a == b and len(a) == 10


def test_check_direct_sum_spec(client):
    spec = {
        "group": {"kind": "positive_reals"},
        "representation": {"kind": "direct_sum", "summands": [
            {"kind": "diagonal_weights", "weights": [1.0]},
            {"kind": "log_unipotent"},
        ]},
        "v0": [1.0, 0.5, 1.0],
        "characters": {"kind": "power"},
    }
    response = client.post("/check", json=spec)
    assert response.status_code == 200
    report = response.json()
    assert report["cyclic"]["evidence"]["dim"] == 3


def test_verify_gig_endpoint(client):
    response = client.post("/verify-gig", json={"seed": 0})
    assert response.status_code == 200
    report = response.json()
    assert report["passed"] is True
    assert len(report["normalizer_cases"]) == 12
    assert all(c["rel_error"] <= 1e-8 for c in report["normalizer_cases"])
    assert report["provenance"]["seed"] == 0
