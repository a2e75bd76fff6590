import json

import pytest


GIG_SPEC = {
    "group": {"kind": "positive_reals"},
    "representation": {"kind": "diagonal_weights", "weights": [1.0, -1.0]},
    "v0": [0.5, 0.5],
    "characters": {"kind": "power"},
}


@pytest.fixture
def gig_spec_dict():
    return json.loads(json.dumps(GIG_SPEC))


@pytest.fixture
def gig_spec_path(tmp_path, gig_spec_dict):
    path = tmp_path / "gig.json"
    path.write_text(json.dumps(gig_spec_dict))
    return str(path)


def write_spec(tmp_path, name, spec):
    path = tmp_path / name
    path.write_text(json.dumps(spec))
    return str(path)
