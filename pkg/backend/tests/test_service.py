import numpy as np
import pytest
from fastapi.testclient import TestClient

from app import __version__
from app.imaging.image import Image
from app.imaging.pnm import read_pnm, write_pnm
from app.main import app

from .test_pipeline import disk_pair_image


@pytest.fixture(scope="module")
def client():
    return TestClient(app)


def _upload(img: Image):
    return {"file": ("in.pgm", write_pnm(img), "image/x-portable-graymap")}


def test_health(client):
    res = client.get("/health")
    assert res.status_code == 200
    assert res.json() == {"status": "ok", "version": __version__}


def test_templates(client):
    res = client.get("/templates")
    assert res.status_code == 200
    assert "round_leveling" in res.json()


def test_filter_returns_pgm(client):
    f = disk_pair_image()
    res = client.post("/filter", files=_upload(f), data={"template": "area_opening", "param": "-1000"})
    assert res.status_code == 200
    assert res.headers["content-type"].startswith("image/x-portable-graymap")
    g = read_pnm(res.content)
    assert g.shape == f.shape
    # the bright disk is removed, the dark disk is not a max-tree peak
    assert g.pixels[32, 48] == 128
    assert g.pixels[32, 16] == 30
    assert int(res.headers["X-Survivors"]) >= 0


def test_filter_ascii(client):
    f = Image.from_values(4, 1, [0, 3, 1, 2])
    res = client.post("/filter", files=_upload(f), data={
        "tree_kind": "min", "attribute": "area", "strategy": "threshold", "param": "100", "ascii": "true",
    })
    assert res.status_code == 200
    assert res.content.startswith(b"P2\n")
    assert read_pnm(res.content) == f


def test_filter_bad_pnm_is_400(client):
    res = client.post("/filter", files={"file": ("bad.pgm", b"P5 2 2 255\n\x00", "application/octet-stream")})
    assert res.status_code == 400
    assert "bad.pgm" in res.json()["detail"]


@pytest.mark.parametrize("data", [
    {"template": "no_such_template"},
    {"strategy": "closing", "param": "-1"},
    {"tree_kind": "quad"},
    {"attribute": "area", "aa_kind": "node_count", "strategy": "threshold"},
])
def test_filter_invalid_spec_is_422(client, data):
    res = client.post("/filter", files=_upload(disk_pair_image()), data=data)
    assert res.status_code == 422


def test_range(client):
    res = client.post("/range", files=_upload(disk_pair_image()), data={"attribute": "area"})
    assert res.status_code == 200
    body = res.json()
    assert body["attribute"] == "area"
    assert body["raw_max"] == 64 * 64
    assert body["oriented_min"] == -body["raw_max"]


def test_detect_constant_image(client):
    f = Image(np.full((5, 5), 77, dtype=np.uint8))
    res = client.post("/detect", files=_upload(f), data={"attributes": "circularity", "eps": "0.1"})
    assert res.status_code == 200
    records = res.json()
    assert len(records) == 1
    assert records[0]["extinction"] == "inf"
    assert records[0]["area"] == 25
    assert records[0]["level"] == 77


def test_detect_unknown_attribute_is_400(client):
    res = client.post("/detect", files=_upload(disk_pair_image()), data={"attributes": "texture", "eps": "0.1"})
    assert res.status_code == 400


def test_detect_needs_eps(client):
    res = client.post("/detect", files=_upload(disk_pair_image()), data={"attributes": "circularity"})
    assert res.status_code == 422


def test_tree_stats(client):
    f = Image.from_values(4, 1, [0, 3, 1, 2])
    res = client.post("/tree-stats", files=_upload(f), data={"tree_kind": "min"})
    assert res.status_code == 200
    assert res.json() == {"nodes": 4, "leaves": 2, "depth": 3}


def test_tree_stats_rejects_unknown_tree(client):
    res = client.post("/tree-stats", files=_upload(disk_pair_image()), data={"tree_kind": "quad"})
    assert res.status_code == 422
