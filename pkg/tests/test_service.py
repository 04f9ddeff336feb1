"""HTTP service endpoints exercised through the in-process test client."""
from __future__ import annotations

import pytest
from fastapi.testclient import TestClient

from polyscope import SearchConfig, save_binary_model
from polyscope.service import create_app

from conftest import two_cluster_model

CLUSTER_CONFIG = SearchConfig(limit=13, scope=8)


@pytest.fixture(scope="module")
def client(tmp_path_factory):
    path = tmp_path_factory.mktemp("svc") / "model.bin"
    save_binary_model(two_cluster_model(), path)
    app = create_app(path, config=CLUSTER_CONFIG)
    with TestClient(app) as tc:
        yield tc


class TestInfoEndpoints:
    def test_healthz(self, client):
        resp = client.get("/healthz")
        assert resp.status_code == 200
        assert resp.json() == {"status": "ok"}

    def test_model_info(self, client):
        resp = client.get("/model")
        assert resp.status_code == 200
        assert resp.json() == {"vocab_size": 13, "dim": 4}


class TestNeighborsEndpoint:
    def test_ok(self, client):
        resp = client.get("/neighbors/mix")
        assert resp.status_code == 200
        body = resp.json()
        assert body["status"] == "ok"
        assert len(body["neighbors"]) == 4
        cosines = [n["cosine"] for n in body["neighbors"]]
        assert cosines == sorted(cosines, reverse=True)

    def test_insufficient(self, client):
        resp = client.get("/neighbors/mix", params={"limit": 6})
        assert resp.status_code == 200
        body = resp.json()
        assert body["status"] == "insufficient"
        assert body["reason"] == "query-not-stable"
        assert "neighbors" not in body

    def test_unknown_word_404(self, client):
        resp = client.get("/neighbors/zzz")
        assert resp.status_code == 404
        assert "zzz" in resp.json()["detail"]

    def test_invalid_override_422(self, client):
        resp = client.get("/neighbors/mix", params={"n_neighbors": 1})
        assert resp.status_code == 422


class TestUniformityEndpoint:
    def test_defined(self, client):
        resp = client.get("/uniformity/a0")
        assert resp.status_code == 200
        body = resp.json()
        assert body["word"] == "a0"
        assert 0.0 < body["su"] <= 1.0
        assert len(body["neighbors"]) == 4

    def test_undefined(self, client):
        resp = client.get("/uniformity/mix", params={"limit": 6})
        assert resp.status_code == 200
        body = resp.json()
        assert body["reason"] == "query-not-stable"
        assert "su" not in body


class TestTestEndpoint:
    def test_polysemic(self, client):
        resp = client.get("/test/mix")
        assert resp.status_code == 200
        body = resp.json()
        assert body["verdict"] == "polysemic"
        assert body["su"] < body["threshold"]
        assert len(body["neighbors"]) == 4
        assert {"token", "su"} <= set(body["neighbors"][0])

    def test_not_detected(self, client):
        resp = client.get("/test/a0")
        assert resp.status_code == 200
        assert resp.json()["verdict"] == "not-detected"

    def test_sigma_override_relaxes_threshold(self, client):
        strict = client.get("/test/mix").json()
        relaxed = client.get("/test/mix", params={"sigma_k": 1e6}).json()
        assert strict["verdict"] == "polysemic"
        assert relaxed["verdict"] == "not-detected"
        assert relaxed["threshold"] < strict["threshold"]

    def test_unknown_word_404(self, client):
        assert client.get("/test/zzz").status_code == 404


class TestBatchEndpoint:
    def test_default_config(self, client):
        resp = client.post("/batch", json={})
        assert resp.status_code == 200
        body = resp.json()
        assert body["summary"] == {"poly": 1, "mono": 12, "untestable": 0}
        assert body["config"]["limit"] == 13
        flagged = [r["word"] for r in body["rows"] if r["verdict"] == "polysemic"]
        assert flagged == ["mix"]

    def test_override(self, client):
        # limit 7 strands the lone second-cluster word without stable company
        resp = client.post("/batch", json={"limit": 7, "scope": 8})
        assert resp.status_code == 200
        body = resp.json()
        assert body["config"]["limit"] == 7
        assert len(body["rows"]) == 7
        assert body["summary"]["untestable"] >= 1

    def test_rejected_override(self, client):
        resp = client.post("/batch", json={"limit": 1})
        assert resp.status_code == 422

    def test_vocab_overflow_422(self, client):
        resp = client.post("/batch", json={"limit": 5000})
        assert resp.status_code == 422


class TestEvalEndpoint:
    def test_significant(self, client):
        labels = (
            [{"word": f"m{i}", "human": "mono", "computer": "mono"} for i in range(19)]
            + [{"word": "a", "human": "mono", "computer": "poly"},
               {"word": "b", "human": "poly", "computer": "mono"}]
            + [{"word": f"p{i}", "human": "poly", "computer": "poly"} for i in range(3)]
        )
        resp = client.post("/eval", json={"labels": labels})
        assert resp.status_code == 200
        body = resp.json()
        assert body["counts"] == [[19, 1], [1, 3]]
        assert body["statistic"] == pytest.approx(7.26, abs=0.05)
        assert body["significant"] is True

    def test_zero_marginal_422(self, client):
        labels = [{"word": "a", "human": "mono", "computer": "mono"}]
        resp = client.post("/eval", json={"labels": labels})
        assert resp.status_code == 422

    def test_bad_label_rejected(self, client):
        labels = [{"word": "a", "human": "banana", "computer": "mono"}]
        resp = client.post("/eval", json={"labels": labels})
        assert resp.status_code == 422
