"""
HTTP API 測試
"""

from datetime import date

import orjson
import pytest
from fastapi.testclient import TestClient

from app.core.config import settings
from app.main import app
from test_config import daily_file_bytes, sinusoid

client = TestClient(app)
API = settings.API_V1_STR


def test_health():
    response = client.get(f"{API}/health/")
    assert response.status_code == 200
    body = response.json()
    assert body["status"] == "ok"
    assert body["daily_area_file"] in ("present", "missing")


def test_root():
    assert client.get("/").json() == {"message": settings.PROJECT_NAME}


class TestAnalysisEndpoints:
    def test_acf_finds_period(self):
        response = client.post(f"{API}/analysis/acf", json={"values": sinusoid(140, 10.0).tolist()})
        assert response.status_code == 200
        body = response.json()
        assert body["n"] == 140
        assert len(body["c"]) == len(body["se"]) == 28
        short = next(p for p in body["peaks"] if p["window"] == "short")
        assert short["lag"] == 10
        assert short["significance"] == "above_2se"

    def test_acf_too_short(self):
        response = client.post(f"{API}/analysis/acf", json={"values": [1.0, 2.0, 3.0, 4.0, 5.0]})
        assert response.status_code == 422
        assert "max_lag" in response.json()["detail"]

    def test_wavelet(self):
        response = client.post(
            f"{API}/analysis/wavelet",
            json={"values": sinusoid(140, 10.0).tolist(), "background": "white"},
        )
        assert response.status_code == 200
        body = response.json()
        assert len(body["periods"]) == len(body["global_spectrum"])
        assert 9.5 <= body["peaks"][0]["period"] <= 10.5

    def test_wavelet_constant(self):
        response = client.post(f"{API}/analysis/wavelet", json={"values": [2.0] * 64})
        assert response.status_code == 422

    def test_wavelet_bad_level(self):
        response = client.post(f"{API}/analysis/wavelet", json={"values": [1.0, 2.0], "level": 1.5})
        assert response.status_code == 422

    def test_distribution(self):
        values = sinusoid(200, 7.3) + sinusoid(200, 3.1, 0.5)
        response = client.post(f"{API}/analysis/distribution", json={"values": values.tolist()})
        assert response.status_code == 200
        body = response.json()
        assert [t["test_name"] for t in body["tests"]] == ["lilliefors", "shapiro_wilk"]
        assert body["histogram"]["n"] == 200

    def test_distribution_empty(self):
        assert client.post(f"{API}/analysis/distribution", json={"values": []}).status_code == 400


def test_synth_is_deterministic():
    spec = {"n": 30, "seed": 5, "components": [{"type": "white_noise", "sigma": 2.0}]}
    first = client.post(f"{API}/synth/", json=spec).json()
    second = client.post(f"{API}/synth/", json=spec).json()
    assert first["n"] == 30
    assert len(first["values"]) == 30
    assert first["values"] == second["values"]
    assert client.post(f"{API}/synth/", json={"n": 0}).status_code == 422


class TestIngestUpload:
    def test_upload(self):
        content = daily_file_bytes(date(1950, 1, 1), [10.0, 20.0, 30.0])
        response = client.post(f"{API}/ingest/", files={"file": ("daily_area.txt", content, "text/plain")})
        assert response.status_code == 200
        body = response.json()
        assert body["records"] == 3
        assert (body["first_date"], body["last_date"]) == ("1950-01-01", "1950-01-03")
        assert body["stats"]["skipped_header"] == 1

    def test_zero_fill(self):
        content = daily_file_bytes(date(1950, 1, 1), [10.0]) + daily_file_bytes(
            date(1950, 1, 4), [10.0], header=False,
        )
        response = client.post(
            f"{API}/ingest/",
            params={"gap_policy": "zero"},
            files={"file": ("daily_area.txt", content, "text/plain")},
        )
        assert response.json()["records"] == 4

    def test_non_monotonic(self):
        content = daily_file_bytes(date(1950, 1, 2), [1.0]) + daily_file_bytes(
            date(1950, 1, 1), [1.0], header=False,
        )
        response = client.post(f"{API}/ingest/", files={"file": ("daily_area.txt", content, "text/plain")})
        assert response.status_code == 400
        assert "line_number=3" in response.json()["detail"]


class TestRunReport:
    def test_missing(self, tmp_path, monkeypatch):
        monkeypatch.setattr(settings, "OUTPUT_DIR", tmp_path)
        assert client.get(f"{API}/runs/report").status_code == 404

    def test_present(self, tmp_path, monkeypatch):
        monkeypatch.setattr(settings, "OUTPUT_DIR", tmp_path)
        (tmp_path / "report.json").write_bytes(orjson.dumps({"status": "ok", "input": "fixture"}))
        response = client.get(f"{API}/runs/report")
        assert response.status_code == 200
        assert response.json()["input"] == "fixture"


@pytest.mark.parametrize("path", ["/api/v1/analysis/acf", "/api/v1/analysis/distribution"])
def test_missing_values_rejected(path):
    assert client.post(path, json={}).status_code == 422
