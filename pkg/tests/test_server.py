import base64
import io
import json
import time

import numpy as np
import pytest
from fastapi.testclient import TestClient
from PIL import Image

from stackforge import families, server
from stackforge.core import ParamInterval, PathSpec


@pytest.fixture(scope="module")
def client():
    with TestClient(server.app) as c:
        yield c


def decode_png(data: bytes) -> np.ndarray:
    return np.asarray(Image.open(io.BytesIO(data)))


class TestMandelbrotTile:
    def test_membership_colors(self, client):
        r = client.get(
            "/api/mandelbrot",
            params={"x_min": -2, "x_max": 1, "y_min": -1.5, "y_max": 1.5,
                    "px": 256, "max_iter": 300},
        )
        assert r.status_code == 200
        assert r.headers["content-type"] == "image/png"
        img = decode_png(r.content)  # PNG rows top-down
        h, w = img.shape

        def pixel_at(cx, cy):
            i = int((cx - (-2.0)) / 3.0 * w)
            j = int((cy - (-1.5)) / 3.0 * h)
            return img[h - 1 - j, i]

        assert pixel_at(0.0, 0.0) == 255  # inside M: white
        assert pixel_at(1.0 - 1e-6, 0.0) == 0  # c = 1 escapes: black

    def test_bad_px(self, client):
        assert client.get("/api/mandelbrot", params={"px": 0}).status_code == 400
        assert client.get("/api/mandelbrot", params={"px": 4096}).status_code == 400

    def test_zero_area_window(self, client):
        r = client.get("/api/mandelbrot", params={"x_min": 1, "x_max": 1})
        assert r.status_code == 400

    def test_deterministic_bytes(self, client):
        params = {"px": 64, "max_iter": 100}
        a = client.get("/api/mandelbrot", params=params)
        b = client.get("/api/mandelbrot", params=params)
        assert a.content == b.content


class TestPathPreview:
    def test_cardioid_endpoints_and_midpoint(self, client):
        r = client.post(
            "/api/path/preview",
            json={"path": {"kind": "cardioid-boundary", "t_min": 0.0,
                           "t_max": float(np.pi)},
                  "samples": 3,
                  "raster": {"resolution": 64, "supersample": 1, "max_iter": 60}},
        )
        assert r.status_code == 200
        frames = r.json()["frames"]
        cs = [complex(f["c_re"], f["c_im"]) for f in frames]
        assert abs(cs[0] - 0.25) <= 1e-9
        assert abs(cs[1] - (0.25 + 0.5j)) <= 1e-9
        assert abs(cs[2] - (-0.75)) <= 1e-9
        # no duplicated math: values equal the families evaluation exactly
        spec = PathSpec(kind="cardioid-boundary", t_range=ParamInterval(0.0, np.pi, 3))
        for f, t in zip(frames, spec.sample_ts(3)):
            c = families.evaluate_path(spec, t)
            assert abs(complex(f["c_re"], f["c_im"]) - c) <= 1e-12

    def test_degenerate_polyline_identical_frames(self, client):
        r = client.post(
            "/api/path/preview",
            json={"path": {"kind": "polyline", "t_min": 0.0, "t_max": 1.0,
                           "points": [[-1.0, 0.0], [-1.0, 0.0]]},
                  "samples": 2,
                  "raster": {"resolution": 64, "supersample": 1, "max_iter": 60}},
        )
        assert r.status_code == 200
        frames = r.json()["frames"]
        assert frames[0]["png_base64"] == frames[1]["png_base64"]

    def test_preview_png_decodes(self, client):
        r = client.post(
            "/api/path/preview",
            json={"path": {"kind": "period2-circle"}, "samples": 2,
                  "raster": {"resolution": 64, "supersample": 1, "max_iter": 60}},
        )
        img = decode_png(base64.b64decode(r.json()["frames"][0]["png_base64"]))
        assert img.shape == (64, 64)
        assert img.max() == 255  # the basilica-adjacent Julia set is visible

    def test_bad_expression_reports_parse_error(self, client):
        r = client.post(
            "/api/path/preview",
            json={"path": {"kind": "expression", "x": "cos(", "y": "0",
                           "t_min": 0.0, "t_max": 1.0},
                  "samples": 2},
        )
        assert r.status_code == 400
        assert "offset" in r.json()["detail"]

    def test_too_many_samples(self, client):
        r = client.post(
            "/api/path/preview",
            json={"path": {"kind": "cardioid-boundary"}, "samples": 65},
        )
        assert r.status_code == 400


def mini_job_config(tmp_path):
    return {
        "family": "polar-flower",
        "param": {"t_min": 0.2, "t_max": 1.0, "frames": 5},
        "raster": {"resolution": 64, "supersample": 2},
        "mesh": {"level": 128, "step": 1},
        "output": {"basename": "job", "frames_dir": str(tmp_path / "f"),
                   "stl": str(tmp_path / "m.stl")},
    }


def wait_for(client, job_id, timeout=60.0):
    deadline = time.time() + timeout
    while time.time() < deadline:
        body = client.get(f"/api/jobs/{job_id}").json()
        if body["status"] in ("done", "failed"):
            return body
        time.sleep(0.1)
    raise TimeoutError("job did not finish")


class TestJobs:
    def test_job_lifecycle_and_idempotency(self, client, tmp_path, monkeypatch):
        cfg = mini_job_config(tmp_path)
        r = client.post("/api/jobs", json=cfg)
        assert r.status_code == 200
        job_id = r.json()["job_id"]

        body = wait_for(client, job_id)
        assert body["status"] == "done"
        assert body["progress"] == 1.0
        assert body["stl_url"] == f"/api/jobs/{job_id}/model.stl"

        stl = client.get(body["stl_url"])
        assert stl.status_code == 200
        assert stl.headers["content-type"] == "application/octet-stream"

        # byte-identical to what the CLI pipeline produces for the same config
        from stackforge import cli as C

        monkeypatch.chdir(tmp_path)
        cfg_path = tmp_path / "job.json"
        cfg_path.write_text(json.dumps(cfg))
        assert C.main(["run", "--config", str(cfg_path)]) == 0
        assert (tmp_path / "m.stl").read_bytes() == stl.content

        # resubmission of the identical config returns the existing job id
        dup = client.post("/api/jobs", json=cfg)
        assert dup.status_code == 409
        assert dup.json()["job_id"] == job_id

    def test_unknown_job_404(self, client):
        assert client.get("/api/jobs/deadbeef").status_code == 404
        assert client.get("/api/jobs/deadbeef/model.stl").status_code == 404

    def test_invalid_config_400(self, client):
        r = client.post("/api/jobs", json={"family": "nope"})
        assert r.status_code == 400

    def test_job_states_move_forward(self, client, tmp_path):
        cfg = mini_job_config(tmp_path / "fwd")
        cfg["param"]["frames"] = 4
        job_id = client.post("/api/jobs", json=cfg).json()["job_id"]
        seen = []
        deadline = time.time() + 60
        order = {"queued": 0, "running": 1, "done": 2, "failed": 2}
        while time.time() < deadline:
            status = client.get(f"/api/jobs/{job_id}").json()["status"]
            if not seen or seen[-1] != status:
                seen.append(status)
            if status in ("done", "failed"):
                break
            time.sleep(0.02)
        ranks = [order[s] for s in seen]
        assert ranks == sorted(ranks), f"job state went backwards: {seen}"
        assert seen[-1] == "done"
