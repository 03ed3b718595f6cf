import { describe, expect, it } from "vitest";

import { ApiClient, ApiError, type FetchLike } from "../src/api.js";

function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });
}

describe("ApiClient", () => {
  it("builds cacheable mandelbrot URLs from the full window", () => {
    const api = new ApiClient("http://x");
    const url = api.mandelbrotUrl({ xMin: -2, xMax: 1, yMin: -1.5, yMax: 1.5 }, 256, 200);
    expect(url).toBe(
      "http://x/api/mandelbrot?x_min=-2&x_max=1&y_min=-1.5&y_max=1.5&px=256&max_iter=200",
    );
  });

  it("posts the PathSpec JSON body for previews", async () => {
    let captured: { url: string; body: unknown } | null = null;
    const fetchFn: FetchLike = async (url, init) => {
      captured = { url, body: JSON.parse(String(init?.body)) };
      return jsonResponse({ frames: [] });
    };
    const api = new ApiClient("", fetchFn);
    await api.previewPath(
      { kind: "polyline", t_min: 0, t_max: 1, trim_epsilon: 0, points: [[-1, 0], [-0.75, 0.1]] },
      5,
    );
    expect(captured!.url).toBe("/api/path/preview");
    expect(captured!.body).toEqual({
      path: { kind: "polyline", t_min: 0, t_max: 1, trim_epsilon: 0,
              points: [[-1, 0], [-0.75, 0.1]] },
      samples: 5,
      raster: undefined,
    });
  });

  it("surfaces the server's error detail", async () => {
    const fetchFn: FetchLike = async () =>
      jsonResponse({ detail: "syntax error (at offset 4)" }, 400);
    const api = new ApiClient("", fetchFn);
    await expect(
      api.previewPath({ kind: "cardioid-boundary", t_min: 0, t_max: 1, trim_epsilon: 0 }, 3),
    ).rejects.toThrowError(/offset 4/);
  });

  it("treats 409 duplicate submissions as success with the existing id", async () => {
    const fetchFn: FetchLike = async () => jsonResponse({ job_id: "abc123" }, 409);
    const api = new ApiClient("", fetchFn);
    expect(await api.submitJob({ family: "polar-flower", param: { t_min: 0, t_max: 1, frames: 5 } }))
      .toBe("abc123");
  });

  it("wraps other failures in ApiError with the status", async () => {
    const fetchFn: FetchLike = async () => jsonResponse({ detail: "nope" }, 500);
    const api = new ApiClient("", fetchFn);
    try {
      await api.submitJob({ family: "polar-flower", param: { t_min: 0, t_max: 1, frames: 5 } });
      expect.unreachable();
    } catch (err) {
      expect(err).toBeInstanceOf(ApiError);
      expect((err as ApiError).status).toBe(500);
    }
  });
});
