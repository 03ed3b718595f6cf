/** Thin client for the stackforge preview/job service.
 *
 * All fractal math lives on the server; this module only moves bytes.  The
 * fetch function is injectable so tests can intercept every request.
 */

import type { JobConfigJson, JobStatus, PathSpecJson, PreviewResponse } from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export interface MandelbrotWindow {
  xMin: number;
  xMax: number;
  yMin: number;
  yMax: number;
}

export class ApiError extends Error {
  constructor(public status: number, detail: string) {
    super(detail);
  }
}

async function detailOf(res: Response): Promise<string> {
  try {
    const body = await res.json();
    return typeof body.detail === "string" ? body.detail : res.statusText;
  } catch {
    return res.statusText;
  }
}

export class ApiClient {
  constructor(
    private baseUrl: string = "",
    private fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  mandelbrotUrl(win: MandelbrotWindow, px: number, maxIter: number): string {
    const q = new URLSearchParams({
      x_min: String(win.xMin),
      x_max: String(win.xMax),
      y_min: String(win.yMin),
      y_max: String(win.yMax),
      px: String(px),
      max_iter: String(maxIter),
    });
    return `${this.baseUrl}/api/mandelbrot?${q}`;
  }

  async fetchMandelbrotTile(win: MandelbrotWindow, px: number, maxIter: number): Promise<Blob> {
    const res = await this.fetchFn(this.mandelbrotUrl(win, px, maxIter));
    if (!res.ok) throw new ApiError(res.status, await detailOf(res));
    return res.blob();
  }

  async previewPath(
    path: PathSpecJson,
    samples: number,
    raster?: { resolution?: number; supersample?: number; max_iter?: number },
  ): Promise<PreviewResponse> {
    const res = await this.fetchFn(`${this.baseUrl}/api/path/preview`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ path, samples, raster }),
    });
    if (!res.ok) throw new ApiError(res.status, await detailOf(res));
    return res.json();
  }

  /** Returns the job id; a 409 (duplicate config) also resolves to the
   * existing id, matching the server's idempotency contract. */
  async submitJob(config: JobConfigJson): Promise<string> {
    const res = await this.fetchFn(`${this.baseUrl}/api/jobs`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(config),
    });
    if (res.status === 409 || res.ok) {
      const body = await res.json();
      return body.job_id;
    }
    throw new ApiError(res.status, await detailOf(res));
  }

  async jobStatus(jobId: string): Promise<JobStatus> {
    const res = await this.fetchFn(`${this.baseUrl}/api/jobs/${jobId}`);
    if (!res.ok) throw new ApiError(res.status, await detailOf(res));
    return res.json();
  }

  modelUrl(jobId: string): string {
    return `${this.baseUrl}/api/jobs/${jobId}/model.stl`;
  }

  async fetchModel(jobId: string): Promise<Blob> {
    const res = await this.fetchFn(this.modelUrl(jobId));
    if (!res.ok) throw new ApiError(res.status, await detailOf(res));
    return res.blob();
  }
}
