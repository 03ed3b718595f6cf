/** Job submission and polling.  One poll loop per tracked job; duplicate
 * submissions resolve to the existing job id (the server keys jobs by
 * config hash), so resubmitting never spawns a second progress panel. */

import type { ApiClient } from "./api.js";
import type { JobConfigJson, JobStatus } from "./types.js";

export interface JobView {
  jobId: string;
  status: JobStatus["status"];
  progress: number;
  error?: string;
  stlUrl?: string;
}

type Listener = (view: JobView) => void;

export class JobTracker {
  private views = new Map<string, JobView>();
  private polling = new Set<string>();

  constructor(
    private api: ApiClient,
    private listener: Listener,
    private pollIntervalMs = 500,
    private sleep: (ms: number) => Promise<void> = (ms) => new Promise((r) => setTimeout(r, ms)),
  ) {}

  get(jobId: string): JobView | undefined {
    return this.views.get(jobId);
  }

  /** Submit a config; returns the job id.  Reuses the existing panel and
   * poll loop when the server reports a duplicate. */
  async submit(config: JobConfigJson): Promise<string> {
    const jobId = await this.api.submitJob(config);
    if (!this.views.has(jobId)) {
      this.emit({ jobId, status: "queued", progress: 0 });
    }
    if (!this.polling.has(jobId)) {
      this.polling.add(jobId);
      void this.poll(jobId);
    }
    return jobId;
  }

  private emit(view: JobView): void {
    this.views.set(view.jobId, view);
    this.listener(view);
  }

  private async poll(jobId: string): Promise<void> {
    try {
      for (;;) {
        const status = await this.api.jobStatus(jobId);
        this.emit({
          jobId,
          status: status.status,
          progress: status.progress,
          error: status.error,
          stlUrl: status.stl_url ? this.api.modelUrl(jobId) : undefined,
        });
        if (status.status === "done" || status.status === "failed") return;
        await this.sleep(this.pollIntervalMs);
      }
    } catch (err) {
      this.emit({
        jobId,
        status: "failed",
        progress: 0,
        error: err instanceof Error ? err.message : String(err),
      });
    } finally {
      this.polling.delete(jobId);
    }
  }
}
