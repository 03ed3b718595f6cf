/** Wire types shared with the stackforge HTTP service. */

export type PathKind = "polyline" | "cardioid-boundary" | "period2-circle";

/** The server's PathSpec JSON shape (expression paths are CLI-only). */
export interface PathSpecJson {
  kind: PathKind;
  t_min: number;
  t_max: number;
  trim_epsilon: number;
  points?: [number, number][];
}

export interface PreviewFrame {
  t: number;
  c_re: number;
  c_im: number;
  png_base64: string;
}

export interface PreviewResponse {
  frames: PreviewFrame[];
}

export type JobState = "queued" | "running" | "done" | "failed";

export interface JobStatus {
  status: JobState;
  progress: number;
  error?: string;
  stl_url?: string;
}

export interface Complex {
  re: number;
  im: number;
}

/** Job config accepted by POST /api/jobs (the CLI's config format). */
export interface JobConfigJson {
  family: string;
  param: { t_min: number; t_max: number; frames: number };
  raster?: { resolution?: number; supersample?: number };
  mesh?: { level?: number; step?: number };
  path?: PathSpecJson;
  escape?: { max_iter?: number; escape_radius?: number };
  output?: { basename?: string };
}
