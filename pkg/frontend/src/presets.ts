/** Canned job configs. */

import type { JobConfigJson } from "./types.js";

/** The tutorial's deforming polar flower at preview-friendly size. */
export const FLOWER_PRESET: JobConfigJson = {
  family: "polar-flower",
  param: { t_min: 0.2, t_max: 1.0, frames: 41 },
  raster: { resolution: 256, supersample: 4 },
  mesh: { level: 128, step: 1 },
  output: { basename: "flower-preset" },
};
