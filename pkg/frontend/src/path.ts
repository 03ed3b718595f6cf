/** The editable parameter path: either a hand-drawn polyline through the
 * Mandelbrot plane or one of the two built-in boundary parametrizations.
 *
 * Serializes to exactly the PathSpec JSON the server accepts; no geometry
 * is evaluated here (sampled c values always come back from the server).
 */

import type { Complex, PathKind, PathSpecJson } from "./types.js";

export const PRESET_RANGES: Record<Exclude<PathKind, "polyline">, { tMin: number; tMax: number }> =
  {
    "cardioid-boundary": { tMin: 0, tMax: Math.PI },
    "period2-circle": { tMin: 0, tMax: Math.PI },
  };

export interface EditablePathState {
  mode: PathKind;
  points: Complex[];
  trimEpsilon: number;
  sampleCount: number;
}

export class EditablePath {
  mode: PathKind = "polyline";
  points: Complex[] = [];
  trimEpsilon = 0;
  sampleCount = 9;

  static fromState(state: EditablePathState): EditablePath {
    const p = new EditablePath();
    p.mode = state.mode;
    p.points = state.points.map((c) => ({ re: c.re, im: c.im }));
    p.trimEpsilon = state.trimEpsilon;
    p.sampleCount = state.sampleCount;
    return p;
  }

  state(): EditablePathState {
    return {
      mode: this.mode,
      points: this.points.map((c) => ({ re: c.re, im: c.im })),
      trimEpsilon: this.trimEpsilon,
      sampleCount: this.sampleCount,
    };
  }

  setMode(mode: PathKind): void {
    this.mode = mode;
    if (mode !== "polyline") this.trimEpsilon = Math.min(this.trimEpsilon, 0.5);
  }

  addPoint(c: Complex): void {
    this.points.push({ re: c.re, im: c.im });
  }

  movePoint(index: number, c: Complex): void {
    if (index < 0 || index >= this.points.length) throw new RangeError(`no point ${index}`);
    this.points[index] = { re: c.re, im: c.im };
  }

  removePoint(index: number): void {
    this.points.splice(index, 1);
  }

  /** Index of the first point within `radius` of c, or -1. */
  hitTest(c: Complex, radius: number): number {
    for (let i = 0; i < this.points.length; i++) {
      const p = this.points[i];
      if (Math.hypot(p.re - c.re, p.im - c.im) <= radius) return i;
    }
    return -1;
  }

  /** Whether the current state can be previewed/serialized at all. */
  isValid(): boolean {
    if (this.mode === "polyline") return this.points.length >= 2;
    const { tMin, tMax } = PRESET_RANGES[this.mode];
    return tMin + this.trimEpsilon < tMax - this.trimEpsilon;
  }

  validationMessage(): string | null {
    if (this.isValid()) return null;
    return this.mode === "polyline"
      ? "click at least two control points"
      : "trim leaves an empty parameter range";
  }

  toPathSpec(): PathSpecJson {
    if (!this.isValid()) throw new Error(this.validationMessage() ?? "invalid path");
    if (this.mode === "polyline") {
      return {
        kind: "polyline",
        t_min: 0,
        t_max: 1,
        trim_epsilon: this.trimEpsilon,
        points: this.points.map((p) => [p.re, p.im] as [number, number]),
      };
    }
    const { tMin, tMax } = PRESET_RANGES[this.mode];
    return { kind: this.mode, t_min: tMin, t_max: tMax, trim_epsilon: this.trimEpsilon };
  }
}

/** Structural check mirroring the server-side PathSpec validation, used to
 * guard exports and persisted states. */
export function isValidPathSpec(spec: PathSpecJson): boolean {
  if (!["polyline", "cardioid-boundary", "period2-circle"].includes(spec.kind)) return false;
  if (!(Number.isFinite(spec.t_min) && Number.isFinite(spec.t_max))) return false;
  if (!(spec.trim_epsilon >= 0)) return false;
  if (!(spec.t_min + spec.trim_epsilon < spec.t_max - spec.trim_epsilon)) return false;
  if (spec.kind === "polyline") {
    if (!spec.points || spec.points.length < 2) return false;
    if (!spec.points.every((p) => p.length === 2 && p.every(Number.isFinite))) return false;
  }
  return true;
}
