/** Mapping between the complex parameter plane and canvas pixels, with
 * pan and zoom.  y runs upward in the plane and downward on the canvas. */

import type { Complex } from "./types.js";
import type { MandelbrotWindow } from "./api.js";

export class Viewport {
  constructor(
    public xMin = -2.0,
    public xMax = 1.0,
    public yMin = -1.5,
    public yMax = 1.5,
    public widthPx = 600,
    public heightPx = 600,
  ) {}

  get window(): MandelbrotWindow {
    return { xMin: this.xMin, xMax: this.xMax, yMin: this.yMin, yMax: this.yMax };
  }

  toPixel(c: Complex): { x: number; y: number } {
    return {
      x: ((c.re - this.xMin) / (this.xMax - this.xMin)) * this.widthPx,
      y: (1 - (c.im - this.yMin) / (this.yMax - this.yMin)) * this.heightPx,
    };
  }

  toComplex(x: number, y: number): Complex {
    return {
      re: this.xMin + (x / this.widthPx) * (this.xMax - this.xMin),
      im: this.yMin + (1 - y / this.heightPx) * (this.yMax - this.yMin),
    };
  }

  /** Zoom by `factor` (>1 zooms in) keeping the plane point under the
   * given pixel fixed. */
  zoomAt(x: number, y: number, factor: number): void {
    const anchor = this.toComplex(x, y);
    const w = (this.xMax - this.xMin) / factor;
    const h = (this.yMax - this.yMin) / factor;
    const fx = x / this.widthPx;
    const fy = 1 - y / this.heightPx;
    this.xMin = anchor.re - fx * w;
    this.xMax = this.xMin + w;
    this.yMin = anchor.im - fy * h;
    this.yMax = this.yMin + h;
  }

  panByPixels(dx: number, dy: number): void {
    const sx = (this.xMax - this.xMin) / this.widthPx;
    const sy = (this.yMax - this.yMin) / this.heightPx;
    this.xMin -= dx * sx;
    this.xMax -= dx * sx;
    this.yMin += dy * sy;
    this.yMax += dy * sy;
  }

  contains(c: Complex): boolean {
    return c.re >= this.xMin && c.re <= this.xMax && c.im >= this.yMin && c.im <= this.yMax;
  }

  /** Pan the smallest amount that brings c inside, with a small margin. */
  ensureVisible(c: Complex, marginFrac = 0.05): void {
    const mx = (this.xMax - this.xMin) * marginFrac;
    const my = (this.yMax - this.yMin) * marginFrac;
    let dx = 0;
    let dy = 0;
    if (c.re < this.xMin + mx) dx = c.re - (this.xMin + mx);
    if (c.re > this.xMax - mx) dx = c.re - (this.xMax - mx);
    if (c.im < this.yMin + my) dy = c.im - (this.yMin + my);
    if (c.im > this.yMax - my) dy = c.im - (this.yMax - my);
    this.xMin += dx;
    this.xMax += dx;
    this.yMin += dy;
    this.yMax += dy;
  }
}
