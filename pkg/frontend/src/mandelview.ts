/** Mandelbrot backdrop tiling: split the viewport into a small tile grid,
 * fetch tiles with a bounded number of concurrent requests, and keep the
 * previous image when the server is unreachable (stale tiles beat a blank
 * screen while panning). */

import type { ApiClient, MandelbrotWindow } from "./api.js";

export interface Tile {
  window: MandelbrotWindow;
  px: number;
  /** destination rectangle in canvas pixels */
  dest: { x: number; y: number; w: number; h: number };
}

export function tileViewport(
  win: MandelbrotWindow,
  widthPx: number,
  heightPx: number,
  grid = 2,
  tilePx = 256,
): Tile[] {
  const tiles: Tile[] = [];
  const dw = (win.xMax - win.xMin) / grid;
  const dh = (win.yMax - win.yMin) / grid;
  for (let ty = 0; ty < grid; ty++) {
    for (let tx = 0; tx < grid; tx++) {
      tiles.push({
        window: {
          xMin: win.xMin + tx * dw,
          xMax: win.xMin + (tx + 1) * dw,
          // canvas y runs downward; tile row 0 is the top = max imaginary
          yMin: win.yMax - (ty + 1) * dh,
          yMax: win.yMax - ty * dh,
        },
        px: tilePx,
        dest: {
          x: (tx * widthPx) / grid,
          y: (ty * heightPx) / grid,
          w: widthPx / grid,
          h: heightPx / grid,
        },
      });
    }
  }
  return tiles;
}

export class TileLoader {
  /** Highest number of requests ever simultaneously in flight (tests). */
  peakConcurrency = 0;
  private active = 0;

  constructor(
    private api: ApiClient,
    private maxConcurrent = 6,
    private maxIter = 200,
  ) {}

  /** Fetch every tile, bounded-concurrently.  Resolves with the tiles that
   * loaded; failed tiles are reported through onError (the caller keeps
   * whatever it drew before). */
  async loadAll(
    tiles: Tile[],
    onTile: (tile: Tile, blob: Blob) => void,
    onError: (err: unknown) => void,
  ): Promise<void> {
    const queue = [...tiles];
    const workers = Array.from({ length: Math.min(this.maxConcurrent, queue.length) }, () =>
      this.worker(queue, onTile, onError),
    );
    await Promise.all(workers);
  }

  private async worker(
    queue: Tile[],
    onTile: (tile: Tile, blob: Blob) => void,
    onError: (err: unknown) => void,
  ): Promise<void> {
    for (;;) {
      const tile = queue.shift();
      if (!tile) return;
      this.active++;
      this.peakConcurrency = Math.max(this.peakConcurrency, this.active);
      try {
        const blob = await this.api.fetchMandelbrotTile(tile.window, tile.px, this.maxIter);
        onTile(tile, blob);
      } catch (err) {
        onError(err);
      } finally {
        this.active--;
      }
    }
  }
}
