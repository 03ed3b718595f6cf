/** Cheap client-side side view: each preview frame contributes one slab
 * whose horizontal extent is the white span of that frame, stacked bottom
 * to top.  True geometry comes from the mesh; this is only a hint while
 * editing. */

export interface MaskLike {
  width: number;
  height: number;
  /** RGBA bytes, canvas ImageData layout (row 0 at the top). */
  data: Uint8ClampedArray;
}

/** [min, max] white-pixel column of a grayscale-in-RGBA mask, or null for
 * an all-black frame.  A pixel counts as white above the given level. */
export function whiteSpan(mask: MaskLike, level = 128): [number, number] | null {
  let min = mask.width;
  let max = -1;
  for (let y = 0; y < mask.height; y++) {
    const row = y * mask.width * 4;
    for (let x = 0; x < mask.width; x++) {
      if (mask.data[row + x * 4] >= level) {
        if (x < min) min = x;
        if (x > max) max = x;
      }
    }
  }
  return max < 0 ? null : [min, max];
}

export interface SilhouetteSlab {
  frame: number;
  span: [number, number] | null;
}

export function stackSilhouette(masks: MaskLike[], level = 128): SilhouetteSlab[] {
  return masks.map((m, i) => ({ frame: i, span: whiteSpan(m, level) }));
}
