/** Label formatting for server-reported path samples.  The numbers shown
 * are exactly the server's; nothing is recomputed client-side. */

import type { PreviewFrame } from "./types.js";

export function formatC(re: number, im: number, digits = 6): string {
  const sign = im < 0 ? "-" : "+";
  return `c = ${re.toFixed(digits)} ${sign} ${Math.abs(im).toFixed(digits)}i`;
}

export function formatEndpoints(frames: PreviewFrame[], digits = 4): string {
  if (!frames.length) return "";
  const first = frames[0];
  const last = frames[frames.length - 1];
  const one = (f: PreviewFrame) =>
    `${f.c_re.toFixed(digits)}${f.c_im >= 0 ? "+" : ""}${f.c_im.toFixed(digits)}i`;
  return `start c = ${one(first)}, end c = ${one(last)}`;
}
