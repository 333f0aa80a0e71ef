/** Display <-> image coordinate mapping for the zoomable frame view.
 *
 * The displayed frame is the image scaled by `scale` and shifted by the
 * pan offset (in display pixels). All picking math inverts this exactly,
 * so clicked coordinates are true image coordinates regardless of zoom.
 */

import type { Point } from "./types.js";

export interface ViewTransform {
  scale: number;
  offsetX: number;
  offsetY: number;
}

export const IDENTITY: ViewTransform = { scale: 1, offsetX: 0, offsetY: 0 };

export function displayToImage(t: ViewTransform, display: Point): Point {
  return {
    x: (display.x - t.offsetX) / t.scale,
    y: (display.y - t.offsetY) / t.scale,
  };
}

export function imageToDisplay(t: ViewTransform, image: Point): Point {
  return {
    x: image.x * t.scale + t.offsetX,
    y: image.y * t.scale + t.offsetY,
  };
}

/** Clicks snap to whole image pixels. */
export function displayToImagePixel(t: ViewTransform, display: Point): Point {
  const p = displayToImage(t, display);
  return { x: Math.round(p.x), y: Math.round(p.y) };
}

export function zoomAround(t: ViewTransform, factor: number, anchor: Point): ViewTransform {
  const scale = Math.min(16, Math.max(1 / 16, t.scale * factor));
  const ratio = scale / t.scale;
  return {
    scale,
    offsetX: anchor.x - (anchor.x - t.offsetX) * ratio,
    offsetY: anchor.y - (anchor.y - t.offsetY) * ratio,
  };
}

export function pan(t: ViewTransform, dx: number, dy: number): ViewTransform {
  return { ...t, offsetX: t.offsetX + dx, offsetY: t.offsetY + dy };
}
