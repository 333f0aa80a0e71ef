/** ROI draft state: up to four clicked points, any click order.
 *
 * Points are auto-sorted into the server's fixed top-left, top-right,
 * bottom-right, bottom-left convention before posting. Submission is
 * enabled only for four points in strictly convex position; the server
 * re-validates and its 422 text is surfaced verbatim.
 */

import type { Point, RoiBody } from "./types.js";

export interface RoiDraft {
  points: Point[]; // click order, length 0..4
  locked: boolean;
}

export function emptyDraft(): RoiDraft {
  return { points: [], locked: false };
}

export function addPoint(draft: RoiDraft, p: Point): RoiDraft {
  if (draft.locked || draft.points.length >= 4) return draft;
  return { ...draft, points: [...draft.points, p] };
}

export function movePoint(draft: RoiDraft, index: number, p: Point): RoiDraft {
  if (draft.locked || index < 0 || index >= draft.points.length) return draft;
  const points = draft.points.slice();
  points[index] = p;
  return { ...draft, points };
}

export function removeLast(draft: RoiDraft): RoiDraft {
  if (draft.locked || draft.points.length === 0) return draft;
  return { ...draft, points: draft.points.slice(0, -1) };
}

/** Index of the draft vertex within `radius` of p, or -1 (for dragging). */
export function hitTest(draft: RoiDraft, p: Point, radius: number): number {
  for (let i = 0; i < draft.points.length; i++) {
    const q = draft.points[i]!;
    if (Math.hypot(q.x - p.x, q.y - p.y) <= radius) return i;
  }
  return -1;
}

/** Sort by angle about the centroid, then rotate so the first vertex is the
 * top-left-most one. Image coordinates have y down, so ascending angle walks
 * the quad clockwise on screen: TL, TR, BR, BL. */
export function orderVertices(points: Point[]): Point[] {
  const cx = points.reduce((s, p) => s + p.x, 0) / points.length;
  const cy = points.reduce((s, p) => s + p.y, 0) / points.length;
  const sorted = points
    .slice()
    .sort((a, b) => Math.atan2(a.y - cy, a.x - cx) - Math.atan2(b.y - cy, b.x - cx));
  let start = 0;
  for (let i = 1; i < sorted.length; i++) {
    const a = sorted[i]!;
    const best = sorted[start]!;
    if (a.x + a.y < best.x + best.y) start = i;
  }
  return [...sorted.slice(start), ...sorted.slice(0, start)];
}

/** Strictly convex: consecutive edge cross products all positive (y-down
 * clockwise order) and no three vertices collinear. */
export function isConvexQuad(ordered: Point[]): boolean {
  if (ordered.length !== 4) return false;
  for (let k = 0; k < 4; k++) {
    const a = ordered[k]!;
    const b = ordered[(k + 1) % 4]!;
    const c = ordered[(k + 2) % 4]!;
    const cross = (b.x - a.x) * (c.y - b.y) - (b.y - a.y) * (c.x - b.x);
    if (cross <= 0) return false;
  }
  return true;
}

export function canSubmit(draft: RoiDraft): boolean {
  return draft.points.length === 4 && isConvexQuad(orderVertices(draft.points));
}

export function toRoiBody(draft: RoiDraft, dstWidth?: number, dstHeight?: number): RoiBody {
  const ordered = orderVertices(draft.points);
  const body: RoiBody = { src: ordered.map((p) => [p.x, p.y]) };
  if (dstWidth !== undefined) body.dst_width = dstWidth;
  if (dstHeight !== undefined) body.dst_height = dstHeight;
  return body;
}
