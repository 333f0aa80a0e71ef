import { describe, expect, it } from "vitest";

import { ApiClient, ApiError } from "./api.js";
import { MockServer } from "./mockServer.js";
import {
  addPoint,
  canSubmit,
  emptyDraft,
  hitTest,
  isConvexQuad,
  movePoint,
  orderVertices,
  removeLast,
  toRoiBody,
} from "./roiDraft.js";
import { displayToImagePixel } from "./viewTransform.js";

const TRAPEZOID_CLICKS: [number, number][] = [
  [100, 200],
  [540, 200],
  [620, 470],
  [20, 470],
];

function draftFromDisplayClicks(scale: number, displayClicks: [number, number][]) {
  const view = { scale, offsetX: 0, offsetY: 0 };
  let draft = emptyDraft();
  for (const [x, y] of displayClicks) {
    draft = addPoint(draft, displayToImagePixel(view, { x, y }));
  }
  return draft;
}

describe("click-to-image fidelity", () => {
  it("unscaled clicks post exactly those integers", () => {
    const draft = draftFromDisplayClicks(1, TRAPEZOID_CLICKS);
    expect(toRoiBody(draft).src).toEqual(TRAPEZOID_CLICKS);
  });

  it("a 50% view maps display (50, 100) to image (100, 200)", () => {
    const displays = TRAPEZOID_CLICKS.map(([x, y]) => [x / 2, y / 2] as [number, number]);
    const draft = draftFromDisplayClicks(0.5, displays);
    expect(toRoiBody(draft).src).toEqual(TRAPEZOID_CLICKS);
  });

  it("a 2x view maps display (200, 400) to image (100, 200)", () => {
    const displays = TRAPEZOID_CLICKS.map(([x, y]) => [x * 2, y * 2] as [number, number]);
    const draft = draftFromDisplayClicks(2, displays);
    expect(toRoiBody(draft).src).toEqual(TRAPEZOID_CLICKS);
  });
});

describe("draft state", () => {
  it("caps at four points", () => {
    let draft = draftFromDisplayClicks(1, TRAPEZOID_CLICKS);
    draft = addPoint(draft, { x: 1, y: 1 });
    expect(draft.points).toHaveLength(4);
  });

  it("three points cannot submit", () => {
    const draft = draftFromDisplayClicks(1, TRAPEZOID_CLICKS.slice(0, 3));
    expect(canSubmit(draft)).toBe(false);
  });

  it("undo removes the newest point", () => {
    let draft = draftFromDisplayClicks(1, TRAPEZOID_CLICKS);
    draft = removeLast(draft);
    expect(draft.points).toHaveLength(3);
  });

  it("dragging a vertex moves it", () => {
    let draft = draftFromDisplayClicks(1, TRAPEZOID_CLICKS);
    const hit = hitTest(draft, { x: 101, y: 201 }, 5);
    expect(hit).toBe(0);
    draft = movePoint(draft, hit, { x: 110, y: 210 });
    expect(draft.points[0]).toEqual({ x: 110, y: 210 });
  });
});

describe("vertex auto-ordering", () => {
  it("sorts any click order into TL, TR, BR, BL", () => {
    const shuffles: [number, number][][] = [
      [[620, 470], [100, 200], [20, 470], [540, 200]],
      [[540, 200], [620, 470], [100, 200], [20, 470]],
      [[20, 470], [620, 470], [540, 200], [100, 200]],
    ];
    for (const clicks of shuffles) {
      const draft = draftFromDisplayClicks(1, clicks);
      expect(toRoiBody(draft).src).toEqual(TRAPEZOID_CLICKS);
    }
  });

  it("ordered trapezoid is convex", () => {
    const ordered = orderVertices(TRAPEZOID_CLICKS.map(([x, y]) => ({ x, y })));
    expect(isConvexQuad(ordered)).toBe(true);
  });
});

describe("non-convex drafts", () => {
  // one point inside the triangle of the others: no ordering fixes it
  const DENT: [number, number][] = [
    [0, 0],
    [100, 0],
    [100, 100],
    [60, 40],
  ];

  it("are blocked client-side", () => {
    const draft = draftFromDisplayClicks(1, DENT);
    expect(canSubmit(draft)).toBe(false);
  });

  it("are rejected server-side with a surfaced 422", async () => {
    const server = new MockServer([{ id: "s1", frame_count: 3, dims: [640, 480] }]);
    const api = new ApiClient("", server.fetch);
    const draft = draftFromDisplayClicks(1, DENT);
    // bypass the client-side gate deliberately
    const err = await api.postRoi("s1", toRoiBody(draft)).catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.status).toBe(422);
    expect(err.detail).toMatch(/convex/);
  });

  it("valid drafts pass the same server validation", async () => {
    const server = new MockServer([{ id: "s1", frame_count: 3, dims: [640, 480] }]);
    const api = new ApiClient("", server.fetch);
    const draft = draftFromDisplayClicks(1, TRAPEZOID_CLICKS);
    const stored = await api.postRoi("s1", toRoiBody(draft, 900, 423));
    expect(stored.src).toEqual(TRAPEZOID_CLICKS);
    expect(server.rois.get("s1")?.dst_width).toBe(900);
  });
});
