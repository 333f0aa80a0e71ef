/** In-memory stand-in for the review service, used by the tests.
 *
 * Mirrors the server's behavior at the wire level: ROI convexity
 * validation with a 422 detail string, flag storage that persists across
 * client instances, and the sequence listing.
 */

import type { ReviewFlag, RoiBody, SequenceInfo } from "./types.js";

function convexClockwise(src: [number, number][]): boolean {
  if (src.length !== 4) return false;
  for (let k = 0; k < 4; k++) {
    const [ax, ay] = src[k]!;
    const [bx, by] = src[(k + 1) % 4]!;
    const [cx, cy] = src[(k + 2) % 4]!;
    const cross = (bx - ax) * (cy - by) - (by - ay) * (cx - bx);
    if (cross <= 0) return false;
  }
  return true;
}

export class MockServer {
  rois = new Map<string, RoiBody>();
  flags = new Map<string, ReviewFlag>();
  requests: { method: string; path: string; body: unknown }[] = [];

  constructor(readonly sequences: SequenceInfo[]) {}

  fetch = async (input: string | URL | Request, init?: RequestInit): Promise<Response> => {
    const url = typeof input === "string" ? input : input.toString();
    const path = url.replace(/^https?:\/\/[^/]+/, "");
    const method = init?.method ?? "GET";
    const body = init?.body ? JSON.parse(init.body as string) : undefined;
    this.requests.push({ method, path, body });
    return this.route(method, path, body);
  };

  private json(status: number, payload: unknown): Response {
    return new Response(JSON.stringify(payload), {
      status,
      headers: { "Content-Type": "application/json" },
    });
  }

  private route(method: string, path: string, body: unknown): Response {
    if (method === "GET" && path === "/api/sequences") {
      return this.json(200, this.sequences);
    }

    let m = path.match(/^\/api\/sequences\/([^/]+)\/roi$/);
    if (m) {
      const seq = this.sequences.find((s) => s.id === m![1]);
      if (!seq) return this.json(404, { detail: "unknown sequence" });
      if (method === "POST") {
        const roi = body as RoiBody;
        const [w, h] = seq.dims;
        const outside = roi.src.some(([x, y]) => x < 0 || x > w - 1 || y < 0 || y > h - 1);
        if (outside) return this.json(422, { detail: "vertex out of bounds" });
        if (!convexClockwise(roi.src)) {
          return this.json(422, { detail: "non-convex: vertices do not form a convex quadrilateral" });
        }
        this.rois.set(seq.id, roi);
        return this.json(200, roi);
      }
      const stored = this.rois.get(seq.id);
      return stored ? this.json(200, stored) : this.json(404, { detail: "no ROI stored" });
    }

    m = path.match(/^\/api\/sequences\/([^/]+)\/flags\/(\d+)$/);
    if (m) {
      const key = `${m[1]}:${m[2]}`;
      if (method === "PUT") {
        const { verdict, note } = body as { verdict: string; note?: string | null };
        if (verdict !== "accepted" && verdict !== "flagged") {
          return this.json(422, { detail: "verdict must be accepted or flagged" });
        }
        const flag: ReviewFlag = { frame_index: Number(m[2]), verdict, note: note ?? null };
        this.flags.set(key, flag); // latest wins
        return this.json(200, flag);
      }
      const flag = this.flags.get(key);
      return flag ? this.json(200, flag) : this.json(404, { detail: "frame not flagged" });
    }

    return this.json(404, { detail: `no route for ${method} ${path}` });
  }
}
