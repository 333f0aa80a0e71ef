/** Review gallery state: frame pager, overlay toggle, flag cache.
 *
 * The gallery only ever displays server-produced images; toggling the
 * overlay swaps which endpoint the <img> points at. Flags are applied
 * optimistically and reconciled with the server response.
 */

import type { ApiClient } from "./api.js";
import type { ReviewFlag, Verdict } from "./types.js";

export interface ReviewState {
  seqId: string;
  index: number;
  total: number;
  overlayVisible: boolean;
  flags: Map<number, ReviewFlag>;
  notice: string | null;
}

export function initialReview(seqId: string, total: number): ReviewState {
  return { seqId, index: 0, total, overlayVisible: true, flags: new Map(), notice: null };
}

export function clampIndex(state: ReviewState, index: number): number {
  return Math.max(0, Math.min(state.total - 1, index));
}

export function step(state: ReviewState, delta: number): ReviewState {
  return { ...state, index: clampIndex(state, state.index + delta), notice: null };
}

/** Out-of-range jump targets clamp and leave a notice. */
export function jumpTo(state: ReviewState, target: number): ReviewState {
  const index = clampIndex(state, target);
  const notice =
    index === target ? null : `frame ${target} out of range, showing ${index}`;
  return { ...state, index, notice };
}

export function toggleOverlay(state: ReviewState): ReviewState {
  return { ...state, overlayVisible: !state.overlayVisible };
}

/** Pure endpoint selection; no pixels are produced client-side. */
export function imageUrl(state: ReviewState, api: ApiClient): string {
  return state.overlayVisible
    ? api.overlayUrl(state.seqId, state.index)
    : api.frameUrl(state.seqId, state.index);
}

export async function loadFlag(state: ReviewState, api: ApiClient): Promise<ReviewState> {
  const flag = await api.getFlag(state.seqId, state.index);
  const flags = new Map(state.flags);
  if (flag) flags.set(state.index, flag);
  else flags.delete(state.index);
  return { ...state, flags };
}

/** PUT the verdict, then trust the server's echo (reconciliation). */
export async function applyVerdict(
  state: ReviewState,
  api: ApiClient,
  verdict: Verdict,
  note?: string,
): Promise<ReviewState> {
  const saved = await api.putFlag(state.seqId, state.index, verdict, note);
  const flags = new Map(state.flags);
  flags.set(saved.frame_index, saved);
  return { ...state, flags };
}

export type ReviewAction =
  | { kind: "step"; delta: number }
  | { kind: "verdict"; verdict: Verdict }
  | { kind: "toggle-overlay" };

/** Keyboard shortcuts for the gallery. */
export function actionForKey(key: string): ReviewAction | null {
  switch (key) {
    case "ArrowRight":
    case "n":
      return { kind: "step", delta: 1 };
    case "ArrowLeft":
    case "p":
      return { kind: "step", delta: -1 };
    case "a":
      return { kind: "verdict", verdict: "accepted" };
    case "f":
      return { kind: "verdict", verdict: "flagged" };
    case "t":
      return { kind: "toggle-overlay" };
    default:
      return null;
  }
}
