/** Browser wiring: sequence list, ROI picker canvas, run launcher,
 * review gallery. All pipeline imagery comes from the server; the canvas
 * below draws only the draft handles over the frame, never annotations.
 */

import { ApiClient, ApiError } from "./api.js";
import {
  RoiDraft,
  addPoint,
  canSubmit,
  emptyDraft,
  hitTest,
  movePoint,
  orderVertices,
  removeLast,
  toRoiBody,
} from "./roiDraft.js";
import {
  ReviewState,
  actionForKey,
  applyVerdict,
  imageUrl,
  initialReview,
  jumpTo,
  loadFlag,
  step,
  toggleOverlay,
} from "./review.js";
import type { SequenceInfo } from "./types.js";
import { IDENTITY, ViewTransform, displayToImagePixel, imageToDisplay, zoomAround } from "./viewTransform.js";

const api = new ApiClient("");

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

const state = {
  sequences: [] as SequenceInfo[],
  current: null as SequenceInfo | null,
  draft: emptyDraft(),
  view: { ...IDENTITY } as ViewTransform,
  frameImage: null as HTMLImageElement | null,
  review: null as ReviewState | null,
  dragIndex: -1,
};

function setStatus(text: string, isError = false) {
  const node = el<HTMLDivElement>("status");
  node.textContent = text;
  node.className = isError ? "status error" : "status";
}

async function refreshSequences() {
  state.sequences = await api.listSequences();
  const list = el<HTMLSelectElement>("sequence-select");
  list.innerHTML = "";
  for (const seq of state.sequences) {
    const option = document.createElement("option");
    option.value = seq.id;
    option.textContent = `${seq.id} (${seq.frame_count} frames, ${seq.dims[0]}x${seq.dims[1]})`;
    list.appendChild(option);
  }
  if (state.sequences.length) selectSequence(state.sequences[0]!.id);
}

function selectSequence(id: string) {
  state.current = state.sequences.find((s) => s.id === id) ?? null;
  state.draft = emptyDraft();
  state.view = { ...IDENTITY };
  if (!state.current) return;
  const img = new Image();
  img.onload = () => {
    state.frameImage = img;
    drawPicker();
  };
  img.src = api.frameUrl(id, 0);
  state.review = initialReview(id, state.current.frame_count);
  updateReviewView();
}

function drawPicker() {
  const canvas = el<HTMLCanvasElement>("picker-canvas");
  const ctx = canvas.getContext("2d")!;
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  if (state.frameImage) {
    const t = state.view;
    ctx.save();
    ctx.setTransform(t.scale, 0, 0, t.scale, t.offsetX, t.offsetY);
    ctx.drawImage(state.frameImage, 0, 0);
    ctx.restore();
  }
  // draft handles and the would-be trapezoid, in display space
  const pts = state.draft.points.map((p) => imageToDisplay(state.view, p));
  if (pts.length === 4) {
    const ordered = orderVertices(state.draft.points).map((p) => imageToDisplay(state.view, p));
    ctx.strokeStyle = canSubmit(state.draft) ? "#2e2" : "#e44";
    ctx.lineWidth = 1.5;
    ctx.beginPath();
    ordered.forEach((p, i) => (i ? ctx.lineTo(p.x, p.y) : ctx.moveTo(p.x, p.y)));
    ctx.closePath();
    ctx.stroke();
  }
  ctx.fillStyle = "#fc0";
  for (const p of pts) {
    ctx.beginPath();
    ctx.arc(p.x, p.y, 4, 0, Math.PI * 2);
    ctx.fill();
  }
  el<HTMLButtonElement>("roi-submit").disabled = !canSubmit(state.draft);
  el<HTMLSpanElement>("roi-count").textContent = `${state.draft.points.length}/4 points`;
}

function canvasPoint(evt: MouseEvent): { x: number; y: number } {
  const canvas = el<HTMLCanvasElement>("picker-canvas");
  const rect = canvas.getBoundingClientRect();
  return {
    x: ((evt.clientX - rect.left) * canvas.width) / rect.width,
    y: ((evt.clientY - rect.top) * canvas.height) / rect.height,
  };
}

function wirePicker() {
  const canvas = el<HTMLCanvasElement>("picker-canvas");
  canvas.addEventListener("mousedown", (evt) => {
    const display = canvasPoint(evt);
    const image = displayToImagePixel(state.view, display);
    const hit = hitTest(state.draft, image, 6 / state.view.scale);
    if (hit >= 0) {
      state.dragIndex = hit;
    } else {
      state.draft = addPoint(state.draft, image);
      drawPicker();
    }
  });
  canvas.addEventListener("mousemove", (evt) => {
    if (state.dragIndex < 0) return;
    const image = displayToImagePixel(state.view, canvasPoint(evt));
    state.draft = movePoint(state.draft, state.dragIndex, image);
    drawPicker();
  });
  window.addEventListener("mouseup", () => (state.dragIndex = -1));
  canvas.addEventListener("wheel", (evt) => {
    evt.preventDefault();
    const anchor = canvasPoint(evt);
    state.view = zoomAround(state.view, evt.deltaY < 0 ? 1.25 : 0.8, anchor);
    drawPicker();
  });
  el<HTMLButtonElement>("roi-undo").addEventListener("click", () => {
    state.draft = removeLast(state.draft);
    drawPicker();
  });
  el<HTMLButtonElement>("roi-submit").addEventListener("click", async () => {
    if (!state.current) return;
    try {
      await api.postRoi(state.current.id, toRoiBody(state.draft));
      setStatus("ROI stored");
    } catch (err) {
      // validation failures keep the draft so the user can adjust it
      if (err instanceof ApiError) setStatus(`ROI rejected: ${err.detail}`, true);
      else setStatus(`network problem, draft kept: ${err}`, true);
    }
  });
  el<HTMLButtonElement>("run-start").addEventListener("click", async () => {
    if (!state.current) return;
    try {
      const { job_id } = await api.startRun(state.current.id);
      pollJob(job_id);
    } catch (err) {
      if (err instanceof ApiError) setStatus(`run refused: ${err.detail}`, true);
    }
  });
}

function pollJob(jobId: string) {
  const timer = setInterval(async () => {
    const job = await api.getJob(jobId);
    setStatus(`job ${job.job_id}: ${job.state} ${job.frames_done}/${job.frames_total}`);
    if (job.state === "done" || job.state === "failed") {
      clearInterval(timer);
      if (job.state === "failed") setStatus(`job failed: ${job.error}`, true);
      else updateReviewView();
    }
  }, 500);
}

async function updateReviewView() {
  if (!state.review) return;
  const img = el<HTMLImageElement>("review-image");
  img.src = imageUrl(state.review, api);
  img.onerror = () => {
    el<HTMLSpanElement>("review-badge").textContent = "not annotated";
    img.removeAttribute("src");
  };
  img.onload = () => (el<HTMLSpanElement>("review-badge").textContent = "");
  el<HTMLSpanElement>("review-pos").textContent =
    `frame ${state.review.index + 1}/${state.review.total}` +
    (state.review.notice ? ` (${state.review.notice})` : "");
  try {
    state.review = await loadFlag(state.review, api);
  } catch {
    // flag lookups are best-effort; the badge just stays empty
  }
  const flag = state.review.flags.get(state.review.index);
  el<HTMLSpanElement>("review-flag").textContent = flag
    ? `${flag.verdict}${flag.note ? `: ${flag.note}` : ""}`
    : "unreviewed";
}

function wireReview() {
  window.addEventListener("keydown", async (evt) => {
    if (!state.review || (evt.target as HTMLElement).tagName === "INPUT") return;
    const action = actionForKey(evt.key);
    if (!action) return;
    evt.preventDefault();
    if (action.kind === "step") state.review = step(state.review, action.delta);
    else if (action.kind === "toggle-overlay") state.review = toggleOverlay(state.review);
    else state.review = await applyVerdict(state.review, api, action.verdict);
    updateReviewView();
  });
  el<HTMLButtonElement>("review-prev").addEventListener("click", () => {
    state.review = step(state.review!, -1);
    updateReviewView();
  });
  el<HTMLButtonElement>("review-next").addEventListener("click", () => {
    state.review = step(state.review!, 1);
    updateReviewView();
  });
  el<HTMLButtonElement>("review-toggle").addEventListener("click", () => {
    state.review = toggleOverlay(state.review!);
    updateReviewView();
  });
  el<HTMLInputElement>("review-jump").addEventListener("change", (evt) => {
    const target = Number((evt.target as HTMLInputElement).value);
    if (Number.isFinite(target)) {
      state.review = jumpTo(state.review!, target - 1);
      updateReviewView();
    }
  });
  el<HTMLButtonElement>("review-accept").addEventListener("click", async () => {
    state.review = await applyVerdict(state.review!, api, "accepted");
    updateReviewView();
  });
  el<HTMLButtonElement>("review-flagit").addEventListener("click", async () => {
    state.review = await applyVerdict(state.review!, api, "flagged");
    updateReviewView();
  });
}

el<HTMLSelectElement>("sequence-select").addEventListener("change", (evt) =>
  selectSequence((evt.target as HTMLSelectElement).value),
);
wirePicker();
wireReview();
refreshSequences().catch((err) => setStatus(`cannot reach service: ${err}`, true));
