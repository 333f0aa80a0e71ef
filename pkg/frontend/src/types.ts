/** DTOs mirroring the review service API. */

export interface Point {
  x: number;
  y: number;
}

export interface SequenceInfo {
  id: string;
  frame_count: number;
  dims: [number, number]; // [width, height]
}

/** ROI wire format: vertices ordered top-left, top-right, bottom-right, bottom-left. */
export interface RoiBody {
  src: [number, number][];
  dst_width?: number;
  dst_height?: number;
}

export type JobState = "queued" | "running" | "done" | "failed";

export interface JobStatus {
  job_id: string;
  sequence_id: string;
  state: JobState;
  frames_done: number;
  frames_total: number;
  error: string | null;
}

export interface Annotation {
  present: boolean;
  pixels: [number, number][];
}

export type Verdict = "accepted" | "flagged";

export interface ReviewFlag {
  frame_index: number;
  verdict: Verdict;
  note: string | null;
}
