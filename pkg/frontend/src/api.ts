/** Typed client for the review service; fetch is injectable for tests. */

import type { Annotation, JobStatus, ReviewFlag, RoiBody, SequenceInfo, Verdict } from "./types.js";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
  }
}

async function errorDetail(resp: Response): Promise<string> {
  try {
    const body = (await resp.json()) as { detail?: unknown };
    if (typeof body.detail === "string") return body.detail;
    return JSON.stringify(body.detail ?? body);
  } catch {
    return resp.statusText;
  }
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: typeof fetch = globalThis.fetch.bind(globalThis),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await this.fetchFn(`${this.baseUrl}${path}`, init);
    if (!resp.ok) {
      throw new ApiError(resp.status, await errorDetail(resp));
    }
    return (await resp.json()) as T;
  }

  listSequences(): Promise<SequenceInfo[]> {
    return this.request<SequenceInfo[]>("/api/sequences");
  }

  getRoi(seqId: string): Promise<RoiBody> {
    return this.request<RoiBody>(`/api/sequences/${seqId}/roi`);
  }

  postRoi(seqId: string, body: RoiBody): Promise<RoiBody> {
    return this.request<RoiBody>(`/api/sequences/${seqId}/roi`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  startRun(seqId: string): Promise<{ job_id: string }> {
    return this.request<{ job_id: string }>(`/api/sequences/${seqId}/run`, { method: "POST" });
  }

  getJob(jobId: string): Promise<JobStatus> {
    return this.request<JobStatus>(`/api/jobs/${jobId}`);
  }

  getAnnotation(seqId: string, index: number): Promise<Annotation> {
    return this.request<Annotation>(`/api/sequences/${seqId}/annotations/${index}`);
  }

  /** Returns null for an unflagged frame (404). */
  async getFlag(seqId: string, index: number): Promise<ReviewFlag | null> {
    try {
      return await this.request<ReviewFlag>(`/api/sequences/${seqId}/flags/${index}`);
    } catch (err) {
      if (err instanceof ApiError && err.status === 404) return null;
      throw err;
    }
  }

  putFlag(seqId: string, index: number, verdict: Verdict, note?: string): Promise<ReviewFlag> {
    return this.request<ReviewFlag>(`/api/sequences/${seqId}/flags/${index}`, {
      method: "PUT",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ verdict, note: note ?? null }),
    });
  }

  /** Raw frame endpoint; the browser loads these via <img src>. */
  frameUrl(seqId: string, index: number): string {
    return `${this.baseUrl}/api/sequences/${seqId}/frames/${index}`;
  }

  /** Server-rendered overlay endpoint; the client never draws annotations. */
  overlayUrl(seqId: string, index: number): string {
    return `${this.baseUrl}/api/sequences/${seqId}/annotations/${index}/overlay`;
  }
}
