import { describe, expect, it } from "vitest";

import { ApiClient, ApiError } from "./api.js";
import { MockServer } from "./mockServer.js";

function setup() {
  const server = new MockServer([
    { id: "s1", frame_count: 3, dims: [640, 480] },
    { id: "s2", frame_count: 7, dims: [1280, 720] },
  ]);
  return { server, api: new ApiClient("", server.fetch) };
}

describe("ApiClient", () => {
  it("lists sequences", async () => {
    const { api } = setup();
    const seqs = await api.listSequences();
    expect(seqs.map((s) => s.id)).toEqual(["s1", "s2"]);
  });

  it("roi round-trip is field-identical", async () => {
    const { api } = setup();
    const body = {
      src: [[100, 200], [540, 200], [620, 470], [20, 470]] as [number, number][],
      dst_width: 900,
      dst_height: 423,
    };
    await api.postRoi("s1", body);
    expect(await api.getRoi("s1")).toEqual(body);
  });

  it("surfaces 422 detail text", async () => {
    const { api } = setup();
    const err = await api
      .postRoi("s1", { src: [[700, 10], [540, 200], [620, 470], [20, 470]] })
      .catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.status).toBe(422);
    expect(err.detail).toBe("vertex out of bounds");
  });

  it("missing flag resolves to null, other errors throw", async () => {
    const { api } = setup();
    expect(await api.getFlag("s1", 0)).toBeNull();
    const err = await api.getJob("nope").catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.status).toBe(404);
  });

  it("builds the two image endpoint urls", () => {
    const api = new ApiClient("http://localhost:8000");
    expect(api.frameUrl("s1", 3)).toBe("http://localhost:8000/api/sequences/s1/frames/3");
    expect(api.overlayUrl("s1", 3)).toBe(
      "http://localhost:8000/api/sequences/s1/annotations/3/overlay",
    );
  });
});
