// Optional integration pass against a real running service:
//   TINYSEARCH_SERVICE_URL=http://127.0.0.1:8080 npx vitest run tests/live.test.ts
// Skipped unless the env var is set.
import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { SearchController } from "../src/state.js";

const base = process.env.TINYSEARCH_SERVICE_URL ?? "";

describe.skipIf(!base)("against the live service", () => {
  const api = new ApiClient((url, init) => fetch(url, init), base);

  it("runs the football query loop and matches the API ordering", async () => {
    const controller = new SearchController(api);
    controller.setQuery("football in usa");
    await controller.submitQuery();

    const state = controller.getState();
    expect(state.status.kind).toBe("idle");
    expect(state.results.length).toBeLessThanOrEqual(5);
    const direct = await api.search("football in usa", 5, state.scorer);
    expect(state.results.map((r) => r.doc_id)).toEqual(direct.results.map((r) => r.doc_id));

    await controller.toggleScorer();
    expect(controller.getState().scorer).toBe("cosine");
    const cosine = await api.search("football in usa", 5, "cosine");
    expect(controller.getState().results.map((r) => r.doc_id)).toEqual(
      cosine.results.map((r) => r.doc_id),
    );
  });

  it("reports a healthy corpus", async () => {
    const health = await api.health();
    expect(health.status).toBe("ok");
    expect(health.corpus_size).toBeGreaterThan(0);
  });
});
