// Wire-format checks: the client must speak exactly the service's API.
import { describe, expect, it } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";

function jsonResponse(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

describe("ApiClient.search", () => {
  it("POSTs the documented request body", async () => {
    let captured: { url?: string; method?: string; body?: unknown } = {};
    const api = new ApiClient(async (url, init) => {
      captured = {
        url,
        method: init?.method,
        body: JSON.parse(init?.body as string),
      };
      return jsonResponse(200, { results: [], scorer: "cosine", elapsed_ms: 0.2 });
    });
    await api.search("football in usa", 5, "cosine");
    expect(captured.url).toBe("/api/search");
    expect(captured.method).toBe("POST");
    expect(captured.body).toEqual({ query: "football in usa", k: 5, scorer: "cosine" });
  });

  it("throws ApiError with the service's detail message", async () => {
    const api = new ApiClient(async () =>
      jsonResponse(409, { detail: "no similarity model is loaded" }),
    );
    await expect(api.search("x", 5, "learned")).rejects.toMatchObject({
      status: 409,
      message: "no similarity model is loaded",
    });
  });

  it("copes with non-JSON error bodies", async () => {
    const api = new ApiClient(async () => new Response("boom", { status: 500 }));
    const err = await api.search("x", 5, "learned").catch((e) => e as ApiError);
    expect(err).toBeInstanceOf(ApiError);
    expect((err as ApiError).message).toContain("500");
  });
});

describe("ApiClient.documents / health", () => {
  it("parses the corpus listing", async () => {
    const docs = [{ doc_id: "d01", title: "T", url: null }];
    const api = new ApiClient(async (url) => {
      expect(url).toBe("/api/documents");
      return jsonResponse(200, docs);
    });
    expect(await api.documents()).toEqual(docs);
  });

  it("parses the health document", async () => {
    const api = new ApiClient(async () =>
      jsonResponse(200, {
        status: "ok",
        corpus_size: 14,
        model_loaded: true,
        encoder: "mock",
      }),
    );
    const health = await api.health();
    expect(health.corpus_size).toBe(14);
    expect(health.model_loaded).toBe(true);
  });
});
