// Controller behavior against a scripted service: the full query loop,
// scorer toggling, error handling, and the latest-wins request rule.
import { describe, expect, it } from "vitest";

import { ApiClient, ResultRow, SearchResponse } from "../src/api.js";
import { SearchController, UiState, canSubmit, clampK } from "../src/state.js";

interface Call {
  url: string;
  body: { query: string; k: number; scorer: string };
}

// response shape copied from the service: 14-doc demo corpus, query "football in usa"
const FOOTBALL_ROWS: ResultRow[] = [
  { doc_id: "d07", title: "History of Football in the USA", url: "https://example.com/football-history", score: 0.4167, rank: 1 },
  { doc_id: "d08", title: "College Football Rankings", url: "https://example.com/cfb-rankings", score: 0.402, rank: 2 },
  { doc_id: "d09", title: "Soccer's Growth Across America", url: "https://example.com/mls-growth", score: 0.3849, rank: 3 },
  { doc_id: "d06", title: "NFL Season Preview", url: "https://example.com/nfl-preview", score: 0.2041, rank: 4 },
  { doc_id: "d14", title: "Weeknight Cooking: Quick Pasta", url: "https://example.com/quick-pasta", score: 0.1179, rank: 5 },
];

function jsonResponse(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

function scriptedFetch(
  handler: (call: Call) => Response | Promise<Response>,
  calls: Call[],
) {
  return async (url: string, init?: RequestInit): Promise<Response> => {
    const body = init?.body ? JSON.parse(init.body as string) : {};
    const call = { url, body };
    calls.push(call);
    return handler(call);
  };
}

function searchHandler(call: Call): Response {
  const rows = FOOTBALL_ROWS.slice(0, call.body.k);
  const response: SearchResponse = {
    results: rows,
    scorer: call.body.scorer as SearchResponse["scorer"],
    elapsed_ms: 1.0,
  };
  return jsonResponse(200, response);
}

function makeController(handler: (call: Call) => Response | Promise<Response>) {
  const calls: Call[] = [];
  const states: UiState[] = [];
  const api = new ApiClient(scriptedFetch(handler, calls));
  const controller = new SearchController(api, (s) => states.push(s));
  return { controller, calls, states };
}

describe("query loop", () => {
  it("renders at most k rows in response order for the football query", async () => {
    const { controller, calls } = makeController(searchHandler);
    controller.setQuery("football in usa");
    await controller.submitQuery();

    const state = controller.getState();
    expect(state.status.kind).toBe("idle");
    expect(state.results.length).toBeLessThanOrEqual(state.k);
    expect(state.results.map((r) => r.doc_id)).toEqual(["d07", "d08", "d09", "d06", "d14"]);
    expect(calls).toHaveLength(1);
    expect(calls[0].url).toBe("/api/search");
    expect(calls[0].body).toEqual({ query: "football in usa", k: 5, scorer: "learned" });
  });

  it("keeps displayed scores identical to the API values", async () => {
    const { controller } = makeController(searchHandler);
    controller.setQuery("football in usa");
    await controller.submitQuery();
    const scores = controller.getState().results.map((r) => r.score);
    expect(scores).toEqual(FOOTBALL_ROWS.map((r) => r.score));
  });

  it("never issues a request for an empty or whitespace query", async () => {
    const { controller, calls } = makeController(searchHandler);
    await controller.submitQuery();
    controller.setQuery("   ");
    await controller.submitQuery();
    expect(calls).toHaveLength(0);
    expect(canSubmit(controller.getState())).toBe(false);
  });

  it("respects the k selector", async () => {
    const { controller, calls } = makeController(searchHandler);
    controller.setQuery("football in usa");
    controller.setK(3);
    await controller.submitQuery();
    expect(calls[0].body.k).toBe(3);
    expect(controller.getState().results).toHaveLength(3);
  });
});

describe("scorer toggle", () => {
  it("re-queries under the new scorer when results are displayed", async () => {
    const { controller, calls } = makeController(searchHandler);
    controller.setQuery("football in usa");
    await controller.submitQuery();
    await controller.toggleScorer();

    expect(controller.getState().scorer).toBe("cosine");
    expect(calls).toHaveLength(2);
    expect(calls[1].body.scorer).toBe("cosine");
  });

  it("does not request when no query is active", async () => {
    const { controller, calls } = makeController(searchHandler);
    await controller.toggleScorer();
    expect(controller.getState().scorer).toBe("cosine");
    expect(calls).toHaveLength(0);
  });

  it("toggling twice restores the original scorer", async () => {
    const { controller } = makeController(searchHandler);
    await controller.toggleScorer();
    await controller.toggleScorer();
    expect(controller.getState().scorer).toBe("learned");
  });
});

describe("failure handling", () => {
  it("shows the error banner and preserves the query on 5xx", async () => {
    const { controller } = makeController(() =>
      jsonResponse(502, { detail: "encoder unreachable" }),
    );
    controller.setQuery("football in usa");
    await controller.submitQuery();

    const state = controller.getState();
    expect(state.status).toEqual({ kind: "error", message: "encoder unreachable" });
    expect(state.query).toBe("football in usa");
  });

  it("surfaces 400 validation messages", async () => {
    const { controller } = makeController(() =>
      jsonResponse(400, { detail: "k must be in [1, 100]" }),
    );
    controller.setQuery("x");
    await controller.submitQuery();
    const status = controller.getState().status;
    expect(status.kind).toBe("error");
    if (status.kind === "error") expect(status.message).toContain("k must be");
  });

  it("reports network failures as errors", async () => {
    const { controller } = makeController(() => {
      throw new Error("network down");
    });
    controller.setQuery("x");
    await controller.submitQuery();
    expect(controller.getState().status.kind).toBe("error");
  });
});

describe("latest wins", () => {
  it("ignores a stale response arriving after a newer one", async () => {
    let resolveFirst: ((r: Response) => void) | undefined;
    let call = 0;
    const { controller } = makeController((c) => {
      call += 1;
      if (call === 1) {
        return new Promise<Response>((resolve) => {
          resolveFirst = resolve;
        });
      }
      return searchHandler(c);
    });
    controller.setQuery("slow query");
    const first = controller.submitQuery();
    controller.setQuery("football in usa");
    await controller.submitQuery();
    const after = controller.getState().results.map((r) => r.doc_id);

    // now let the stale request complete with a different payload
    resolveFirst?.(
      jsonResponse(200, {
        results: [{ doc_id: "stale", title: "stale", url: null, score: 0.1, rank: 1 }],
        scorer: "learned",
        elapsed_ms: 1,
      }),
    );
    await first;
    expect(controller.getState().results.map((r) => r.doc_id)).toEqual(after);
  });
});

describe("k clamping", () => {
  it("keeps k inside [1, 100] no matter the input", () => {
    expect(clampK(0)).toBe(1);
    expect(clampK(-5)).toBe(1);
    expect(clampK(101)).toBe(100);
    expect(clampK(7.6)).toBe(8);
    expect(clampK(Number.NaN)).toBe(5);
  });
});
