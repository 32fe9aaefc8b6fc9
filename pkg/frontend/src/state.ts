// UI state machine for the search page. Pure logic, no DOM: the
// controller owns the state, talks to the API client, and notifies a
// listener after every transition so rendering stays a thin layer.

import { ApiClient, ResultRow, Scorer } from "./api.js";

export const MIN_K = 1;
export const MAX_K = 100;
export const DEFAULT_K = 5;

export type Status =
  | { kind: "idle" }
  | { kind: "loading" }
  | { kind: "error"; message: string };

export interface UiState {
  query: string;
  k: number;
  scorer: Scorer;
  results: ResultRow[];
  status: Status;
}

export function initialState(): UiState {
  return {
    query: "",
    k: DEFAULT_K,
    scorer: "learned",
    results: [],
    status: { kind: "idle" },
  };
}

export function clampK(k: number): number {
  if (!Number.isFinite(k)) return DEFAULT_K;
  return Math.min(MAX_K, Math.max(MIN_K, Math.round(k)));
}

export function canSubmit(state: UiState): boolean {
  return state.query.trim().length > 0;
}

export class SearchController {
  private state: UiState = initialState();
  private requestSeq = 0;

  constructor(
    private readonly api: ApiClient,
    private readonly onChange: (state: UiState) => void = () => {},
  ) {}

  getState(): UiState {
    return this.state;
  }

  setQuery(query: string): void {
    this.update({ ...this.state, query });
  }

  setK(k: number): void {
    this.update({ ...this.state, k: clampK(k) });
  }

  /** Issue a search for the current query; no-op when the query is empty. */
  async submitQuery(): Promise<void> {
    if (!canSubmit(this.state)) return;
    const seq = ++this.requestSeq;
    this.update({ ...this.state, status: { kind: "loading" } });
    try {
      const response = await this.api.search(
        this.state.query,
        clampK(this.state.k),
        this.state.scorer,
      );
      if (seq !== this.requestSeq) return; // a newer request superseded this one
      this.update({
        ...this.state,
        results: response.results,
        status: { kind: "idle" },
      });
    } catch (err) {
      if (seq !== this.requestSeq) return;
      const message = err instanceof Error ? err.message : String(err);
      // keep the query (and any previous rows) so the user can retry
      this.update({ ...this.state, status: { kind: "error", message } });
    }
  }

  /** Flip the scorer; re-run the current query if results are on screen. */
  async toggleScorer(): Promise<void> {
    const scorer: Scorer = this.state.scorer === "learned" ? "cosine" : "learned";
    this.update({ ...this.state, scorer });
    if (this.state.results.length > 0 && canSubmit(this.state)) {
      await this.submitQuery();
    }
  }

  private update(next: UiState): void {
    this.state = next;
    this.onChange(next);
  }
}
