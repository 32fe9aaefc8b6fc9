// Typed client for the search service API. All data shown in the UI comes
// straight from these responses; nothing is recomputed client-side.

export type Scorer = "learned" | "cosine";

export interface ResultRow {
  doc_id: string;
  title: string;
  url: string | null;
  score: number;
  rank: number;
}

export interface SearchResponse {
  results: ResultRow[];
  scorer: Scorer;
  elapsed_ms: number;
}

export interface DocumentEntry {
  doc_id: string;
  title: string;
  url: string | null;
}

export interface HealthStatus {
  status: string;
  corpus_size: number;
  model_loaded: boolean;
  encoder: string;
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(message);
  }
}

async function detailOf(response: Response): Promise<string> {
  try {
    const body = (await response.json()) as { detail?: string };
    if (body && typeof body.detail === "string") return body.detail;
  } catch {
    // fall through to the generic message
  }
  return `request failed with status ${response.status}`;
}

export class ApiClient {
  constructor(
    private readonly fetchFn: FetchLike,
    private readonly base = "",
  ) {}

  async search(query: string, k: number, scorer: Scorer): Promise<SearchResponse> {
    const response = await this.fetchFn(`${this.base}/api/search`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ query, k, scorer }),
    });
    if (!response.ok) {
      throw new ApiError(response.status, await detailOf(response));
    }
    return (await response.json()) as SearchResponse;
  }

  async documents(): Promise<DocumentEntry[]> {
    const response = await this.fetchFn(`${this.base}/api/documents`);
    if (!response.ok) {
      throw new ApiError(response.status, await detailOf(response));
    }
    return (await response.json()) as DocumentEntry[];
  }

  async health(): Promise<HealthStatus> {
    const response = await this.fetchFn(`${this.base}/api/health`);
    if (!response.ok) {
      throw new ApiError(response.status, await detailOf(response));
    }
    return (await response.json()) as HealthStatus;
  }
}
