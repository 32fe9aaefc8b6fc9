// Typed client for the search service API. All data shown in the UI comes
// straight from these responses; nothing is recomputed client-side.
export class ApiError extends Error {
    constructor(status, message) {
        super(message);
        this.status = status;
    }
}
async function detailOf(response) {
    try {
        const body = (await response.json());
        if (body && typeof body.detail === "string")
            return body.detail;
    }
    catch {
        // fall through to the generic message
    }
    return `request failed with status ${response.status}`;
}
export class ApiClient {
    constructor(fetchFn, base = "") {
        this.fetchFn = fetchFn;
        this.base = base;
    }
    async search(query, k, scorer) {
        const response = await this.fetchFn(`${this.base}/api/search`, {
            method: "POST",
            headers: { "Content-Type": "application/json" },
            body: JSON.stringify({ query, k, scorer }),
        });
        if (!response.ok) {
            throw new ApiError(response.status, await detailOf(response));
        }
        return (await response.json());
    }
    async documents() {
        const response = await this.fetchFn(`${this.base}/api/documents`);
        if (!response.ok) {
            throw new ApiError(response.status, await detailOf(response));
        }
        return (await response.json());
    }
    async health() {
        const response = await this.fetchFn(`${this.base}/api/health`);
        if (!response.ok) {
            throw new ApiError(response.status, await detailOf(response));
        }
        return (await response.json());
    }
}
