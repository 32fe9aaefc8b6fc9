// Pure formatting helpers shared by the DOM layer and the tests.
export function formatScore(score) {
    return score.toFixed(3);
}
/** Rows in response order; no client-side re-sorting. */
export function renderRows(results) {
    return results.map((row) => ({
        rank: row.rank,
        label: row.title || row.doc_id,
        href: row.url ?? null,
        score: formatScore(row.score),
    }));
}
export function escapeHtml(text) {
    return text
        .replace(/&/g, "&amp;")
        .replace(/</g, "&lt;")
        .replace(/>/g, "&gt;")
        .replace(/"/g, "&quot;");
}
