// Pure formatting helpers shared by the DOM layer and the tests.

import { ResultRow } from "./api.js";

export function formatScore(score: number): string {
  return score.toFixed(3);
}

export interface RenderedRow {
  rank: number;
  label: string;
  href: string | null;
  score: string;
}

/** Rows in response order; no client-side re-sorting. */
export function renderRows(results: ResultRow[]): RenderedRow[] {
  return results.map((row) => ({
    rank: row.rank,
    label: row.title || row.doc_id,
    href: row.url ?? null,
    score: formatScore(row.score),
  }));
}

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}
