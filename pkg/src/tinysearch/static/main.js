// DOM bootstrap: wires the controls to the SearchController and renders
// state snapshots into the page.
import { ApiClient } from "./api.js";
import { escapeHtml, renderRows } from "./render.js";
import { SearchController, canSubmit } from "./state.js";
const api = new ApiClient((input, init) => fetch(input, init));
function el(id) {
    const node = document.getElementById(id);
    if (!node)
        throw new Error(`missing element #${id}`);
    return node;
}
function render(state) {
    const button = el("search-button");
    const banner = el("error-banner");
    const results = el("results");
    const scorerLabel = el("scorer-label");
    button.disabled = !canSubmit(state) || state.status.kind === "loading";
    scorerLabel.textContent = state.scorer;
    if (state.status.kind === "error") {
        banner.textContent = state.status.message;
        banner.hidden = false;
    }
    else {
        banner.hidden = true;
    }
    if (state.status.kind === "loading") {
        results.innerHTML = '<p class="muted">searching&hellip;</p>';
        return;
    }
    if (state.status.kind !== "idle" || state.results.length === 0) {
        return;
    }
    const rows = renderRows(state.results)
        .map((row) => {
        const label = row.href
            ? `<a href="${escapeHtml(row.href)}" target="_blank" rel="noopener">${escapeHtml(row.label)}</a>`
            : escapeHtml(row.label);
        return `<tr><td class="rank">${row.rank}</td><td>${label}</td><td class="score">${row.score}</td></tr>`;
    })
        .join("");
    results.innerHTML = `<table><thead><tr><th>#</th><th>document</th><th>score</th></tr></thead><tbody>${rows}</tbody></table>`;
}
async function showCorpus() {
    const panel = el("corpus-list");
    try {
        const docs = await api.documents();
        panel.innerHTML = docs
            .map((doc) => `<li title="${escapeHtml(doc.doc_id)}">${escapeHtml(doc.title || doc.doc_id)}</li>`)
            .join("");
    }
    catch {
        panel.innerHTML = "<li class=\"muted\">corpus unavailable</li>";
    }
}
async function showHealth() {
    const footer = el("health");
    try {
        const health = await api.health();
        footer.textContent =
            `${health.corpus_size} documents · encoder: ${health.encoder} · ` +
                (health.model_loaded ? "model loaded" : "no model (cosine only)");
    }
    catch {
        footer.textContent = "service unreachable";
    }
}
function start() {
    const controller = new SearchController(api, render);
    const input = el("query-input");
    const button = el("search-button");
    const kSelect = el("k-select");
    const toggle = el("scorer-toggle");
    for (let i = 1; i <= 20; i++) {
        const option = document.createElement("option");
        option.value = String(i);
        option.textContent = String(i);
        if (i === 5)
            option.selected = true;
        kSelect.appendChild(option);
    }
    input.addEventListener("input", () => controller.setQuery(input.value));
    input.addEventListener("keydown", (event) => {
        if (event.key === "Enter")
            void controller.submitQuery();
    });
    button.addEventListener("click", () => void controller.submitQuery());
    kSelect.addEventListener("change", () => controller.setK(Number(kSelect.value)));
    toggle.addEventListener("click", () => void controller.toggleScorer());
    render(controller.getState());
    void showCorpus();
    void showHealth();
}
document.addEventListener("DOMContentLoaded", start);
