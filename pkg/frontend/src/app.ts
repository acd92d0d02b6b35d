// App shell: hash routing, state, fetch orchestration. The only module that
// touches the DOM; everything it injects comes from the pure renderers.

import { ApiClient, ApiError } from "./api.js";
import { escapeHtml } from "./format.js";
import {
  renderColdStartPage,
  renderComparePage,
  renderCoreTemporalPage,
  renderLeakagePage,
  renderRepeatsPage,
  renderShiftPage,
  renderSplitForm,
  renderSummaryPage,
  renderTimelinePage,
} from "./pages.js";
import { errorPanel, noticePanel } from "./render.js";
import {
  PAGES,
  type Page,
  type ViewState,
  initialState,
  isStale,
  nextSeq,
  selectionProblem,
  statsTargetId,
  thresholdsParam,
} from "./state.js";
import type { Card } from "./types.js";

const params = new URLSearchParams(window.location.search);
const state: ViewState = initialState(
  params.get("api") ?? (window as { SPLITAUDIT_API?: string }).SPLITAUDIT_API ?? window.location.origin,
);
let client = new ApiClient(state.apiBaseUrl);
let lastCards: Card[] = [];

const content = () => document.getElementById("content")!;
const sidebar = () => document.getElementById("sidebar")!;

function setHtml(el: HTMLElement, html: string): void {
  el.innerHTML = html;
}

async function fetchPage(page: Page): Promise<string> {
  const bundle = state.bundleId;
  switch (page) {
    case "summary": {
      const summary = await client.summary(bundle!, thresholdsParam(state));
      lastCards = summary.cards;
      return renderSummaryPage(summary);
    }
    case "core_temporal": {
      const id = statsTargetId(state)!;
      const [core, temporal] = await Promise.all([
        client.stats(id, state.analysedSubset),
        client.temporal(id, state.analysedSubset),
      ]);
      return renderCoreTemporalPage(lastCards, core as never, temporal);
    }
    case "timeline": {
      const id = statsTargetId(state)!;
      const report = await client.timeline(id, {
        granularity: state.granularity,
        start: state.dateRange?.[0],
        end: state.dateRange?.[1],
      });
      return renderTimelinePage(report);
    }
    case "repeats": {
      const id = statsTargetId(state)!;
      return renderRepeatsPage(lastCards, await client.repeats(id, state.analysedSubset));
    }
    case "leakage":
      return renderLeakagePage(lastCards, await client.leakage(bundle!, state.evalSide));
    case "cold_start":
      return renderColdStartPage(lastCards, await client.coldStart(bundle!, state.evalSide));
    case "shift":
      return renderShiftPage(
        lastCards,
        await client.shift(bundle!, state.evalSide, state.referenceSubset ?? undefined),
      );
    case "compare":
      return renderComparePage(
        await client.compare(state.compareBundleIds, state.evalSide),
        state.compareBundleIds,
      );
  }
}

async function show(page: Page): Promise<void> {
  state.page = page;
  document.querySelectorAll("nav a").forEach((a) => {
    a.classList.toggle("active", a.getAttribute("href") === `#/${page}`);
  });
  const problem = selectionProblem(state);
  if (problem) {
    setHtml(content(), noticePanel(problem) + (page === "summary" ? "" : ""));
    return;
  }
  const seq = nextSeq(state);
  setHtml(content(), `<div class="loading">loading ${escapeHtml(page)}...</div>`);
  try {
    const html = await fetchPage(page);
    if (isStale(state, seq)) return; // a newer request superseded this one
    setHtml(content(), html);
  } catch (err) {
    if (isStale(state, seq)) return;
    const message =
      err instanceof ApiError ? `${err.code}: ${err.message}` : `unexpected error: ${err}`;
    setHtml(content(), errorPanel(message));
    content()
      .querySelector("[data-action=retry]")
      ?.addEventListener("click", () => void show(page));
  }
}

function currentPage(): Page {
  const hash = window.location.hash.replace(/^#\//, "");
  return (PAGES as readonly string[]).includes(hash) ? (hash as Page) : "summary";
}

function renderSidebar(): void {
  const datasetRow = state.datasetId
    ? `<p>dataset: <strong>${escapeHtml(state.datasetId)}</strong></p>`
    : `<p>no dataset registered</p>`;
  const bundleRow = state.bundleId
    ? `<p>bundle: <strong>${escapeHtml(state.bundleId)}</strong></p>`
    : `<p>no bundle yet</p>`;
  const compareRow = state.compareBundleIds.length
    ? `<p>comparing: ${state.compareBundleIds.map(escapeHtml).join(", ")}</p>`
    : "";
  setHtml(
    sidebar(),
    `<h3>Session</h3>` +
      datasetRow +
      bundleRow +
      compareRow +
      `<form data-action="register-dataset">` +
      `<h3>Register dataset</h3>` +
      `<label>server path <input name="path" placeholder="/data/ratings.tsv"></label>` +
      `<label>user col <input name="user_column" value="user_id"></label>` +
      `<label>item col <input name="item_column" value="item_id"></label>` +
      `<label>time col <input name="timestamp_column" value="timestamp"></label>` +
      `<label>time format <select name="timestamp_format">` +
      `<option>epoch_seconds</option><option>epoch_millis</option><option>iso8601</option>` +
      `</select></label>` +
      `<button type="submit">register</button>` +
      `</form>` +
      renderSplitForm(state) +
      `<form data-action="set-eval"><h3>View options</h3>` +
      `<label>eval side <select name="eval"><option>test</option><option>validation</option></select></label>` +
      `<label>subset <input name="subset" value="${escapeHtml(state.analysedSubset)}"></label>` +
      `<label>granularity <select name="granularity">` +
      `<option>day</option><option>hour</option><option>week</option><option>month</option>` +
      `</select></label>` +
      `<label>threshold overrides (JSON, client-side only)` +
      `<textarea name="thresholds" rows="3" placeholder='{"leaked_target_pct": [1, 10]}'>` +
      `${state.thresholdOverrides ? escapeHtml(JSON.stringify(state.thresholdOverrides)) : ""}` +
      `</textarea></label>` +
      `<button type="submit">apply</button>` +
      `</form>`,
  );

  sidebar()
    .querySelector("[data-action=register-dataset]")
    ?.addEventListener("submit", (ev) => {
      ev.preventDefault();
      const data = new FormData(ev.target as HTMLFormElement);
      void client
        .registerDataset({
          path: String(data.get("path") ?? ""),
          mapping: {
            user_column: String(data.get("user_column")),
            item_column: String(data.get("item_column")),
            timestamp_column: String(data.get("timestamp_column")),
            timestamp_format: String(data.get("timestamp_format")),
          },
        })
        .then((reg) => {
          state.datasetId = reg.dataset_id;
          renderSidebar();
          void show(state.page);
        })
        .catch((err) => setHtml(content(), errorPanel(String(err))));
    });

  sidebar()
    .querySelector("[data-action=create-split]")
    ?.addEventListener("submit", (ev) => {
      ev.preventDefault();
      if (!state.datasetId) return;
      const data = new FormData(ev.target as HTMLFormElement);
      const strategy = String(data.get("strategy"));
      const split: Record<string, unknown> = {
        strategy,
        target_mode: String(data.get("target_mode")),
        filter_cold_items: data.get("filter_cold_items") !== null,
      };
      if (strategy === "global_temporal") {
        split.q_val = Number(data.get("q_val"));
        split.q_test = Number(data.get("q_test"));
      }
      void client
        .createSplit({ dataset_id: state.datasetId, split })
        .then((created) => {
          if (state.bundleId && !state.compareBundleIds.includes(state.bundleId)) {
            state.compareBundleIds.push(state.bundleId);
          }
          state.bundleId = created.bundle_id;
          if (!state.compareBundleIds.includes(created.bundle_id)) {
            state.compareBundleIds.push(created.bundle_id);
          }
          renderSidebar();
          void show("summary");
        })
        .catch((err) => setHtml(content(), errorPanel(String(err))));
    });

  sidebar()
    .querySelector("[data-action=set-eval]")
    ?.addEventListener("submit", (ev) => {
      ev.preventDefault();
      const data = new FormData(ev.target as HTMLFormElement);
      state.evalSide = String(data.get("eval")) as ViewState["evalSide"];
      state.analysedSubset = String(data.get("subset"));
      state.granularity = String(data.get("granularity")) as ViewState["granularity"];
      const raw = String(data.get("thresholds") ?? "").trim();
      if (!raw) {
        state.thresholdOverrides = null;
      } else {
        try {
          state.thresholdOverrides = JSON.parse(raw);
        } catch {
          setHtml(content(), errorPanel(`threshold overrides are not valid JSON: ${raw}`));
          return;
        }
      }
      void show(state.page);
    });
}

export function boot(): void {
  client = new ApiClient(state.apiBaseUrl);
  const nav = PAGES.map((p) => `<a href="#/${p}">${p.replace("_", " ")}</a>`).join("");
  setHtml(document.getElementById("nav")!, nav);
  renderSidebar();
  window.addEventListener("hashchange", () => void show(currentPage()));
  void show(currentPage());
}

boot();
