// Page renderers: pure functions from API payloads + view state to HTML.
// Every displayed number comes verbatim from a response; the headline strip
// on each detail page repeats the exact values of the summary cards that
// link to it.

import { escapeHtml, fmtCount, fmtDate, fmtDuration, fmtValue } from "./format.js";
import {
  distTable,
  histogramSvg,
  kvTable,
  renderCardGrid,
  renderHeadlines,
  shareSeriesSvg,
  timelineSvg,
} from "./render.js";
import type { ViewState } from "./state.js";
import type {
  Card,
  ColdStartReport,
  CoreStatsReport,
  LeakageReport,
  RepeatReport,
  ShiftReport,
  SplitComparisonMatrix,
  SummaryReport,
  TemporalStatsReport,
  TimelineReport,
} from "./types.js";

export function renderSummaryPage(summary: SummaryReport): string {
  const meta = kvTable([
    ["dataset", escapeHtml(summary.dataset)],
    ["provenance", escapeHtml(summary.provenance)],
    ["toolkit version", escapeHtml(summary.version)],
    ["generated at", summary.generated_at === null ? "n/a" : fmtDate(summary.generated_at)],
  ]);
  return (
    `<section class="page page-summary"><h2>Summary</h2>` +
    renderCardGrid(summary.cards) +
    meta +
    `</section>`
  );
}

export function renderCoreTemporalPage(
  cards: Card[],
  core: CoreStatsReport,
  temporal: TemporalStatsReport,
): string {
  return (
    `<section class="page page-core_temporal"><h2>Core and temporal statistics</h2>` +
    renderHeadlines(cards, "core_temporal") +
    kvTable([
      ["users", fmtCount(core.n_users)],
      ["items", fmtCount(core.n_items)],
      ["interactions", fmtCount(core.n_interactions)],
      ["avg sequence length", fmtValue(core.avg_seq_len)],
      ["density %", fmtValue(core.density_pct)],
      ["start", fmtDate(temporal.start_ts)],
      ["end", fmtDate(temporal.end_ts)],
      ["timeframe", fmtDuration(temporal.timeframe_ms)],
      ["timestamp collision rate %", fmtValue(temporal.collision_rate_pct)],
    ]) +
    `<h3>Per-item popularity</h3>` + distTable(core.popularity) + histogramSvg(core.popularity) +
    `<h3>Per-user sequence length</h3>` + distTable(core.seq_len) + histogramSvg(core.seq_len) +
    `<h3>Time deltas</h3>` + distTable(temporal.delta_t, true) + histogramSvg(temporal.delta_t, true) +
    `<h3>User lifetime</h3>` + distTable(temporal.user_lifetime, true) + histogramSvg(temporal.user_lifetime, true) +
    `<h3>Item lifetime</h3>` + distTable(temporal.item_lifetime, true) + histogramSvg(temporal.item_lifetime, true) +
    `</section>`
  );
}

export function renderTimelinePage(report: TimelineReport): string {
  const excluded = Object.entries(report.excluded)
    .sort(([a], [b]) => a.localeCompare(b))
    .map(([role, n]) => [role, fmtCount(n)] as [string, string]);
  return (
    `<section class="page page-timeline"><h2>Interactions over time</h2>` +
    `<p>granularity: ${escapeHtml(report.granularity)}</p>` +
    timelineSvg(report) +
    `<h3>Excluded (outside range)</h3>` + kvTable(excluded) +
    `</section>`
  );
}

export function renderRepeatsPage(cards: Card[], repeats: RepeatReport): string {
  return (
    `<section class="page page-repeats"><h2>Repeat consumption</h2>` +
    renderHeadlines(cards, "repeats") +
    kvTable([
      ["repeated interactions", `${fmtCount(repeats.repeated_count)} (${fmtValue(repeats.repeated_interactions_pct)}%)`],
      ["consecutive repeats", `${fmtCount(repeats.consecutive_count)} (${fmtValue(repeats.consecutive_repeats_pct)}%)`],
    ]) +
    `<h3>Per-user repeated share (%)</h3>` +
    distTable(repeats.per_user_repeat_share) +
    histogramSvg(repeats.per_user_repeat_share) +
    `</section>`
  );
}

export function renderLeakagePage(cards: Card[], leak: LeakageReport): string {
  const basis =
    leak.shared_basis === "source_rows"
      ? "rows assigned to both subsets"
      : "(user, item, timestamp) triple intersection";
  return (
    `<section class="page page-leakage"><h2>Temporal leakage (${escapeHtml(leak.eval_side)})</h2>` +
    renderHeadlines(cards, "leakage") +
    (leak.empty_targets ? `<p class="empty">target subset is empty</p>` : "") +
    kvTable([
      ["shared interactions", `${fmtCount(leak.shared_interactions)} <small>(${basis})</small>`],
      ["temporal overlap %", fmtValue(leak.overlap_pct)],
      ["leaked targets %", fmtValue(leak.leaked_target_pct)],
      ["item-leaked targets %", fmtValue(leak.leaked_item_target_pct)],
      ["targets", fmtCount(leak.n_targets)],
    ]) +
    `<h3>Leaked share over time</h3>` + shareSeriesSvg(leak.leaked_over_time) +
    `</section>`
  );
}

export function renderColdStartPage(cards: Card[], cold: ColdStartReport): string {
  return (
    `<section class="page page-cold_start"><h2>Cold start (${escapeHtml(cold.eval_side)})</h2>` +
    renderHeadlines(cards, "cold_start") +
    kvTable([
      ["eval users", fmtCount(cold.n_eval_users)],
      ["cold users", `${fmtCount(cold.cold_users)} (${fmtValue(cold.cold_users_pct)}%)`],
      ["target items", fmtCount(cold.n_target_items)],
      ["cold items", `${fmtCount(cold.cold_items)} (${fmtValue(cold.cold_items_pct)}%)`],
      ["target interactions", fmtCount(cold.n_target_interactions)],
      ["cold-item interactions", `${fmtCount(cold.cold_interactions)} (${fmtValue(cold.cold_interactions_pct)}%)`],
    ]) +
    `<h3>Cold share over time</h3>` + shareSeriesSvg(cold.cold_over_time) +
    `</section>`
  );
}

export function renderShiftPage(cards: Card[], shift: ShiftReport): string {
  return (
    `<section class="page page-shift"><h2>Distribution shift (${escapeHtml(shift.eval_side)})</h2>` +
    renderHeadlines(cards, "shift") +
    kvTable([
      ["time-gap KS", fmtValue(shift.timegap_ks)],
      ["position KS", fmtValue(shift.position_ks)],
      ["eval gaps / reference gaps", `${fmtCount(shift.n_eval_gaps)} / ${fmtCount(shift.n_reference_gaps)}`],
      ["targets without input", fmtCount(shift.excluded_empty_input_targets)],
    ]) +
    `<h3>Target time gaps</h3>` + distTable(shift.eval_gaps, true) + histogramSvg(shift.eval_gaps, true) +
    `<h3>Reference time gaps</h3>` + distTable(shift.reference_gaps, true) + histogramSvg(shift.reference_gaps, true) +
    `<h3>Target positions</h3>` + distTable(shift.eval_positions) + histogramSvg(shift.eval_positions) +
    `<h3>Reference positions</h3>` + distTable(shift.reference_positions) + histogramSvg(shift.reference_positions) +
    `</section>`
  );
}

const COMPARE_COLUMNS: [keyof SplitComparisonMatrix["rows"][number], string][] = [
  ["n_train", "train"],
  ["n_val_target", "val targets"],
  ["n_test_target", "test targets"],
  ["n_eval_users", "eval users"],
  ["shared_interactions", "shared"],
  ["overlap_pct", "overlap %"],
  ["leaked_target_pct", "leaked %"],
  ["cold_users_pct", "cold users %"],
  ["cold_items_pct", "cold items %"],
  ["cold_interactions_pct", "cold inter %"],
  ["timegap_ks", "gap KS"],
  ["position_ks", "pos KS"],
];

/** Side-by-side matrix: one aligned column per bundle. */
export function renderComparePage(matrix: SplitComparisonMatrix, bundleIds: string[]): string {
  const header =
    `<tr><th>metric</th>` +
    matrix.rows
      .map(
        (row, i) =>
          `<th class="bundle-col" data-bundle="${escapeHtml(bundleIds[i] ?? row.label)}">` +
          `${escapeHtml(bundleIds[i] ?? "")} (${escapeHtml(row.label)})</th>`,
      )
      .join("") +
    `</tr>`;
  const body = COMPARE_COLUMNS.map(([field, label]) => {
    const cells = matrix.rows
      .map((row) => {
        const v = row[field];
        return `<td>${typeof v === "number" ? fmtValue(v) : v === null ? "n/a" : escapeHtml(String(v))}</td>`;
      })
      .join("");
    return `<tr><th>${label}</th>${cells}</tr>`;
  }).join("");
  return (
    `<section class="page page-compare"><h2>Compare splits (${escapeHtml(matrix.eval_side)})</h2>` +
    `<table class="compare-matrix">${header}${body}</table>` +
    `</section>`
  );
}

/** Split-configuration form; submitting POSTs to /splits via the app shell. */
export function renderSplitForm(state: ViewState): string {
  const disabled = state.datasetId ? "" : " disabled";
  return (
    `<form class="split-form" data-action="create-split">` +
    `<h3>Create a split${state.datasetId ? ` for ${escapeHtml(state.datasetId)}` : ""}</h3>` +
    `<label>strategy <select name="strategy">` +
    `<option value="global_temporal">global temporal</option>` +
    `<option value="leave_one_out">leave one out</option>` +
    `</select></label>` +
    `<label>q_val <input name="q_val" type="number" step="0.01" min="0.01" max="0.98" value="0.8"></label>` +
    `<label>q_test <input name="q_test" type="number" step="0.01" min="0.02" max="0.99" value="0.9"></label>` +
    `<label>target <select name="target_mode">` +
    `<option value="last_item">last item</option>` +
    `<option value="all_items">all items</option>` +
    `</select></label>` +
    `<label><input name="filter_cold_items" type="checkbox" checked> filter cold items</label>` +
    `<button type="submit"${disabled}>create bundle</button>` +
    `</form>`
  );
}
