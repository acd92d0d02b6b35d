// Canned API responses for the fixture tests: one bundle whose summary has
// exactly one alert card, plus the detail payloads behind every page.

import type { FetchLike } from "../src/api.js";
import type {
  Card,
  ColdStartReport,
  CoreStatsReport,
  DistributionSummary,
  LeakageReport,
  RepeatReport,
  ShiftReport,
  SplitComparisonMatrix,
  SplitDescription,
  SummaryReport,
  TemporalStatsReport,
  TimelineReport,
} from "../src/types.js";

export function dist(values: Partial<DistributionSummary> = {}): DistributionSummary {
  return {
    count: 4,
    mean: 2.5,
    min: 1,
    max: 4,
    quantiles: [[0.05, 1.15], [0.25, 1.75], [0.5, 2.5], [0.75, 3.25], [0.95, 3.85]],
    histogram: [[1, 2.5, 2], [2.5, 4, 2]],
    log_histogram: null,
    ...values,
  };
}

export const CARDS: Card[] = [
  { metric: "collision_rate_pct", value: 52.8935, status: "alert", link_to_detail: "core_temporal" },
  { metric: "consecutive_repeats_pct", value: 0.0, status: "ok", link_to_detail: "repeats" },
  { metric: "leaked_target_pct", value: 0.05, status: "ok", link_to_detail: "leakage" },
  { metric: "cold_users_pct", value: 12.5, status: "ok", link_to_detail: "cold_start" },
  { metric: "cold_items_pct", value: 3.75, status: "ok", link_to_detail: "cold_start" },
  { metric: "timegap_ks", value: 0.0821, status: "ok", link_to_detail: "shift" },
  { metric: "position_ks", value: null, status: "not_applicable", link_to_detail: "shift" },
  { metric: "min_eval_users", value: 4100, status: "ok", link_to_detail: "core_temporal" },
  { metric: "min_eval_interactions", value: 52000, status: "ok", link_to_detail: "core_temporal" },
];

export const SUMMARY: SummaryReport = {
  cards: CARDS,
  dataset: "fixture-ds",
  provenance: "fixture-ds|5-core",
  version: "0.1.0",
  generated_at: null,
};

export const CORE: CoreStatsReport = {
  n_users: 4100,
  n_items: 900,
  n_interactions: 520000,
  avg_seq_len: 126.8293,
  density_pct: 14.0921,
  popularity: dist(),
  seq_len: dist(),
};

export const TEMPORAL: TemporalStatsReport = {
  start_ts: 957_000_000_000,
  end_ts: 1_046_000_000_000,
  timeframe_ms: 89_000_000_000,
  delta_t: dist(),
  collision_rate_pct: 52.8935,
  user_lifetime: dist(),
  item_lifetime: dist(),
  collision_definition: "members of same-user same-timestamp groups",
};

export const REPEATS: RepeatReport = {
  repeated_count: 0,
  consecutive_count: 0,
  repeated_interactions_pct: 0.0,
  consecutive_repeats_pct: 0.0,
  per_user_repeat_share: dist(),
};

export const TIMELINE: TimelineReport = {
  granularity: "day",
  range_start: 957_000_000_000,
  range_end: 957_400_000_000,
  buckets: {
    train: [[957_000_000_000, 10], [957_100_000_000, 14], [957_200_000_000, 9]],
    test_target: [[957_300_000_000, 4]],
  },
  excluded: { train: 0, test_target: 1 },
};

export const LEAKAGE: LeakageReport = {
  eval_side: "test",
  shared_interactions: 0,
  shared_basis: "source_rows",
  overlap_pct: 0.0,
  leaked_target_pct: 0.05,
  leaked_item_target_pct: 0.0,
  n_targets: 2000,
  leaked_over_time: [
    { bucket_start: 957_300_000_000, n_targets: 1000, n_affected: 1, share_pct: 0.1 },
    { bucket_start: 957_386_400_000, n_targets: 1000, n_affected: 0, share_pct: 0.0 },
  ],
  granularity: "day",
  empty_targets: false,
};

export const COLD: ColdStartReport = {
  eval_side: "test",
  n_eval_users: 4100,
  cold_users: 512,
  cold_users_pct: 12.5,
  n_target_items: 800,
  cold_items: 30,
  cold_items_pct: 3.75,
  n_target_interactions: 52000,
  cold_interactions: 1950,
  cold_interactions_pct: 3.75,
  cold_over_time: [
    { bucket_start: 957_300_000_000, n_targets: 26000, n_affected: 900, share_pct: 3.4615 },
    { bucket_start: 957_386_400_000, n_targets: 26000, n_affected: 1050, share_pct: 4.0385 },
  ],
  granularity: "day",
  empty_targets: false,
};

export const SHIFT: ShiftReport = {
  eval_side: "test",
  timegap_ks: 0.0821,
  position_ks: 0.41,
  n_eval_gaps: 1800,
  n_reference_gaps: 515900,
  n_eval_positions: 2000,
  n_reference_positions: 520000,
  excluded_empty_input_targets: 200,
  eval_gaps: dist(),
  reference_gaps: dist(),
  eval_positions: dist(),
  reference_positions: dist(),
};

export function description(label: string): SplitDescription {
  return {
    strategy: label,
    provenance: "fixture-ds|5-core",
    roles: {
      train: { n_users: 4000, n_items: 880, n_interactions: 468000, start_ts: 1, end_ts: 2 },
      val_input: { n_users: 100, n_items: 200, n_interactions: 9000, start_ts: 1, end_ts: 2 },
      val_target: { n_users: 100, n_items: 150, n_interactions: 1000, start_ts: 1, end_ts: 2 },
      test_input: { n_users: 200, n_items: 300, n_interactions: 40000, start_ts: 1, end_ts: 2 },
      test_target: { n_users: 200, n_items: 180, n_interactions: 2000, start_ts: 1, end_ts: 2 },
    },
    empty_input_users_val: 0,
    empty_input_users_test: 3,
  };
}

export const COMPARE: SplitComparisonMatrix = {
  eval_side: "test",
  provenance: "fixture-ds|5-core",
  rows: [
    {
      label: "loo",
      strategy: "leave_one_out",
      description: description("leave_one_out"),
      n_train: 468000,
      n_val_target: 1000,
      n_test_target: 2000,
      n_eval_users: 4100,
      shared_interactions: 0,
      overlap_pct: 99.8,
      leaked_target_pct: 89.0,
      cold_users_pct: 0.0,
      cold_items_pct: 0.0,
      cold_interactions_pct: 0.0,
      timegap_ks: 0.0821,
      position_ks: 0.41,
    },
    {
      label: "gts_q0.9_all",
      strategy: "global_temporal",
      description: description("global_temporal"),
      n_train: 430000,
      n_val_target: 45000,
      n_test_target: 52000,
      n_eval_users: 3100,
      shared_interactions: 0,
      overlap_pct: 0.0,
      leaked_target_pct: 0.0,
      cold_users_pct: 100.0,
      cold_items_pct: 3.75,
      cold_interactions_pct: 3.75,
      timegap_ks: 0.3301,
      position_ks: null,
    },
  ],
};

function envelope(kind: string, payload: unknown): string {
  return JSON.stringify({ schema_version: 1, kind, payload });
}

/** Fixture API: resolves the documented endpoints from canned payloads. */
export function fixtureFetch(overrides: Record<string, unknown> = {}): FetchLike {
  const routes: [RegExp, string, unknown][] = [
    [/\/api\/v1\/[^/]+\/summary/, "SummaryReport", overrides.summary ?? SUMMARY],
    [/\/api\/v1\/[^/]+\/stats/, "CoreStatsReport", overrides.core ?? CORE],
    [/\/api\/v1\/[^/]+\/temporal/, "TemporalStatsReport", TEMPORAL],
    [/\/api\/v1\/[^/]+\/repeats/, "RepeatReport", REPEATS],
    [/\/api\/v1\/[^/]+\/timeline/, "TimelineReport", TIMELINE],
    [/\/api\/v1\/[^/]+\/leakage/, "LeakageReport", LEAKAGE],
    [/\/api\/v1\/[^/]+\/coldstart/, "ColdStartReport", COLD],
    [/\/api\/v1\/[^/]+\/shift/, "ShiftReport", SHIFT],
    [/\/api\/v1\/[^/]+\/description/, "SplitDescription", description("leave_one_out")],
    [/\/api\/v1\/compare/, "SplitComparisonMatrix", overrides.compare ?? COMPARE],
  ];
  return async (url: string) => {
    for (const [pattern, kind, payload] of routes) {
      if (pattern.test(url)) {
        return new Response(envelope(kind, payload), {
          status: 200,
          headers: { "Content-Type": "application/json" },
        });
      }
    }
    return new Response(
      JSON.stringify({ error: { code: "unknown_id", message: `no route for ${url}` } }),
      { status: 404 },
    );
  };
}
