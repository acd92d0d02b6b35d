// Mirrors the server's versioned report schema. Payload shapes must match
// the JSON the API emits field-for-field; the dashboard never recomputes
// diagnostics, it only renders these.

export interface Envelope<T> {
  schema_version: number;
  kind: string;
  payload: T;
}

export type CardStatus = "ok" | "warn" | "alert" | "not_applicable";

export interface Card {
  metric: string;
  value: number | null;
  status: CardStatus;
  link_to_detail: string;
}

export interface SummaryReport {
  cards: Card[];
  dataset: string;
  provenance: string;
  version: string;
  generated_at: number | null;
}

export interface DistributionSummary {
  count: number;
  mean: number | null;
  min: number | null;
  max: number | null;
  quantiles: [number, number][];
  histogram: [number, number, number][];
  log_histogram: [number, number, number][] | null;
}

export interface CoreStatsReport {
  n_users: number;
  n_items: number;
  n_interactions: number;
  avg_seq_len: number;
  density_pct: number;
  popularity: DistributionSummary;
  seq_len: DistributionSummary;
}

export interface TemporalStatsReport {
  start_ts: number;
  end_ts: number;
  timeframe_ms: number;
  delta_t: DistributionSummary;
  collision_rate_pct: number;
  user_lifetime: DistributionSummary;
  item_lifetime: DistributionSummary;
  collision_definition: string;
}

export interface RepeatReport {
  repeated_count: number;
  consecutive_count: number;
  repeated_interactions_pct: number;
  consecutive_repeats_pct: number;
  per_user_repeat_share: DistributionSummary;
}

export interface TimelineReport {
  granularity: string;
  range_start: number;
  range_end: number;
  buckets: Record<string, [number, number][]>;
  excluded: Record<string, number>;
}

export interface ShareBucket {
  bucket_start: number;
  n_targets: number;
  n_affected: number;
  share_pct: number;
}

export interface LeakageReport {
  eval_side: string;
  shared_interactions: number;
  shared_basis: string;
  overlap_pct: number;
  leaked_target_pct: number;
  leaked_item_target_pct: number;
  n_targets: number;
  leaked_over_time: ShareBucket[];
  granularity: string;
  empty_targets: boolean;
}

export interface ColdStartReport {
  eval_side: string;
  n_eval_users: number;
  cold_users: number;
  cold_users_pct: number;
  n_target_items: number;
  cold_items: number;
  cold_items_pct: number;
  n_target_interactions: number;
  cold_interactions: number;
  cold_interactions_pct: number;
  cold_over_time: ShareBucket[];
  granularity: string;
  empty_targets: boolean;
}

export interface ShiftReport {
  eval_side: string;
  timegap_ks: number | null;
  position_ks: number;
  n_eval_gaps: number;
  n_reference_gaps: number;
  n_eval_positions: number;
  n_reference_positions: number;
  excluded_empty_input_targets: number;
  eval_gaps: DistributionSummary;
  reference_gaps: DistributionSummary;
  eval_positions: DistributionSummary;
  reference_positions: DistributionSummary;
}

export interface RoleSummary {
  n_users: number;
  n_items: number;
  n_interactions: number;
  start_ts: number | null;
  end_ts: number | null;
}

export interface SplitDescription {
  strategy: string;
  provenance: string;
  roles: Record<string, RoleSummary>;
  empty_input_users_val: number;
  empty_input_users_test: number;
}

export interface SplitComparisonRow {
  label: string;
  strategy: string;
  description: SplitDescription;
  n_train: number;
  n_val_target: number;
  n_test_target: number;
  n_eval_users: number;
  shared_interactions: number;
  overlap_pct: number;
  leaked_target_pct: number;
  cold_users_pct: number;
  cold_items_pct: number;
  cold_interactions_pct: number;
  timegap_ks: number | null;
  position_ks: number | null;
}

export interface SplitComparisonMatrix {
  eval_side: string;
  provenance: string;
  rows: SplitComparisonRow[];
}

export interface ComparisonRow {
  field: string;
  analysed: number | null;
  reference: number | null;
  delta_pct: number | null;
}

export interface ComparisonTable {
  report_kind: string;
  rows: ComparisonRow[];
}

export interface DatasetRegistration {
  dataset_id: string;
  n_interactions: number;
  n_users: number;
  n_items: number;
}

export interface SplitCreation {
  bundle_id: string;
  description: Envelope<SplitDescription>;
}
