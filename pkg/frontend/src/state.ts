// View state and its invariants: page-required selections are checked
// before any fetch, and responses are tagged with a sequence number so
// stale ones are discarded instead of rendered.

export const PAGES = [
  "summary",
  "core_temporal",
  "timeline",
  "repeats",
  "leakage",
  "cold_start",
  "shift",
  "compare",
] as const;

export type Page = (typeof PAGES)[number];

export type EvalSide = "validation" | "test";

export interface ViewState {
  apiBaseUrl: string;
  datasetId: string | null;
  bundleId: string | null;
  compareBundleIds: string[];
  page: Page;
  analysedSubset: string;
  referenceSubset: string | null;
  evalSide: EvalSide;
  thresholdOverrides: Record<string, [number, number]> | null;
  granularity: "hour" | "day" | "week" | "month";
  dateRange: [number, number] | null;
  seq: number;
}

export function initialState(apiBaseUrl: string): ViewState {
  return {
    apiBaseUrl,
    datasetId: null,
    bundleId: null,
    compareBundleIds: [],
    page: "summary",
    analysedSubset: "raw",
    referenceSubset: null,
    evalSide: "test",
    thresholdOverrides: null,
    granularity: "day",
    dateRange: null,
    seq: 0,
  };
}

const BUNDLE_PAGES: readonly Page[] = ["summary", "leakage", "cold_start", "shift"];

/** Human-readable reason the page cannot fetch yet, or null when it can. */
export function selectionProblem(state: ViewState): string | null {
  if (BUNDLE_PAGES.includes(state.page) && !state.bundleId) {
    return `the ${state.page.replace("_", " ")} page needs a split bundle; create one first`;
  }
  if (
    (state.page === "core_temporal" || state.page === "timeline" || state.page === "repeats") &&
    !state.bundleId &&
    !state.datasetId
  ) {
    return "register a dataset (or create a bundle) first";
  }
  if (state.page === "compare" && state.compareBundleIds.length < 2) {
    return "the compare page needs at least two bundles";
  }
  return null;
}

/** Id whose subsets the stats pages should read: bundle when analysing
 * split roles, dataset otherwise. */
export function statsTargetId(state: ViewState): string | null {
  const bundleRoles = ["train", "val_input", "val_target", "test_input", "test_target"];
  if (state.bundleId && bundleRoles.includes(state.analysedSubset)) return state.bundleId;
  return state.datasetId ?? state.bundleId;
}

export function nextSeq(state: ViewState): number {
  state.seq += 1;
  return state.seq;
}

export function isStale(state: ViewState, seq: number): boolean {
  return seq !== state.seq;
}

/** Threshold overrides serialized for the summary endpoint; client-side
 * state only, never mutates server config. */
export function thresholdsParam(state: ViewState): string | undefined {
  if (!state.thresholdOverrides || Object.keys(state.thresholdOverrides).length === 0) {
    return undefined;
  }
  return JSON.stringify(state.thresholdOverrides);
}
