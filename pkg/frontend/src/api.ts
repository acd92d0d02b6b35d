// Thin typed client for the audit HTTP API. The fetch function is injected
// so tests can run against a canned fixture API.

import type {
  ColdStartReport,
  ComparisonTable,
  CoreStatsReport,
  DatasetRegistration,
  Envelope,
  LeakageReport,
  RepeatReport,
  ShiftReport,
  SplitComparisonMatrix,
  SplitCreation,
  SplitDescription,
  SummaryReport,
  TemporalStatsReport,
  TimelineReport,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export interface TimelineParams {
  granularity?: string;
  start?: number;
  end?: number;
  roles?: string;
}

export class ApiClient {
  constructor(
    readonly baseUrl: string,
    private readonly fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private url(path: string, params?: Record<string, string | undefined>): string {
    const query = Object.entries(params ?? {})
      .filter(([, v]) => v !== undefined && v !== "")
      .map(([k, v]) => `${encodeURIComponent(k)}=${encodeURIComponent(v as string)}`)
      .join("&");
    return `${this.baseUrl}/api/v1${path}${query ? `?${query}` : ""}`;
  }

  private async request<T>(url: string, init?: RequestInit): Promise<T> {
    let response: Response;
    try {
      response = await this.fetchFn(url, init);
    } catch (err) {
      throw new ApiError(0, "network", `cannot reach API: ${err}`);
    }
    const text = await response.text();
    if (!response.ok) {
      let code = "http_error";
      let message = text || response.statusText;
      try {
        const body = JSON.parse(text);
        if (body?.error) {
          code = body.error.code ?? code;
          message = body.error.message ?? message;
        }
      } catch {
        // non-JSON error body; keep raw text
      }
      throw new ApiError(response.status, code, message);
    }
    return JSON.parse(text) as T;
  }

  private async report<T>(url: string, kind: string): Promise<T> {
    const doc = await this.request<Envelope<T>>(url);
    if (doc.kind !== kind) {
      throw new ApiError(0, "schema", `expected ${kind}, got ${doc.kind}`);
    }
    return doc.payload;
  }

  registerDataset(body: {
    path?: string;
    content?: string;
    mapping: Record<string, string>;
    name?: string;
  }): Promise<DatasetRegistration> {
    return this.request(this.url("/datasets"), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  createSplit(body: {
    dataset_id: string;
    split: Record<string, unknown>;
    preprocess?: Record<string, unknown>;
  }): Promise<SplitCreation> {
    return this.request(this.url("/splits"), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  stats(id: string, subset: string, reference?: string): Promise<CoreStatsReport | ComparisonTable> {
    const kind = reference ? "ComparisonTable" : "CoreStatsReport";
    return this.report(this.url(`/${id}/stats`, { subset, reference }), kind);
  }

  temporal(id: string, subset: string): Promise<TemporalStatsReport> {
    return this.report(this.url(`/${id}/temporal`, { subset }), "TemporalStatsReport");
  }

  repeats(id: string, subset: string): Promise<RepeatReport> {
    return this.report(this.url(`/${id}/repeats`, { subset }), "RepeatReport");
  }

  timeline(id: string, params: TimelineParams): Promise<TimelineReport> {
    return this.report(
      this.url(`/${id}/timeline`, {
        granularity: params.granularity,
        start: params.start?.toString(),
        end: params.end?.toString(),
        roles: params.roles,
      }),
      "TimelineReport",
    );
  }

  leakage(bundleId: string, evalSide: string): Promise<LeakageReport> {
    return this.report(this.url(`/${bundleId}/leakage`, { eval: evalSide }), "LeakageReport");
  }

  coldStart(bundleId: string, evalSide: string): Promise<ColdStartReport> {
    return this.report(this.url(`/${bundleId}/coldstart`, { eval: evalSide }), "ColdStartReport");
  }

  shift(bundleId: string, evalSide: string, reference?: string): Promise<ShiftReport> {
    return this.report(
      this.url(`/${bundleId}/shift`, { eval: evalSide, reference }),
      "ShiftReport",
    );
  }

  summary(bundleId: string, thresholds?: string): Promise<SummaryReport> {
    return this.report(this.url(`/${bundleId}/summary`, { thresholds }), "SummaryReport");
  }

  description(bundleId: string): Promise<SplitDescription> {
    return this.report(this.url(`/${bundleId}/description`), "SplitDescription");
  }

  compare(bundleIds: string[], evalSide: string): Promise<SplitComparisonMatrix> {
    return this.request<Envelope<SplitComparisonMatrix>>(this.url("/compare"), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ bundle_ids: bundleIds, eval: evalSide }),
    }).then((doc) => doc.payload);
  }
}
