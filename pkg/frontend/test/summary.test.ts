// Summary page against the fixture API: card states must match the canned
// payload (exactly one alert), and values render verbatim.

import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { renderSummaryPage } from "../src/pages.js";
import { CARDS, fixtureFetch } from "./fixtures.js";

function cardAttrs(html: string): { metric: string; value: string; status: string }[] {
  const out = [];
  const re = /data-metric="([^"]+)" data-value="([^"]+)" data-status="([^"]+)"/g;
  let m;
  while ((m = re.exec(html)) !== null) {
    out.push({ metric: m[1], value: m[2], status: m[3] });
  }
  return out;
}

describe("summary page", () => {
  it("renders one card per metric with the fixture statuses", async () => {
    const client = new ApiClient("http://fixture", fixtureFetch());
    const summary = await client.summary("bundle-0001");
    const html = renderSummaryPage(summary);
    const cards = cardAttrs(html);
    expect(cards.map((c) => c.metric)).toEqual(CARDS.map((c) => c.metric));
    expect(cards.map((c) => c.status)).toEqual(CARDS.map((c) => c.status));
  });

  it("shows exactly one alert-colored card for the canned summary", async () => {
    const client = new ApiClient("http://fixture", fixtureFetch());
    const summary = await client.summary("bundle-0001");
    const html = renderSummaryPage(summary);
    expect(html.match(/card status-alert/g)).toHaveLength(1);
    expect(html).toContain('data-metric="collision_rate_pct" data-value="52.8935" data-status="alert"');
  });

  it("renders values verbatim at 4-decimal display precision", async () => {
    const client = new ApiClient("http://fixture", fixtureFetch());
    const summary = await client.summary("bundle-0001");
    const html = renderSummaryPage(summary);
    expect(html).toContain(">52.8935<");
    expect(html).toContain(">0.0821<");
    expect(html).toContain(">4100<"); // integers stay unrounded
    expect(html).toContain(">n/a<"); // null value renders as n/a, not 0
  });

  it("links every card to its detail page", async () => {
    const client = new ApiClient("http://fixture", fixtureFetch());
    const html = renderSummaryPage(await client.summary("bundle-0001"));
    for (const card of CARDS) {
      expect(html).toContain(`href="#/${card.link_to_detail}"`);
    }
  });
});
