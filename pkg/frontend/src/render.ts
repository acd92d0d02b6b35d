// HTML-string widgets shared by the pages: cards, tables, SVG histograms
// and timelines. Pure functions of API payloads; no DOM access here.

import { escapeHtml, fmtCount, fmtDate, fmtDuration, fmtValue } from "./format.js";
import type { Card, DistributionSummary, ShareBucket, TimelineReport } from "./types.js";

export function renderCard(card: Card): string {
  return (
    `<a class="card status-${card.status}" href="#/${card.link_to_detail}"` +
    ` data-metric="${escapeHtml(card.metric)}" data-value="${fmtValue(card.value)}"` +
    ` data-status="${card.status}">` +
    `<span class="card-metric">${escapeHtml(card.metric)}</span>` +
    `<span class="card-value">${fmtValue(card.value)}</span>` +
    `<span class="card-status">${card.status}</span>` +
    `</a>`
  );
}

export function renderCardGrid(cards: Card[]): string {
  return `<div class="card-grid">${cards.map(renderCard).join("")}</div>`;
}

/** Headline strip on a detail page: the same verbatim values as the summary
 * cards that link here. */
export function renderHeadlines(cards: Card[], page: string): string {
  const mine = cards.filter((c) => c.link_to_detail === page);
  if (!mine.length) return "";
  const items = mine
    .map(
      (c) =>
        `<div class="headline status-${c.status}" data-metric="${escapeHtml(c.metric)}">` +
        `<span class="headline-metric">${escapeHtml(c.metric)}</span> ` +
        `<span class="headline-value" data-value="${fmtValue(c.value)}">${fmtValue(c.value)}</span>` +
        `</div>`,
    )
    .join("");
  return `<div class="headlines">${items}</div>`;
}

export function kvTable(rows: [string, string][]): string {
  const body = rows
    .map(([k, v]) => `<tr><th>${escapeHtml(k)}</th><td>${v}</td></tr>`)
    .join("");
  return `<table class="kv">${body}</table>`;
}

export function distTable(s: DistributionSummary, duration = false): string {
  const conv = duration ? fmtDuration : fmtValue;
  const head = ["count", "mean", "min", "max", ...s.quantiles.map(([q]) => `q${q}`)];
  const vals = [
    fmtCount(s.count),
    conv(s.mean),
    conv(s.min),
    conv(s.max),
    ...s.quantiles.map(([, v]) => conv(v)),
  ];
  return (
    `<table class="dist"><tr>${head.map((h) => `<th>${h}</th>`).join("")}</tr>` +
    `<tr>${vals.map((v) => `<td>${v}</td>`).join("")}</tr></table>`
  );
}

const SVG_W = 640;
const SVG_H = 160;

export function histogramSvg(s: DistributionSummary, useLog = false): string {
  const bins = useLog && s.log_histogram ? s.log_histogram : s.histogram;
  if (!bins.length) return `<p class="empty">no data</p>`;
  const maxCount = Math.max(...bins.map(([, , c]) => c), 1);
  const barW = SVG_W / bins.length;
  const bars = bins
    .map(([lo, hi, c], i) => {
      const h = (c / maxCount) * (SVG_H - 20);
      const x = i * barW;
      const title = `[${fmtValue(lo)}, ${fmtValue(hi)}]: ${fmtCount(c)}`;
      return (
        `<rect class="bar" x="${x.toFixed(1)}" y="${(SVG_H - h).toFixed(1)}"` +
        ` width="${Math.max(barW - 1, 1).toFixed(1)}" height="${h.toFixed(1)}">` +
        `<title>${title}</title></rect>`
      );
    })
    .join("");
  return `<svg class="histogram" viewBox="0 0 ${SVG_W} ${SVG_H}" role="img">${bars}</svg>`;
}

export function timelineSvg(report: TimelineReport): string {
  const roles = Object.keys(report.buckets).sort();
  const nonEmpty = roles.filter((r) => report.buckets[r].length > 0);
  if (!nonEmpty.length) return `<p class="empty">no interactions in range</p>`;
  const span = Math.max(report.range_end - report.range_start, 1);
  const maxCount = Math.max(
    ...nonEmpty.flatMap((r) => report.buckets[r].map(([, c]) => c)),
    1,
  );
  const series = nonEmpty
    .map((role, idx) => {
      const pts = report.buckets[role]
        .map(([start, count]) => {
          const x = ((start - report.range_start) / span) * SVG_W;
          const y = SVG_H - 10 - (count / maxCount) * (SVG_H - 30);
          return `${x.toFixed(1)},${y.toFixed(1)}`;
        })
        .join(" ");
      return (
        `<polyline class="series series-${idx}" data-role="${escapeHtml(role)}"` +
        ` data-points="${report.buckets[role].length}" fill="none" points="${pts}"/>`
      );
    })
    .join("");
  const legend = nonEmpty
    .map((r, idx) => `<span class="legend series-${idx}">${escapeHtml(r)}</span>`)
    .join(" ");
  return (
    `<div class="timeline-block">` +
    `<svg class="timeline" viewBox="0 0 ${SVG_W} ${SVG_H}" role="img">${series}</svg>` +
    `<div class="legend-row">${legend}</div>` +
    `<div class="range">${fmtDate(report.range_start)} to ${fmtDate(report.range_end)}</div>` +
    `</div>`
  );
}

export function shareSeriesSvg(buckets: ShareBucket[]): string {
  if (!buckets.length) return `<p class="empty">no targets</p>`;
  const start = buckets[0].bucket_start;
  const span = Math.max(buckets[buckets.length - 1].bucket_start - start, 1);
  const pts = buckets
    .map((b) => {
      const x = ((b.bucket_start - start) / span) * SVG_W;
      const y = SVG_H - 10 - (b.share_pct / 100) * (SVG_H - 30);
      return `${x.toFixed(1)},${y.toFixed(1)}`;
    })
    .join(" ");
  return (
    `<svg class="share-series" viewBox="0 0 ${SVG_W} ${SVG_H}" role="img">` +
    `<polyline fill="none" data-points="${buckets.length}" points="${pts}"/></svg>`
  );
}

export function errorPanel(message: string): string {
  return (
    `<div class="error-panel" role="alert">` +
    `<p>${escapeHtml(message)}</p>` +
    `<button class="retry" data-action="retry">retry</button>` +
    `</div>`
  );
}

export function noticePanel(message: string): string {
  return `<div class="notice-panel">${escapeHtml(message)}</div>`;
}
