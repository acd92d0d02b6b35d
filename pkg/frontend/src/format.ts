// Display formatting only; values are rendered verbatim within a declared
// precision of 4 decimals and never recomputed.

export function fmtValue(v: number | null | undefined): string {
  if (v === null || v === undefined) return "n/a";
  if (Number.isInteger(v)) return String(v);
  return String(parseFloat(v.toFixed(4)));
}

export function fmtCount(v: number): string {
  return v.toLocaleString("en-US");
}

export function fmtDuration(ms: number | null): string {
  if (ms === null) return "n/a";
  const s = ms / 1000;
  if (s < 60) return `${s.toFixed(2)} s`;
  if (s < 3600) return `${(s / 60).toFixed(2)} m`;
  if (s < 86400) return `${(s / 3600).toFixed(2)} h`;
  if (s < 31557600) return `${(s / 86400).toFixed(2)} d`;
  return `${(s / 31557600).toFixed(2)} y`;
}

export function fmtDate(tsMs: number | null): string {
  if (tsMs === null) return "n/a";
  return new Date(tsMs).toISOString().slice(0, 10);
}

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}
