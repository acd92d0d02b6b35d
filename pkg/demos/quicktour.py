#!/usr/bin/env python3
"""End-to-end tour on a small synthetic music-style log.

Walks every capability once: ingest, validation, dataset statistics,
preprocessing, split construction, split diagnostics, threshold summary,
and the Markdown audit document. Run from the repo root:

    python3 demos/quicktour.py
"""
import tempfile
from pathlib import Path

import numpy as np

from splitaudit import (
    ColumnMapping,
    PreprocessSpec,
    SplitSpec,
    apply_preprocessing,
    cold_start,
    compare_splits,
    compare_stats,
    core_stats,
    distribution_shift,
    leakage,
    make_split,
    parse_log,
    render_markdown,
    repeat_stats,
    summarize,
    temporal_stats,
    timeline,
    validate_log,
)

rng = np.random.default_rng(2468)

# --- fabricate a log with the pathologies the toolkit is built to expose ---
DAY = 86_400
rows = []
for u in range(40):
    t = 1_600_000_000 + int(rng.integers(0, 30 * DAY))
    n_events = int(rng.integers(5, 60))
    favourite = int(rng.integers(0, 8))
    for _ in range(n_events):
        if rng.random() < 0.35:
            item = favourite  # repeat consumption
        else:
            item = int(rng.integers(0, 120))
        rows.append((f"u{u:02d}", f"track{item:03d}", t))
        if rng.random() < 0.25:
            rows.append((f"u{u:02d}", f"track{item:03d}", t))  # collision + repeat
        t += int(rng.integers(0, 2 * DAY))

csv_path = Path(tempfile.mkdtemp()) / "listening.csv"
with open(csv_path, "w") as fh:
    fh.write("user_id,item_id,timestamp\n")
    for u, i, t in rows:
        fh.write(f"{u},{i},{t}\n")
print(f"synthetic log: {len(rows)} events -> {csv_path}")

# --- ingest and validate ---------------------------------------------------
log = parse_log(csv_path, ColumnMapping(timestamp_format="epoch_seconds"))
print(f"\nparsed: {log}")
print(f"violations: {len(validate_log(log))} (canonical by construction)")

# --- dataset-level statistics ----------------------------------------------
core = core_stats(log)
print(f"\nusers={core.n_users} items={core.n_items} interactions={core.n_interactions}")
print(f"avg sequence length {core.avg_seq_len:.2f}, density {core.density_pct:.3f}%")

temporal = temporal_stats(log)
print(f"timestamp collision rate: {temporal.collision_rate_pct:.2f}%")

repeats = repeat_stats(log)
print(f"repeated {repeats.repeated_interactions_pct:.1f}%, "
      f"consecutive {repeats.consecutive_repeats_pct:.1f}%")

tl = timeline({"raw": log}, granularity="week")
print(f"weekly timeline buckets: {len(tl.buckets['raw'])}")

# --- preprocess and compare against raw --------------------------------------
prepared = apply_preprocessing(
    log, PreprocessSpec(n_core=5, drop_consecutive_repeats=True)
)
print(f"\nafter dedup + 5-core: {len(prepared)} interactions "
      f"({100 * (1 - len(prepared) / len(log)):.1f}% removed)")
delta = compare_stats(core_stats(prepared), core)
seq_row = next(r for r in delta.rows if r.field == "seq_len.mean")
print(f"mean sequence length change: {seq_row.delta_pct:+.1f}%")

# --- split two ways and diagnose ---------------------------------------------
loo = make_split(prepared, SplitSpec("leave_one_out"), "listening.csv|dedup+5-core")
gts = make_split(
    prepared,
    SplitSpec("global_temporal", 0.8, 0.9, "all_items"),
    "listening.csv|dedup+5-core",
)

for name, bundle in (("LOO", loo), ("GTS q0.9", gts)):
    leak = leakage(bundle, "test")
    cold = cold_start(bundle, "test")
    print(f"\n[{name}] train={len(bundle.train)} test targets={len(bundle.test_target)}")
    print(f"  overlap {leak.overlap_pct:.0f}%, leaked targets {leak.leaked_target_pct:.1f}%")
    print(f"  cold users {cold.cold_users_pct:.1f}%, cold-item interactions "
          f"{cold.cold_interactions_pct:.1f}%")

shift = distribution_shift(gts, prepared, "test")
print(f"\nGTS shift vs preprocessed: gap KS={shift.timegap_ks:.3f}, "
      f"position KS={shift.position_ks:.3f}")

matrix = compare_splits([loo, gts], eval_side="test")
print("\n" + matrix.to_text())

# --- summary + audit document -------------------------------------------------
summary = summarize(
    [temporal_stats(prepared), repeat_stats(prepared),
     leakage(gts, "test"), cold_start(gts, "test"), shift],
    dataset="listening.csv",
    provenance="listening.csv|dedup+5-core",
)
print("\ncards:")
for card in summary.cards:
    value = "n/a" if card.value is None else f"{card.value:.4f}"
    print(f"  {card.metric:28s} {value:>12s}  {card.status}")

doc = render_markdown(summary, [core, temporal, repeats])
out_md = csv_path.parent / "audit.md"
out_md.write_text(doc)
print(f"\nmarkdown audit written to {out_md}")
