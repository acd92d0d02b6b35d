"""Loading interaction logs from delimited text files.

Input is UTF-8 text with a header row; the delimiter (comma or tab) is
auto-detected from the header. Timestamps are normalized to epoch
milliseconds UTC regardless of the source precision.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from datetime import datetime, timezone

from .errors import EmptyLog, MalformedRow, MissingColumn
from .log import InteractionLog

TIMESTAMP_FORMATS = ("epoch_seconds", "epoch_millis", "iso8601")


@dataclass(frozen=True)
class ColumnMapping:
    """Names the user/item/timestamp columns and the timestamp encoding."""

    user_column: str = "user_id"
    item_column: str = "item_id"
    timestamp_column: str = "timestamp"
    timestamp_format: str = "epoch_millis"

    def __post_init__(self):
        cols = (self.user_column, self.item_column, self.timestamp_column)
        if len(set(cols)) != 3:
            raise ValueError(f"column names must be pairwise distinct, got {cols}")
        if self.timestamp_format not in TIMESTAMP_FORMATS:
            raise ValueError(
                f"timestamp_format must be one of {TIMESTAMP_FORMATS}, "
                f"got {self.timestamp_format!r}"
            )


def _parse_timestamp_ms(raw: str, fmt: str) -> int:
    if fmt == "epoch_millis":
        v = float(raw)
        if not math.isfinite(v):
            raise ValueError("non-finite timestamp")
        ms = int(round(v))
    elif fmt == "epoch_seconds":
        v = float(raw)
        if not math.isfinite(v):
            raise ValueError("non-finite timestamp")
        ms = int(round(v * 1000.0))
    else:  # iso8601
        text = raw.strip()
        if text.endswith(("Z", "z")):
            text = text[:-1] + "+00:00"
        dt = datetime.fromisoformat(text)
        if dt.tzinfo is None:
            dt = dt.replace(tzinfo=timezone.utc)
        ms = round(dt.timestamp() * 1000.0)
    if ms < 0:
        raise ValueError("timestamp before epoch")
    return ms


def detect_delimiter(header_line: str) -> str:
    """Tab wins when both separators appear (tab-separated data may contain commas)."""
    return "\t" if "\t" in header_line else ","


def parse_log(
    path,
    mapping: ColumnMapping,
    role: str = "raw",
    skip_malformed: bool = False,
    skipped: list | None = None,
) -> InteractionLog:
    """Parse a delimited interaction file into a canonical InteractionLog.

    Ordinals equal the 0-based data-row index of the source file (header
    excluded), so the original event order is recoverable under timestamp
    collisions. Malformed rows raise MalformedRow with the 1-based file line
    number unless skip_malformed is set, in which case they are appended to
    `skipped` (if given) and their ordinals are simply absent from the log.
    """
    rows: list[tuple[str, str, int, int]] = []
    with open(path, "r", encoding="utf-8-sig", newline="") as fh:
        header_line = fh.readline()
        if not header_line:
            raise EmptyLog(f"{path}: file is empty")
        delim = detect_delimiter(header_line)
        header = next(csv.reader([header_line], delimiter=delim))
        header = [h.strip() for h in header]
        try:
            u_ix = header.index(mapping.user_column)
        except ValueError:
            raise MissingColumn(mapping.user_column) from None
        try:
            i_ix = header.index(mapping.item_column)
        except ValueError:
            raise MissingColumn(mapping.item_column) from None
        try:
            t_ix = header.index(mapping.timestamp_column)
        except ValueError:
            raise MissingColumn(mapping.timestamp_column) from None

        n_fields = len(header)
        fmt = mapping.timestamp_format
        reader = csv.reader(fh, delimiter=delim)
        ordinal = 0
        for record in reader:
            if not record:  # blank trailing line
                continue
            line_no = reader.line_num + 1  # header consumed outside the reader
            if len(record) != n_fields:
                err = MalformedRow(
                    line_no, f"expected {n_fields} fields, got {len(record)}"
                )
                if skip_malformed:
                    if skipped is not None:
                        skipped.append(err)
                    ordinal += 1
                    continue
                raise err
            try:
                ts = _parse_timestamp_ms(record[t_ix], fmt)
            except (ValueError, OverflowError) as exc:
                err = MalformedRow(
                    line_no, f"unparseable timestamp {record[t_ix]!r}: {exc}"
                )
                if skip_malformed:
                    if skipped is not None:
                        skipped.append(err)
                    ordinal += 1
                    continue
                raise err from None
            rows.append((record[u_ix], record[i_ix], ts, ordinal))
            ordinal += 1

    if not rows:
        raise EmptyLog(f"{path}: no data rows")
    return InteractionLog.from_rows(rows, role)
