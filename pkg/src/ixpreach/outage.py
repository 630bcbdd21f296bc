"""Dip detection over metric series and catalog-based event annotation.

A day dips when its value falls more than a threshold fraction below the
median of the most recent prior days; runs of dip days form one outage
event.  Detected events can be annotated from a catalog of known
real-world disruptions (`id|start|end|label|source` lines, end empty for
an open-ended range).
"""

from __future__ import annotations

import csv
import datetime as dt
import statistics
from dataclasses import dataclass, replace
from importlib import resources
from typing import IO, Iterable, Sequence

from .metrics import METRIC_NAMES, MetricSeries

DEFAULT_TRAILING_WINDOW = 7
DEFAULT_THRESHOLD = 0.05
DEFAULT_MIN_REFERENCE = 10

EVENTS_CSV_HEADER = ("ixp", "country", "metric", "start", "end", "reference", "min", "drop", "annotation")


@dataclass(frozen=True)
class OutageEvent:
    """A contiguous dip in one metric series."""

    ixp: str
    country: str
    metric: str
    start: dt.date
    end: dt.date
    reference_level: float
    min_value: float
    relative_drop: float
    annotation: str | None = None


@dataclass(frozen=True)
class CatalogEvent:
    """A known real-world disruption to match detected outages against."""

    id: str
    start: dt.date
    end: dt.date | None  # None: open-ended
    label: str
    source: str = ""

    def __post_init__(self) -> None:
        if not self.label:
            raise ValueError(f"catalog event {self.id!r} needs a label")
        if self.end is not None and self.end < self.start:
            raise ValueError(f"catalog event {self.id!r} ends before it starts")


def detect_dips(
    series: MetricSeries,
    metric: str,
    *,
    trailing_window: int = DEFAULT_TRAILING_WINDOW,
    threshold: float = DEFAULT_THRESHOLD,
    min_reference: float = DEFAULT_MIN_REFERENCE,
) -> list[OutageEvent]:
    """Find dips: days where the value drops below (1 - threshold) times
    the median of the up-to-N most recent prior values.

    Consecutive dip days merge into one event (calendar gaps between them
    do not split an event, since gap days carry no data).  The reference
    must reach `min_reference` for a day to qualify, which keeps tiny
    series from generating noise events.
    """
    if trailing_window < 1:
        raise ValueError("trailing_window must be >= 1")
    if not 0 < threshold < 1:
        raise ValueError("threshold must be a fraction in (0, 1)")
    values = series.values(metric)
    dates = series.dates()
    if len(values) < trailing_window + 1:
        raise ValueError(
            f"series has {len(values)} points; need at least {trailing_window + 1}"
        )

    events: list[OutageEvent] = []
    open_event: dict | None = None
    for i, (day, value) in enumerate(zip(dates, values)):
        is_dip = False
        if i > 0:
            ref = statistics.median(values[max(0, i - trailing_window):i])
            is_dip = ref >= min_reference and value < (1 - threshold) * ref
        if is_dip:
            if open_event is None:
                open_event = {"start": day, "end": day, "reference": ref, "min": value}
            else:
                open_event["end"] = day
                open_event["min"] = min(open_event["min"], value)
        elif open_event is not None:
            events.append(_close_event(series, metric, open_event))
            open_event = None
    if open_event is not None:
        events.append(_close_event(series, metric, open_event))
    return events


def _close_event(series: MetricSeries, metric: str, ev: dict) -> OutageEvent:
    reference = ev["reference"]
    return OutageEvent(
        ixp=series.ixp,
        country=series.country,
        metric=metric,
        start=ev["start"],
        end=ev["end"],
        reference_level=reference,
        min_value=ev["min"],
        relative_drop=(reference - ev["min"]) / reference,
    )


def _overlap_days(event: OutageEvent, entry: CatalogEvent, slack: int) -> int:
    lo = entry.start - dt.timedelta(days=slack)
    hi = (entry.end + dt.timedelta(days=slack)) if entry.end is not None else event.end
    first = max(event.start, lo)
    last = min(event.end, hi)
    return (last - first).days + 1 if last >= first else 0


def annotate(
    events: Iterable[OutageEvent],
    catalog: Sequence[CatalogEvent],
    slack: int = 0,
) -> list[OutageEvent]:
    """Attach the best-matching catalog id to each outage.

    Catalog ranges widened by `slack` days must overlap the outage span;
    the match with the most overlapping days wins, earliest catalog start
    breaking ties.  Unmatched outages keep an empty annotation.  Dates and
    levels are never altered.
    """
    if slack < 0:
        raise ValueError("slack must be >= 0")
    out = []
    for event in events:
        best = None
        best_key = None
        for entry in catalog:
            days = _overlap_days(event, entry, slack)
            if days <= 0:
                continue
            key = (-days, entry.start, entry.id)
            if best_key is None or key < best_key:
                best, best_key = entry, key
        out.append(replace(event, annotation=best.id) if best is not None else event)
    return out


def parse_catalog(source: Iterable[str]) -> list[CatalogEvent]:
    """Parse `id|start|end|label|source` lines; `#` starts a comment."""
    entries = []
    for lineno, line in enumerate(source, start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("|")
        if len(parts) != 5:
            raise ValueError(f"catalog line {lineno}: expected 5 pipe-separated fields")
        event_id, start_text, end_text, label, source_text = (p.strip() for p in parts)
        try:
            start = dt.date.fromisoformat(start_text)
            end = dt.date.fromisoformat(end_text) if end_text else None
        except ValueError as exc:
            raise ValueError(f"catalog line {lineno}: {exc}") from None
        entries.append(CatalogEvent(event_id, start, end, label, source_text))
    return entries


def load_seed_catalog() -> list[CatalogEvent]:
    """The catalog of known 2022 disruption events bundled with the package."""
    text = resources.files("ixpreach").joinpath("data/event_catalog.txt").read_text("utf-8")
    return parse_catalog(text.splitlines())


def write_events_csv(stream: IO[str], events: Iterable[OutageEvent]) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(EVENTS_CSV_HEADER)
    for ev in sorted(events, key=lambda e: (e.ixp, e.country, e.metric, e.start)):
        writer.writerow(
            (ev.ixp, ev.country, ev.metric, ev.start.isoformat(), ev.end.isoformat(),
             format(ev.reference_level, ".6g"), format(ev.min_value, ".6g"),
             format(ev.relative_drop, ".6f"), ev.annotation or "")
        )


def read_events_csv(stream: IO[str]) -> list[OutageEvent]:
    reader = csv.reader(stream)
    header = next(reader, None)
    if header is None or tuple(header) != EVENTS_CSV_HEADER:
        raise ValueError(f"not an events CSV (header {header!r})")
    out = []
    for row in reader:
        if not row:
            continue
        ixp, country, metric, start, end, reference, minimum, drop, annotation = row
        out.append(OutageEvent(ixp, country, metric,
                               dt.date.fromisoformat(start), dt.date.fromisoformat(end),
                               float(reference), float(minimum), float(drop),
                               annotation or None))
    return out


def check_metric(metric: str) -> str:
    if metric not in METRIC_NAMES:
        raise ValueError(f"unknown metric {metric!r}; valid metrics: {', '.join(METRIC_NAMES)}")
    return metric
