"""Daily per-IXP per-country visibility metrics and their time series.

Four counts are taken from each snapshot for a given country:

* announcements: routing-table rows whose origin AS is in-country
  (duplicates count, one row is one announcement)
* distinct_origins: unique in-country origin ASNs
* distinct_prefixes: unique prefixes announced by in-country origins
* distinct_neighbors: unique in-country first-hop ASNs, judged by the
  neighbor's own country
"""

from __future__ import annotations

import csv
import datetime as dt
import re
from collections.abc import Mapping
from dataclasses import dataclass
from typing import IO, Iterable, Iterator

from .asndb import AsnDb
from .rtingest import Snapshot, SnapshotSeries

METRIC_NAMES = ("announcements", "distinct_origins", "distinct_prefixes", "distinct_neighbors")

METRICS_CSV_HEADER = ("ixp", "country", "date") + METRIC_NAMES

_COUNTRY_RE = re.compile(r"^[A-Z]{2}$")


def check_country(country: str) -> str:
    """Reject filter codes that can never name a real country."""
    if not _COUNTRY_RE.match(country) or country == "ZZ":
        raise ValueError(f"not a usable country filter: {country!r}")
    return country


@dataclass(frozen=True, slots=True)
class DailyMetrics:
    ixp: str
    date: dt.date
    country: str
    announcements: int
    distinct_origins: int
    distinct_prefixes: int
    distinct_neighbors: int


@dataclass(frozen=True)
class MetricSeries:
    """Date-ordered DailyMetrics for one (IXP, country) pair."""

    ixp: str
    country: str
    points: tuple[DailyMetrics, ...]
    gaps: tuple[dt.date, ...] = ()

    def dates(self) -> tuple[dt.date, ...]:
        return tuple(p.date for p in self.points)

    def values(self, metric: str) -> tuple[int, ...]:
        if metric not in METRIC_NAMES:
            raise ValueError(f"unknown metric {metric!r}; expected one of {METRIC_NAMES}")
        return tuple(getattr(p, metric) for p in self.points)


class PresenceMap(Mapping):
    """ASN -> frozenset of snapshot dates on which the ASN was seen.

    Also remembers every snapshot date of the underlying series, so
    absence can be counted without conflating gaps with outages.
    """

    def __init__(self, by_asn: dict[int, frozenset[dt.date]], snapshot_dates: Iterable[dt.date]):
        self._by_asn = by_asn
        self.snapshot_dates = tuple(sorted(snapshot_dates))

    def __getitem__(self, asn: int) -> frozenset[dt.date]:
        return self._by_asn[asn]

    def __iter__(self) -> Iterator[int]:
        return iter(self._by_asn)

    def __len__(self) -> int:
        return len(self._by_asn)

    def __repr__(self) -> str:
        return f"PresenceMap({len(self._by_asn)} asns over {len(self.snapshot_dates)} days)"


def compute_daily(snapshot: Snapshot, db: AsnDb, country: str) -> DailyMetrics:
    """Reduce one snapshot to the four counts for one country.

    Pure; the result does not depend on row order.
    """
    check_country(country)
    records = db.records
    announcements = 0
    origins: set[int] = set()
    prefixes: set[str] = set()
    neighbors: set[int] = set()
    for entry in snapshot.entries:
        path = entry.as_path
        rec = records.get(path[-1])
        if rec is not None and rec.country == country:
            announcements += 1
            origins.add(path[-1])
            prefixes.add(entry.prefix)
        rec = records.get(path[0])
        if rec is not None and rec.country == country:
            neighbors.add(path[0])
    return DailyMetrics(
        ixp=snapshot.ixp,
        date=snapshot.date,
        country=country,
        announcements=announcements,
        distinct_origins=len(origins),
        distinct_prefixes=len(prefixes),
        distinct_neighbors=len(neighbors),
    )


def build_series(series: SnapshotSeries, db: AsnDb, country: str) -> MetricSeries:
    """One DailyMetrics per snapshot, order preserved, gaps carried over."""
    points = tuple(compute_daily(snap, db, country) for snap in series.snapshots)
    return MetricSeries(ixp=series.ixp, country=country, points=points, gaps=series.gaps)


def origin_presence(series: SnapshotSeries, db: AsnDb, country: str) -> PresenceMap:
    """For each in-country origin ever seen, the exact snapshot dates on
    which at least one route with that origin exists."""
    check_country(country)
    records = db.records
    seen: dict[int, set[dt.date]] = {}
    for snap in series.snapshots:
        for entry in snap.entries:
            origin = entry.as_path[-1]
            rec = records.get(origin)
            if rec is not None and rec.country == country:
                seen.setdefault(origin, set()).add(snap.date)
    return PresenceMap({asn: frozenset(dates) for asn, dates in seen.items()}, series.dates())


def write_metrics_csv(stream: IO[str], series_list: Iterable[MetricSeries]) -> None:
    """Emit the plot-data CSV, one row per (ixp, country, day), sorted."""
    rows = []
    for series in series_list:
        for p in series.points:
            rows.append((p.ixp, p.country, p.date.isoformat(), p.announcements,
                         p.distinct_origins, p.distinct_prefixes, p.distinct_neighbors))
    rows.sort()
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(METRICS_CSV_HEADER)
    writer.writerows(rows)


def read_metrics_csv(stream: IO[str]) -> list[DailyMetrics]:
    """Read rows written by :func:`write_metrics_csv`."""
    reader = csv.reader(stream)
    header = next(reader, None)
    if header is None or tuple(header) != METRICS_CSV_HEADER:
        raise ValueError(f"not a metrics CSV (header {header!r})")
    out = []
    for row in reader:
        if not row:
            continue
        ixp, country, date_text, ann, orig, pref, neigh = row
        out.append(DailyMetrics(ixp, dt.date.fromisoformat(date_text), country,
                                int(ann), int(orig), int(pref), int(neigh)))
    return out
