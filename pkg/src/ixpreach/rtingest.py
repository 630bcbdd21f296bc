"""Parse daily route-server snapshot CSVs into typed routing tables.

A snapshot file is one IXP's routing table for one day: a UTF-8 CSV with a
header row, where one column holds the announced prefix and another the
space-separated AS path.  Files live under `<root>/<ixp>/<YYYY-MM-DD>.csv`.
"""

from __future__ import annotations

import csv
import datetime as dt
import ipaddress
import logging
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import IO, Iterable, Iterator

from .asndb import ASN_MAX, AsnDb

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class DateRange:
    """Inclusive span of calendar days."""

    start: dt.date
    end: dt.date

    def __post_init__(self) -> None:
        if self.end < self.start:
            raise ValueError(f"date range ends before it starts: {self.start}..{self.end}")

    def days(self) -> Iterator[dt.date]:
        day = self.start
        while day <= self.end:
            yield day
            day += dt.timedelta(days=1)

    def __iter__(self) -> Iterator[dt.date]:
        return self.days()

    def __contains__(self, day: dt.date) -> bool:
        return self.start <= day <= self.end

    def __len__(self) -> int:
        return (self.end - self.start).days + 1


@dataclass(frozen=True, slots=True)
class RouteEntry:
    """One routing-table row: a prefix and the AS path as announced.

    The origin is the last path element, the neighbor (the AS facing the
    route server) the first; a single-element path makes them equal.
    """

    prefix: str
    as_path: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.as_path:
            raise ValueError("as_path must be non-empty")

    @property
    def origin(self) -> int:
        return self.as_path[-1]

    @property
    def neighbor(self) -> int:
        return self.as_path[0]


@dataclass(frozen=True)
class Snapshot:
    """One IXP's routing table for one day."""

    ixp: str
    date: dt.date
    entries: tuple[RouteEntry, ...]
    skipped: int = 0


@dataclass(frozen=True)
class SnapshotSeries:
    """Date-ordered snapshots for one IXP over a study window."""

    ixp: str
    snapshots: tuple[Snapshot, ...]
    gaps: tuple[dt.date, ...] = ()

    def __post_init__(self) -> None:
        dates = [s.date for s in self.snapshots]
        if any(b <= a for a, b in zip(dates, dates[1:])):
            raise ValueError("snapshot dates must be strictly increasing")
        if set(self.gaps) & set(dates):
            raise ValueError("gap dates overlap snapshot dates")

    def dates(self) -> tuple[dt.date, ...]:
        return tuple(s.date for s in self.snapshots)

    def snapshot_on(self, day: dt.date) -> Snapshot | None:
        for snap in self.snapshots:
            if snap.date == day:
                return snap
        return None


@dataclass(frozen=True)
class SnapshotSchema:
    """Maps logical snapshot fields to CSV column names.

    `origin` and `neighbor` may name columns carrying precomputed values;
    when mapped, rows whose cells disagree with the path endpoints are
    treated as defective and skipped.
    """

    prefix: str = "prefix"
    as_path: str = "as_path"
    origin: str | None = None
    neighbor: str | None = None

    @classmethod
    def from_file(cls, path: str | Path) -> "SnapshotSchema":
        """Load a `key = value` mapping file (# starts a comment)."""
        known = {"prefix", "as_path", "origin", "neighbor"}
        values: dict[str, str] = {}
        with open(path, encoding="utf-8") as handle:
            for lineno, line in enumerate(handle, start=1):
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ValueError(f"{path}:{lineno}: expected 'field = column'")
                key, _, value = line.partition("=")
                key, value = key.strip(), value.strip()
                if key not in known:
                    raise ValueError(f"{path}:{lineno}: unknown field {key!r}")
                values[key] = value
        return cls(**values)


DEFAULT_SCHEMA = SnapshotSchema()


@lru_cache(maxsize=1 << 16)
def _normalize_prefix(text: str) -> str | None:
    """Canonical CIDR text for a prefix cell, or None when unparseable."""
    try:
        return str(ipaddress.ip_network(text, strict=False))
    except ValueError:
        return None


def normalize_path(path: Iterable[int]) -> tuple[int, ...]:
    """Collapse consecutive duplicate ASNs (prepend removal).

    Order is otherwise preserved and the endpoints never change.
    """
    out: list[int] = []
    for asn in path:
        if not out or out[-1] != asn:
            out.append(asn)
    if not out:
        raise ValueError("cannot normalize an empty path")
    return tuple(out)


def _resolve_column(header: list[str], name: str) -> int:
    try:
        return header.index(name)
    except ValueError:
        raise ValueError(f"snapshot is missing mapped column {name!r} (header: {header})") from None


def parse_snapshot(
    source: IO[str] | Iterable[str],
    ixp: str,
    date: dt.date,
    schema: SnapshotSchema = DEFAULT_SCHEMA,
) -> Snapshot:
    """Parse one snapshot CSV stream.

    Every data row yields either a RouteEntry or a +1 on the skipped
    counter; duplicate rows are kept, each being one announcement.  Rows
    with empty paths, non-numeric path tokens (including brace-delimited
    AS_SET segments) or unparseable prefixes are skipped.
    """
    reader = csv.reader(source)
    header = next(reader, None)
    if header is None:
        raise ValueError(f"snapshot for {ixp} {date} has no header row")
    p_idx = _resolve_column(header, schema.prefix)
    a_idx = _resolve_column(header, schema.as_path)
    o_idx = _resolve_column(header, schema.origin) if schema.origin else None
    n_idx = _resolve_column(header, schema.neighbor) if schema.neighbor else None

    entries: list[RouteEntry] = []
    skipped = 0
    for row in reader:
        if not row:
            continue
        try:
            prefix_cell = row[p_idx]
            tokens = row[a_idx].split()
        except IndexError:
            skipped += 1
            continue
        if not tokens:
            skipped += 1
            continue
        path: list[int] = []
        for token in tokens:
            if not (token.isascii() and token.isdigit()):
                break
            asn = int(token)
            if asn > ASN_MAX:
                break
            path.append(asn)
        if len(path) != len(tokens):
            skipped += 1
            continue
        prefix = _normalize_prefix(prefix_cell.strip())
        if prefix is None:
            skipped += 1
            continue
        if o_idx is not None and row[o_idx].strip() != str(path[-1]):
            skipped += 1
            continue
        if n_idx is not None and row[n_idx].strip() != str(path[0]):
            skipped += 1
            continue
        entries.append(RouteEntry(prefix, tuple(path)))

    return Snapshot(ixp=ixp, date=date, entries=tuple(entries), skipped=skipped)


def load_series(
    root: str | Path,
    ixp: str,
    window: DateRange,
    schema: SnapshotSchema = DEFAULT_SCHEMA,
) -> SnapshotSeries:
    """Load every `<root>/<ixp>/<date>.csv` inside the window.

    Window days with no file become gaps; an unreadable file is logged
    and treated as a gap rather than fabricated.  A missing IXP directory
    is a hard error.
    """
    ixp_dir = Path(root) / ixp
    if not ixp_dir.is_dir():
        raise FileNotFoundError(f"no snapshot directory for IXP {ixp!r} under {root}")
    snapshots: list[Snapshot] = []
    gaps: list[dt.date] = []
    for day in window.days():
        path = ixp_dir / f"{day.isoformat()}.csv"
        try:
            with open(path, newline="", encoding="utf-8") as handle:
                snapshots.append(parse_snapshot(handle, ixp, day, schema))
        except FileNotFoundError:
            gaps.append(day)
        except OSError as exc:
            log.warning("treating unreadable snapshot %s as a gap: %s", path, exc)
            gaps.append(day)
    return SnapshotSeries(ixp=ixp, snapshots=tuple(snapshots), gaps=tuple(gaps))


def attribute_country(entry: RouteEntry, db: AsnDb) -> str | None:
    """Country of the entry's originating AS, or None when unknown."""
    return db.lookup(entry.origin)
