import datetime as dt
from pathlib import Path

import pytest

from ixpreach.asndb import AsnDb, AsnRecord
from ixpreach.rtingest import RouteEntry, Snapshot, SnapshotSeries

FIXTURES = Path(__file__).parent / "fixtures"

BASE = dt.date(2022, 2, 19)


def day(offset: int) -> dt.date:
    return BASE + dt.timedelta(days=offset)


def make_db(countries: dict[int, str]) -> AsnDb:
    """In-memory AsnDb from a plain {asn: country} mapping."""
    records = {asn: AsnRecord(asn, cc, "ripencc") for asn, cc in sorted(countries.items())}
    return AsnDb(records=records)


def make_snapshot(rows, ixp="testix", date=BASE, skipped=0) -> Snapshot:
    """Snapshot from (prefix, path) tuples; paths may be lists or tuples."""
    entries = tuple(RouteEntry(prefix, tuple(path)) for prefix, path in rows)
    return Snapshot(ixp=ixp, date=date, entries=entries, skipped=skipped)


def make_series(days_rows, ixp="testix", gaps=()) -> SnapshotSeries:
    """Series from {date: rows} where rows feed make_snapshot."""
    snapshots = tuple(
        make_snapshot(rows, ixp=ixp, date=d) for d, rows in sorted(days_rows.items())
    )
    return SnapshotSeries(ixp=ixp, snapshots=snapshots, gaps=tuple(sorted(gaps)))


@pytest.fixture
def delegated_dir() -> Path:
    return FIXTURES / "delegated"
