"""Baseline-vs-final reachability diffing and loss percentages.

An origin is pronounced unreachable when it was visible in the baseline
snapshot but is absent from the final one, confirmed by also being absent
on the available snapshots of the preceding confirmation window.  Loss
percentages truncate to one decimal; cross-IXP averages round half-up to
two decimals.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass
from typing import Iterable, Sequence

from .asndb import AsnDb
from .metrics import PresenceMap, check_country
from .rtingest import DateRange, Snapshot, SnapshotSeries


@dataclass(frozen=True)
class ReachabilityReport:
    """Which in-country origins an IXP lost between baseline and final."""

    ixp: str
    country: str
    baseline_date: dt.date
    final_date: dt.date
    confirmation_window: int
    total_baseline: int
    lost: int
    pct_lost: float
    lost_asns: tuple[int, ...]
    new_asns: tuple[int, ...]
    # Origins absent on the final day but seen inside the confirmation
    # window: flaps, not losses.  Reported so the window's effect is visible.
    flapping_asns: tuple[int, ...] = ()


def _snapshot_or_fail(series: SnapshotSeries, day: dt.date, what: str) -> Snapshot:
    snap = series.snapshot_on(day)
    if snap is None:
        raise ValueError(f"{what} {day} has no snapshot for IXP {series.ixp!r}")
    return snap


def _country_origins(snapshot: Snapshot, db: AsnDb, country: str) -> frozenset[int]:
    records = db.records
    out = set()
    for entry in snapshot.entries:
        origin = entry.as_path[-1]
        rec = records.get(origin)
        if rec is not None and rec.country == country:
            out.add(origin)
    return frozenset(out)


def baseline_origins(
    series: SnapshotSeries, db: AsnDb, country: str, baseline_date: dt.date
) -> frozenset[int]:
    """Distinct in-country origins in the baseline snapshot."""
    check_country(country)
    return _country_origins(_snapshot_or_fail(series, baseline_date, "baseline date"), db, country)


def unreachable_origins(
    series: SnapshotSeries,
    db: AsnDb,
    country: str,
    baseline_date: dt.date,
    final_date: dt.date,
    window: int = 3,
) -> frozenset[int]:
    """Baseline origins absent on the final day and on every available
    snapshot of the `window` days before it.

    Gap dates inside the window neither confirm nor refute an absence.
    """
    if window < 0:
        raise ValueError("confirmation window must be >= 0")
    base = baseline_origins(series, db, country, baseline_date)
    final_present = _country_origins(_snapshot_or_fail(series, final_date, "final date"), db, country)

    check_days = []
    for back in range(1, window + 1):
        snap = series.snapshot_on(final_date - dt.timedelta(days=back))
        if snap is not None:
            check_days.append(_country_origins(snap, db, country))

    lost = base - final_present
    for present in check_days:
        lost -= present
    return frozenset(lost)


def pct_lost(total: int, lost: int) -> float:
    """Loss percentage truncated (not rounded) to one decimal."""
    if total <= 0:
        raise ValueError("percentage undefined for an empty baseline")
    if not 0 <= lost <= total:
        raise ValueError(f"lost count {lost} outside [0, {total}]")
    return (1000 * lost // total) / 10


def average_pct(pcts: Sequence[float]) -> float:
    """Mean of already-truncated one-decimal percentages, two decimals,
    half-up."""
    if not pcts:
        raise ValueError("cannot average an empty list of percentages")
    tenths = [round(p * 10) for p in pcts]
    hundredths, rem = divmod(10 * sum(tenths), len(tenths))
    if 2 * rem >= len(tenths):
        hundredths += 1
    return hundredths / 100


def offline_days(presence: PresenceMap, origin: int, window: DateRange) -> int:
    """Snapshot days inside the window on which the origin is absent.

    Gap days have no snapshot and are not counted against the origin.
    """
    if origin not in presence:
        raise KeyError(f"origin AS{origin} never appears in the presence map")
    present = presence[origin]
    return sum(1 for day in presence.snapshot_dates if day in window and day not in present)


def neighbor_timeline(series: SnapshotSeries, db: AsnDb, country: str) -> PresenceMap:
    """For each in-country neighbor ever seen, the dates on which it is the
    first hop of at least one route."""
    check_country(country)
    records = db.records
    seen: dict[int, set[dt.date]] = {}
    for snap in series.snapshots:
        for entry in snap.entries:
            neighbor = entry.as_path[0]
            rec = records.get(neighbor)
            if rec is not None and rec.country == country:
                seen.setdefault(neighbor, set()).add(snap.date)
    return PresenceMap({asn: frozenset(dates) for asn, dates in seen.items()}, series.dates())


def diff_reachability(
    series: SnapshotSeries,
    db: AsnDb,
    country: str,
    baseline_date: dt.date,
    final_date: dt.date,
    window: int = 3,
) -> ReachabilityReport:
    """Full baseline-vs-final report for one (IXP, country) pair."""
    base = baseline_origins(series, db, country, baseline_date)
    final_present = _country_origins(_snapshot_or_fail(series, final_date, "final date"), db, country)
    confirmed = unreachable_origins(series, db, country, baseline_date, final_date, window)
    unconfirmed = (base - final_present) - confirmed
    return ReachabilityReport(
        ixp=series.ixp,
        country=country,
        baseline_date=baseline_date,
        final_date=final_date,
        confirmation_window=window,
        total_baseline=len(base),
        lost=len(confirmed),
        pct_lost=pct_lost(len(base), len(confirmed)) if base else 0.0,
        lost_asns=tuple(sorted(confirmed)),
        new_asns=tuple(sorted(final_present - base)),
        flapping_asns=tuple(sorted(unconfirmed)),
    )


def format_report_table(reports: Iterable[ReachabilityReport]) -> str:
    """Human-readable table of unreachable origins across IXPs, with the
    cross-IXP average on the last line."""
    reports = list(reports)
    if not reports:
        return "(no reports)\n"
    country = reports[0].country
    lines = [
        f"Unreachable {country} origins "
        f"(baseline {reports[0].baseline_date}, final {reports[0].final_date}, "
        f"confirmation {reports[0].confirmation_window}d)",
        f"{'IXP':<10} {'Total ASes':>10} {'Lost ASes':>10} {'% Lost':>8}",
    ]
    for rep in reports:
        lines.append(f"{rep.ixp:<10} {rep.total_baseline:>10} {rep.lost:>10} {rep.pct_lost:>7.1f}%")
    avg = average_pct([rep.pct_lost for rep in reports])
    lines.append(f"average % lost: {avg:.2f}")
    return "\n".join(lines) + "\n"


def format_report_record(report: ReachabilityReport) -> str:
    """One machine-readable `key=value` line per report."""
    def asns(values: tuple[int, ...]) -> str:
        return ",".join(str(v) for v in values)

    return (
        f"ixp={report.ixp} country={report.country} "
        f"baseline_date={report.baseline_date} final_date={report.final_date} "
        f"confirmation_window={report.confirmation_window} "
        f"total_baseline={report.total_baseline} lost={report.lost} "
        f"pct_lost={report.pct_lost:.1f} "
        f"lost_asns={asns(report.lost_asns)} "
        f"new_asns={asns(report.new_asns)} "
        f"flapping_asns={asns(report.flapping_asns)}"
    )
