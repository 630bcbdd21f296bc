"""Deterministic synthetic snapshot datasets with exact ground truth.

A scenario describes a small multi-IXP world (countries, origin counts,
neighbor counts, prefix fan-out) plus a list of injected disruptions.
``generate`` decides every outcome first and then emits routing-table
CSVs, a matching delegated-statistics file and a ground-truth JSON file,
all as a pure function of the scenario, so the analysis pipeline can be
checked against exact expected values without reimplementing it.

Disruption kinds:

* ``origin_removal``: selected origins vanish for a date range
* ``permanent_loss``: selected origins vanish from a date onward
* ``neighbor_disconnect``: all routes through selected first-hop ASNs
  vanish for a date range
* ``prefix_shrink``: every origin of a country announces only a
  ``1 - magnitude`` fraction of its prefixes for a date range
* ``join``: brand-new origins start announcing on a date
"""

from __future__ import annotations

import datetime as dt
import json
import math
import random
import statistics
from dataclasses import dataclass, field
from pathlib import Path
from typing import TYPE_CHECKING, Iterable

from .asndb import REGISTRIES
from .metrics import METRIC_NAMES
from .reachability import offline_days as _offline_days
from .rtingest import DateRange

if TYPE_CHECKING:
    from .pipeline import AnalysisResult

DISRUPTION_KINDS = ("origin_removal", "permanent_loss", "neighbor_disconnect", "prefix_shrink", "join")

DEFAULT_DETECTOR = {"trailing_window": 7, "threshold": 0.05, "min_reference": 10}

_COUNTRY_BLOCK_BASE = 10000
_TRANSIT_REGISTERED = tuple(range(900000, 900006))  # registered under the ZZ placeholder
_TRANSIT_UNREGISTERED = tuple(range(900010, 900016))
_FOREIGN_NEIGHBOR_BASE = 950000  # per-IXP pool of unregistered first hops


@dataclass(frozen=True)
class CountrySpec:
    """Per-country sizing: origin_count may be one number or a per-IXP map."""

    origin_count: int | dict[str, int]
    prefixes_per_origin: tuple[int, int] = (1, 3)
    neighbor_count: int = 1

    def origins_at(self, ixp: str) -> int:
        if isinstance(self.origin_count, dict):
            return self.origin_count[ixp]
        return self.origin_count

    def max_origins(self) -> int:
        if isinstance(self.origin_count, dict):
            return max(self.origin_count.values())
        return self.origin_count


@dataclass(frozen=True)
class Disruption:
    kind: str
    ixp: str
    country: str
    start: dt.date
    end: dt.date | None = None
    count: int | None = None
    asns: tuple[int, ...] | None = None
    magnitude: float | None = None


@dataclass(frozen=True)
class ScenarioSpec:
    seed: int
    window: DateRange
    ixps: tuple[str, ...]
    countries: dict[str, CountrySpec]
    disruptions: tuple[Disruption, ...] = ()
    gap_dates: tuple[dt.date, ...] = ()
    baseline_date: dt.date | None = None
    final_date: dt.date | None = None
    confirmation_window: int = 3
    detector: dict = field(default_factory=lambda: dict(DEFAULT_DETECTOR))

    @property
    def baseline(self) -> dt.date:
        return self.baseline_date or self.window.start

    @property
    def final(self) -> dt.date:
        return self.final_date or self.window.end

    def snapshot_days(self) -> list[dt.date]:
        gaps = set(self.gap_dates)
        return [day for day in self.window.days() if day not in gaps]


@dataclass
class GroundTruth:
    """Expected pipeline outputs for one generated scenario."""

    seed: int
    window: DateRange
    baseline_date: dt.date
    final_date: dt.date
    confirmation_window: int
    ixps: tuple[str, ...]
    countries: tuple[str, ...]
    gap_dates: tuple[dt.date, ...]
    detector: dict
    # metrics[ixp][country][date] = (announcements, distinct_origins,
    #                                distinct_prefixes, distinct_neighbors)
    metrics: dict[str, dict[str, dict[dt.date, tuple[int, int, int, int]]]]
    unreachable: dict[str, dict[str, tuple[int, ...]]]
    new_origins: dict[str, dict[str, tuple[int, ...]]]
    offline: dict[str, dict[str, dict[int, int]]]
    outages: dict[str, dict[str, dict[str, tuple[tuple[dt.date, dt.date], ...]]]]

    def save(self, path: str | Path) -> None:
        doc = {
            "seed": self.seed,
            "window": [self.window.start.isoformat(), self.window.end.isoformat()],
            "baseline_date": self.baseline_date.isoformat(),
            "final_date": self.final_date.isoformat(),
            "confirmation_window": self.confirmation_window,
            "ixps": list(self.ixps),
            "countries": list(self.countries),
            "gap_dates": [d.isoformat() for d in self.gap_dates],
            "detector": self.detector,
            "metrics": {
                ixp: {cc: {day.isoformat(): list(vals) for day, vals in sorted(per_cc.items())}
                      for cc, per_cc in sorted(per_ixp.items())}
                for ixp, per_ixp in sorted(self.metrics.items())
            },
            "unreachable": {ixp: {cc: list(v) for cc, v in sorted(per.items())}
                            for ixp, per in sorted(self.unreachable.items())},
            "new_origins": {ixp: {cc: list(v) for cc, v in sorted(per.items())}
                            for ixp, per in sorted(self.new_origins.items())},
            "offline_days": {
                ixp: {cc: {str(asn): days for asn, days in sorted(per_cc.items())}
                      for cc, per_cc in sorted(per.items())}
                for ixp, per in sorted(self.offline.items())
            },
            "outages": {
                ixp: {cc: {metric: [[a.isoformat(), b.isoformat()] for a, b in spans]
                           for metric, spans in sorted(per_cc.items())}
                      for cc, per_cc in sorted(per.items())}
                for ixp, per in sorted(self.outages.items())
            },
        }
        Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "GroundTruth":
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
        iso = dt.date.fromisoformat
        return cls(
            seed=doc["seed"],
            window=DateRange(iso(doc["window"][0]), iso(doc["window"][1])),
            baseline_date=iso(doc["baseline_date"]),
            final_date=iso(doc["final_date"]),
            confirmation_window=doc["confirmation_window"],
            ixps=tuple(doc["ixps"]),
            countries=tuple(doc["countries"]),
            gap_dates=tuple(iso(d) for d in doc["gap_dates"]),
            detector=doc["detector"],
            metrics={ixp: {cc: {iso(day): tuple(vals) for day, vals in per_cc.items()}
                           for cc, per_cc in per.items()}
                     for ixp, per in doc["metrics"].items()},
            unreachable={ixp: {cc: tuple(v) for cc, v in per.items()}
                         for ixp, per in doc["unreachable"].items()},
            new_origins={ixp: {cc: tuple(v) for cc, v in per.items()}
                         for ixp, per in doc["new_origins"].items()},
            offline={ixp: {cc: {int(asn): days for asn, days in per_cc.items()}
                           for cc, per_cc in per.items()}
                     for ixp, per in doc["offline_days"].items()},
            outages={ixp: {cc: {metric: tuple((iso(a), iso(b)) for a, b in spans)
                                for metric, spans in per_cc.items()}
                           for cc, per_cc in per.items()}
                     for ixp, per in doc["outages"].items()},
        )


class ScenarioError(ValueError):
    pass


def _validate(spec: ScenarioSpec) -> None:
    if not spec.ixps:
        raise ScenarioError("scenario needs at least one IXP")
    if not spec.countries:
        raise ScenarioError("scenario needs at least one country")
    if spec.baseline >= spec.final:
        raise ScenarioError("baseline date must precede the final date")
    for day in (spec.baseline, spec.final):
        if day not in spec.window:
            raise ScenarioError(f"{day} lies outside the scenario window")
        if day in spec.gap_dates:
            raise ScenarioError(f"{day} cannot be a gap date")
    if len(spec.snapshot_days()) < spec.detector["trailing_window"] + 1:
        raise ScenarioError("window too short for the dip detector")
    for cc, cspec in spec.countries.items():
        lo, hi = cspec.prefixes_per_origin
        if not 1 <= lo <= hi:
            raise ScenarioError(f"{cc}: bad prefixes_per_origin range {cspec.prefixes_per_origin}")
        for ixp in spec.ixps:
            if cspec.neighbor_count > cspec.origins_at(ixp):
                raise ScenarioError(f"{cc}: more neighbors than origins at {ixp}")
    for i, d in enumerate(spec.disruptions):
        where = f"disruption #{i} ({d.kind})"
        if d.kind not in DISRUPTION_KINDS:
            raise ScenarioError(f"{where}: unknown kind")
        if d.ixp not in spec.ixps or d.country not in spec.countries:
            raise ScenarioError(f"{where}: unknown ixp or country")
        if d.start not in spec.window:
            raise ScenarioError(f"{where}: start outside window")
        if d.kind in ("origin_removal", "neighbor_disconnect", "prefix_shrink"):
            if d.end is None or d.end < d.start or d.end not in spec.window:
                raise ScenarioError(f"{where}: needs an end date inside the window")
        if d.kind == "prefix_shrink":
            if d.magnitude is None or not 0 < d.magnitude <= 1:
                raise ScenarioError(f"{where}: magnitude must be in (0, 1]")
        elif d.kind == "join":
            # Joining ASNs are minted from the country's reserve block.
            if d.asns is not None or d.count is None or d.count < 1:
                raise ScenarioError(f"{where}: joins take a positive count, not explicit asns")
        elif d.asns is None and (d.count is None or d.count < 1):
            raise ScenarioError(f"{where}: needs a positive count or explicit asns")
        if d.kind == "neighbor_disconnect" and spec.countries[d.country].neighbor_count < 1:
            raise ScenarioError(f"{where}: country has no neighbors to disconnect")


@dataclass(frozen=True)
class _Route:
    country: str
    origin: int
    prefix: str
    path: tuple[int, ...]
    path_text: str
    mult: int
    prefix_index: int
    prefix_total: int
    join_date: dt.date | None = None


def _country_blocks(spec: ScenarioSpec) -> dict[str, tuple[int, int, int]]:
    """country -> (block start, regular size, reserve size for joins)."""
    blocks = {}
    next_start = _COUNTRY_BLOCK_BASE
    for cc in sorted(spec.countries):
        regular = spec.countries[cc].max_origins()
        reserve = sum(d.count for d in spec.disruptions if d.kind == "join" and d.country == cc)
        blocks[cc] = (next_start, regular, reserve)
        next_start += ((regular + reserve) // 1000 + 1) * 1000
    return blocks


def _v4_prefix(ixp_index: int, counter: int) -> str:
    if counter >= 1 << 16:
        raise ScenarioError("too many prefixes for one IXP")
    octet1 = 11 + ixp_index
    return f"{octet1}.{counter >> 8}.{counter & 0xFF}.0/24"


def _v6_prefix(ixp_index: int, counter: int) -> str:
    if counter >= 1 << 16:
        raise ScenarioError("too many prefixes for one IXP")
    return f"2001:db8:{ixp_index:x}:{counter:x}::/64"


def _build_origin_routes(
    rng: random.Random,
    country: str,
    origin: int,
    origin_index: int,
    neighbors: list[int],
    foreign: list[int],
    transit: tuple[int, ...],
    prefix_range: tuple[int, int],
    ixp_index: int,
    counter: list[int],
    join_date: dt.date | None = None,
) -> list[_Route]:
    prefixes = []
    for _ in range(rng.randint(*prefix_range)):
        prefixes.append(_v4_prefix(ixp_index, counter[0]))
        counter[0] += 1
    if origin_index % 7 == 3:
        prefixes.append(_v6_prefix(ixp_index, counter[0]))
        counter[0] += 1

    if origin in neighbors:
        home = origin
    elif not neighbors or rng.random() < 0.2:
        home = foreign[rng.randrange(len(foreign))]
    else:
        home = neighbors[rng.randrange(len(neighbors))]

    if home == origin:
        path = [origin]
    elif rng.random() < 0.35:
        path = [home, transit[rng.randrange(len(transit))], origin]
    else:
        path = [home, origin]
    if rng.random() < 0.15:
        path = [path[0]] + path  # announced with a prepended first hop

    path_tuple = tuple(path)
    path_text = " ".join(str(a) for a in path_tuple)
    total = len(prefixes)
    return [
        _Route(country, origin, prefix, path_tuple, path_text,
               2 if rng.random() < 0.08 else 1, j, total, join_date)
        for j, prefix in enumerate(prefixes)
    ]


def generate(spec: ScenarioSpec, out: str | Path) -> GroundTruth:
    """Write snapshot CSVs, a delegated file and ground truth under `out`.

    Output is byte-for-byte a pure function of the scenario.
    """
    _validate(spec)
    out_dir = Path(out)
    snapshots_dir = out_dir / "snapshots"
    snapshots_dir.mkdir(parents=True, exist_ok=True)

    blocks = _country_blocks(spec)
    registered: dict[int, str] = {}
    for cc, (start, regular, reserve) in blocks.items():
        for asn in range(start, start + regular + reserve):
            registered[asn] = cc
    for asn in _TRANSIT_REGISTERED:
        registered[asn] = "ZZ"
    transit_pool = _TRANSIT_REGISTERED + _TRANSIT_UNREGISTERED

    ixps = list(spec.ixps)
    snapshot_days = spec.snapshot_days()
    countries = sorted(spec.countries)

    # Resolve disruption targets up front so sampling never depends on
    # the day loop.
    origins_at: dict[tuple[str, str], list[int]] = {}
    neighbors_at: dict[tuple[str, str], list[int]] = {}
    for ixp in ixps:
        for cc in countries:
            start, _, _ = blocks[cc]
            cspec = spec.countries[cc]
            origins_at[(ixp, cc)] = [start + i for i in range(cspec.origins_at(ixp))]
            neighbors_at[(ixp, cc)] = origins_at[(ixp, cc)][: cspec.neighbor_count]

    join_pointer = {cc: 0 for cc in countries}
    removal_spans: dict[str, list[tuple[dt.date, dt.date, frozenset[int]]]] = {ixp: [] for ixp in ixps}
    disconnect_spans: dict[str, list[tuple[dt.date, dt.date, frozenset[int]]]] = {ixp: [] for ixp in ixps}
    shrink_spans: dict[str, list[tuple[dt.date, dt.date, str, float]]] = {ixp: [] for ixp in ixps}
    joins: dict[tuple[str, str], list[tuple[int, dt.date]]] = {}

    for i, d in enumerate(spec.disruptions):
        rng = random.Random(f"disrupt:{spec.seed}:{i}")
        if d.kind == "prefix_shrink":
            shrink_spans[d.ixp].append((d.start, d.end, d.country, d.magnitude))
            continue
        if d.kind == "join":
            start, regular, _ = blocks[d.country]
            targets = [start + regular + join_pointer[d.country] + j for j in range(d.count)]
            join_pointer[d.country] += d.count
            joins.setdefault((d.ixp, d.country), []).extend((asn, d.start) for asn in targets)
            continue
        pool = neighbors_at[(d.ixp, d.country)] if d.kind == "neighbor_disconnect" else origins_at[(d.ixp, d.country)]
        if d.asns:
            bad = set(d.asns) - set(pool)
            if bad:
                raise ScenarioError(f"disruption #{i}: asns {sorted(bad)} not in the {d.country} pool at {d.ixp}")
            targets = frozenset(d.asns)
        else:
            if d.count > len(pool):
                raise ScenarioError(f"disruption #{i}: count {d.count} exceeds pool of {len(pool)}")
            targets = frozenset(rng.sample(pool, d.count))
        end = spec.window.end if d.kind == "permanent_loss" else d.end
        span = (d.start, end, targets)
        if d.kind == "neighbor_disconnect":
            disconnect_spans[d.ixp].append(span)
        else:
            removal_spans[d.ixp].append(span)

    # Build the static route table per IXP.
    routes_by_ixp: dict[str, list[_Route]] = {}
    for ixp_index, ixp in enumerate(ixps):
        counter = [0]
        foreign = [_FOREIGN_NEIGHBOR_BASE + 10 * ixp_index + k for k in range(3)]
        routes: list[_Route] = []
        for cc in countries:
            cspec = spec.countries[cc]
            rng = random.Random(f"world:{spec.seed}:{ixp}:{cc}")
            neighbors = neighbors_at[(ixp, cc)]
            for idx, origin in enumerate(origins_at[(ixp, cc)]):
                routes.extend(_build_origin_routes(
                    rng, cc, origin, idx, neighbors, foreign, transit_pool,
                    cspec.prefixes_per_origin, ixp_index, counter))
            for idx, (origin, join_date) in enumerate(joins.get((ixp, cc), [])):
                jrng = random.Random(f"join:{spec.seed}:{ixp}:{cc}:{origin}")
                routes.extend(_build_origin_routes(
                    jrng, cc, origin, idx, neighbors, foreign, transit_pool,
                    cspec.prefixes_per_origin, ixp_index, counter, join_date))
        routes_by_ixp[ixp] = routes

    # Walk the calendar emitting snapshots and recording outcomes.
    gt_metrics: dict[str, dict[str, dict[dt.date, tuple[int, int, int, int]]]] = {}
    presence: dict[str, dict[int, set[dt.date]]] = {ixp: {} for ixp in ixps}

    for ixp in ixps:
        ixp_snap_dir = snapshots_dir / ixp
        ixp_snap_dir.mkdir(parents=True, exist_ok=True)
        gt_metrics[ixp] = {cc: {} for cc in countries}
        removal = removal_spans[ixp]
        disconnect = disconnect_spans[ixp]
        shrink = shrink_spans[ixp]
        for day in snapshot_days:
            removed: set[int] = set()
            for a, b, targets in removal:
                if a <= day <= b:
                    removed.update(targets)
            gone_neighbors: set[int] = set()
            for a, b, targets in disconnect:
                if a <= day <= b:
                    gone_neighbors.update(targets)
            shrink_today: dict[str, float] = {}
            for a, b, cc, mag in shrink:
                if a <= day <= b:
                    shrink_today[cc] = max(mag, shrink_today.get(cc, 0.0))

            rows: list[str] = []
            first_hops: set[int] = set()
            ann = {cc: 0 for cc in countries}
            day_origins: dict[str, set[int]] = {cc: set() for cc in countries}
            day_prefixes: dict[str, set[str]] = {cc: set() for cc in countries}
            for route in routes_by_ixp[ixp]:
                if route.join_date is not None and day < route.join_date:
                    continue
                if route.origin in removed:
                    continue
                if route.path[0] in gone_neighbors:
                    continue
                mag = shrink_today.get(route.country)
                if mag is not None and route.prefix_index >= math.floor(route.prefix_total * (1 - mag)):
                    continue
                line = f"{route.prefix},{route.path_text}"
                for _ in range(route.mult):
                    rows.append(line)
                cc = route.country
                ann[cc] += route.mult
                day_origins[cc].add(route.origin)
                day_prefixes[cc].add(route.prefix)
                first_hops.add(route.path[0])
                presence[ixp].setdefault(route.origin, set()).add(day)

            for cc in countries:
                neigh = sum(1 for hop in first_hops if registered.get(hop) == cc)
                gt_metrics[ixp][cc][day] = (ann[cc], len(day_origins[cc]), len(day_prefixes[cc]), neigh)

            random.Random(f"rows:{spec.seed}:{ixp}:{day.isoformat()}").shuffle(rows)
            path = ixp_snap_dir / f"{day.isoformat()}.csv"
            path.write_text("prefix,as_path\n" + "".join(r + "\n" for r in rows), encoding="utf-8")

    # Reachability, presence and outage expectations.
    unreachable: dict[str, dict[str, tuple[int, ...]]] = {}
    new_origins: dict[str, dict[str, tuple[int, ...]]] = {}
    offline: dict[str, dict[str, dict[int, int]]] = {}
    outages: dict[str, dict[str, dict[str, tuple[tuple[dt.date, dt.date], ...]]]] = {}
    confirm_days = [
        day for day in (
            spec.final - dt.timedelta(days=back) for back in range(1, spec.confirmation_window + 1)
        ) if day in spec.window and day not in spec.gap_dates
    ]
    n_days = len(snapshot_days)

    for ixp in ixps:
        unreachable[ixp] = {}
        new_origins[ixp] = {}
        offline[ixp] = {}
        outages[ixp] = {}
        seen = presence[ixp]
        for cc in countries:
            ever = {asn for asn in seen if registered.get(asn) == cc}
            base = {asn for asn in ever if spec.baseline in seen[asn]}
            final_present = {asn for asn in ever if spec.final in seen[asn]}
            lost = {
                asn for asn in base
                if spec.final not in seen[asn] and all(day not in seen[asn] for day in confirm_days)
            }
            unreachable[ixp][cc] = tuple(sorted(lost))
            new_origins[ixp][cc] = tuple(sorted(final_present - base))
            offline[ixp][cc] = {asn: n_days - len(seen[asn]) for asn in sorted(ever)}
            per_metric = {}
            day_list = sorted(gt_metrics[ixp][cc])
            for mi, metric in enumerate(METRIC_NAMES):
                values = [gt_metrics[ixp][cc][day][mi] for day in day_list]
                per_metric[metric] = tuple(_expected_dip_spans(
                    day_list, values,
                    spec.detector["trailing_window"], spec.detector["threshold"],
                    spec.detector["min_reference"]))
            outages[ixp][cc] = per_metric

    _write_delegated(out_dir / "delegated.txt", spec, blocks)

    gt = GroundTruth(
        seed=spec.seed,
        window=spec.window,
        baseline_date=spec.baseline,
        final_date=spec.final,
        confirmation_window=spec.confirmation_window,
        ixps=tuple(ixps),
        countries=tuple(countries),
        gap_dates=tuple(sorted(spec.gap_dates)),
        detector=dict(spec.detector),
        metrics=gt_metrics,
        unreachable=unreachable,
        new_origins=new_origins,
        offline=offline,
        outages=outages,
    )
    gt.save(out_dir / "ground_truth.json")
    return gt


def _expected_dip_spans(dates, values, trailing, threshold, min_reference):
    """The documented dip rule applied plainly to one value list."""
    spans = []
    current = None
    for i, value in enumerate(values):
        dip = False
        if i > 0:
            reference = statistics.median(values[max(0, i - trailing):i])
            dip = reference >= min_reference and value < (1 - threshold) * reference
        if dip:
            current = [dates[i], dates[i]] if current is None else [current[0], dates[i]]
        elif current is not None:
            spans.append((current[0], current[1]))
            current = None
    if current is not None:
        spans.append((current[0], current[1]))
    return spans


def _write_delegated(path: Path, spec: ScenarioSpec, blocks) -> None:
    """One combined delegated-statistics file covering every scenario ASN."""
    rows = []
    for idx, cc in enumerate(sorted(blocks)):
        start, regular, reserve = blocks[cc]
        registry = REGISTRIES[idx % len(REGISTRIES)]
        rows.append(f"{registry}|{cc}|asn|{start}|{regular + reserve}|20200101|assigned")
    rows.append(f"arin|ZZ|asn|{_TRANSIT_REGISTERED[0]}|{len(_TRANSIT_REGISTERED)}|20200101|allocated")
    lines = [
        "2|ripencc|20220219|{}|20200101|20220218|+0000".format(len(rows)),
        "# synthetic delegated statistics",
        "ripencc|*|asn|*|{}|summary".format(len(rows)),
    ]
    path.write_text("\n".join(lines + rows) + "\n", encoding="utf-8")


def verify(gt: GroundTruth, result: "AnalysisResult") -> list[str]:
    """Compare pipeline outputs against ground truth; [] means a clean run."""
    problems: list[str] = []
    window = gt.window
    for ixp in gt.ixps:
        for cc in gt.countries:
            key = (ixp, cc)
            where = f"{ixp}/{cc}"

            series = result.series.get(key)
            if series is None:
                problems.append(f"{where}: metric series missing from pipeline output")
                continue
            expected = gt.metrics[ixp][cc]
            expected_dates = sorted(expected)
            got_dates = list(series.dates())
            if got_dates != expected_dates:
                problems.append(
                    f"{where}: series covers {len(got_dates)} days, expected {len(expected_dates)}")
            for point in series.points:
                want = expected.get(point.date)
                if want is None:
                    continue
                got = (point.announcements, point.distinct_origins,
                       point.distinct_prefixes, point.distinct_neighbors)
                if got != want:
                    problems.append(f"{where} {point.date}: expected {want}, got {got}")

            report = result.reports.get(key)
            if report is None:
                problems.append(f"{where}: reachability report missing")
            else:
                if report.lost_asns != gt.unreachable[ixp][cc]:
                    problems.append(f"{where}: lost origins differ "
                                    f"(expected {len(gt.unreachable[ixp][cc])}, got {len(report.lost_asns)})")
                if report.new_asns != gt.new_origins[ixp][cc]:
                    problems.append(f"{where}: new origins differ")

            pres = result.presence.get(key)
            expected_offline = gt.offline[ixp][cc]
            if pres is None:
                problems.append(f"{where}: presence map missing")
            elif sorted(pres) != sorted(expected_offline):
                problems.append(f"{where}: presence covers different origins")
            else:
                for asn, days in expected_offline.items():
                    got_days = _offline_days(pres, asn, window)
                    if got_days != days:
                        problems.append(f"{where} AS{asn}: expected {days} offline days, got {got_days}")

            events = result.events.get(key, [])
            for metric in METRIC_NAMES:
                got_spans = tuple((e.start, e.end) for e in events if e.metric == metric)
                want_spans = gt.outages[ixp][cc].get(metric, ())
                if got_spans != want_spans:
                    problems.append(
                        f"{where} {metric}: outage spans {_fmt_spans(got_spans)} "
                        f"!= expected {_fmt_spans(want_spans)}")
    return problems


def _fmt_spans(spans: Iterable[tuple[dt.date, dt.date]]) -> str:
    return "[" + ", ".join(f"{a}..{b}" for a, b in spans) + "]"


def load_scenario(path: str | Path) -> ScenarioSpec:
    """Read a scenario description from its JSON file."""
    return scenario_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def scenario_from_dict(doc: dict) -> ScenarioSpec:
    iso = dt.date.fromisoformat
    try:
        window = DateRange(iso(doc["window"]["start"]), iso(doc["window"]["end"]))
        countries = {}
        for cc, c in doc["countries"].items():
            count = c["origin_count"]
            ppo = c.get("prefixes_per_origin", [1, 3])
            if isinstance(ppo, int):
                ppo = [ppo, ppo]
            countries[cc] = CountrySpec(
                origin_count=count if isinstance(count, int) else dict(count),
                prefixes_per_origin=(int(ppo[0]), int(ppo[1])),
                neighbor_count=int(c.get("neighbor_count", 1)),
            )
        disruptions = []
        for d in doc.get("disruptions", []):
            disruptions.append(Disruption(
                kind=d["kind"],
                ixp=d["ixp"],
                country=d["country"],
                start=iso(d["start"]),
                end=iso(d["end"]) if d.get("end") else None,
                count=d.get("count"),
                asns=tuple(d["asns"]) if d.get("asns") else None,
                magnitude=d.get("magnitude"),
            ))
        detector = dict(DEFAULT_DETECTOR)
        detector.update(doc.get("detector", {}))
        spec = ScenarioSpec(
            seed=int(doc["seed"]),
            window=window,
            ixps=tuple(doc["ixps"]),
            countries=countries,
            disruptions=tuple(disruptions),
            gap_dates=tuple(iso(d) for d in doc.get("gap_dates", [])),
            baseline_date=iso(doc["baseline_date"]) if doc.get("baseline_date") else None,
            final_date=iso(doc["final_date"]) if doc.get("final_date") else None,
            confirmation_window=int(doc.get("confirmation_window", 3)),
            detector=detector,
        )
    except (KeyError, TypeError) as exc:
        raise ScenarioError(f"bad scenario document: {exc}") from exc
    _validate(spec)
    return spec


def random_scenario(
    seed: int,
    *,
    ixps: tuple[str, ...] = ("amsix", "linx", "six", "auix", "spoixbr"),
    days: int = 70,
    start: dt.date = dt.date(2022, 2, 19),
    countries: tuple[str, ...] = ("UA", "RU", "DE"),
    min_origins: int = 18,
    max_origins: int = 45,
) -> ScenarioSpec:
    """A randomized but valid scenario, for oracle-equivalence testing."""
    rng = random.Random(f"scenario:{seed}")
    window = DateRange(start, start + dt.timedelta(days=days - 1))
    country_specs = {}
    for cc in countries:
        country_specs[cc] = CountrySpec(
            origin_count=rng.randint(min_origins, max_origins),
            prefixes_per_origin=(1, rng.randint(2, 4)),
            neighbor_count=rng.randint(0, 3),
        )

    interior = [start + dt.timedelta(days=off) for off in range(3, days - 5)]
    gap_dates = tuple(sorted(rng.sample(interior, rng.randint(0, 2))))

    disruptions = []
    for ixp in ixps:
        for cc in countries:
            cspec = country_specs[cc]
            for _ in range(rng.randint(0, 2)):
                kinds = ["origin_removal", "permanent_loss", "prefix_shrink", "join"]
                if cspec.neighbor_count >= 1:
                    kinds.append("neighbor_disconnect")
                kind = rng.choice(kinds)
                day0 = start + dt.timedelta(days=rng.randint(4, days - 10))
                if kind == "origin_removal":
                    disruptions.append(Disruption(
                        kind, ixp, cc, day0, day0 + dt.timedelta(days=rng.randint(0, 5)),
                        count=rng.randint(1, max(1, cspec.max_origins() // 5))))
                elif kind == "permanent_loss":
                    disruptions.append(Disruption(
                        kind, ixp, cc, day0, count=rng.randint(1, max(1, cspec.max_origins() // 6))))
                elif kind == "prefix_shrink":
                    disruptions.append(Disruption(
                        kind, ixp, cc, day0, day0 + dt.timedelta(days=rng.randint(0, 3)),
                        magnitude=round(rng.uniform(0.2, 0.5), 2)))
                elif kind == "join":
                    disruptions.append(Disruption(kind, ixp, cc, day0, count=rng.randint(1, 2)))
                else:
                    disruptions.append(Disruption(
                        kind, ixp, cc, day0, day0 + dt.timedelta(days=rng.randint(0, 2)), count=1))

    return ScenarioSpec(
        seed=seed,
        window=window,
        ixps=tuple(ixps),
        countries=country_specs,
        disruptions=tuple(disruptions),
        gap_dates=gap_dates,
    )
