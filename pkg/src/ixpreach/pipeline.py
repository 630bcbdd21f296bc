"""End-to-end analysis: snapshots + ASN database -> reports and plot data.

This is the engine behind the `analyze` subcommand; it is also used
directly when checking pipeline output against synthetic ground truth.
All outputs are deterministic: rerunning on unchanged inputs produces
byte-identical files.
"""

from __future__ import annotations

import datetime as dt
import io
from dataclasses import dataclass, field
from pathlib import Path

from . import asndb, metrics, outage, reachability, rtingest

DEFAULT_IXPS = ("amsix", "linx", "six", "auix", "spoixbr")
DEFAULT_COUNTRIES = ("UA", "RU")
DEFAULT_BASELINE = dt.date(2022, 2, 19)
DEFAULT_FINAL = dt.date(2022, 4, 29)


@dataclass
class RunConfig:
    """Everything one analysis run needs; defaults encode the 2022 study."""

    asndb_path: Path
    snapshot_root: Path
    output_dir: Path
    ixps: tuple[str, ...] = DEFAULT_IXPS
    countries: tuple[str, ...] = DEFAULT_COUNTRIES
    baseline_date: dt.date = DEFAULT_BASELINE
    final_date: dt.date = DEFAULT_FINAL
    confirmation_window: int = 3
    trailing_window: int = outage.DEFAULT_TRAILING_WINDOW
    threshold: float = outage.DEFAULT_THRESHOLD
    min_reference: float = outage.DEFAULT_MIN_REFERENCE
    catalog_path: Path | None = None
    annotation_slack: int = 0
    schema_path: Path | None = None

    def __post_init__(self) -> None:
        if not self.ixps:
            raise ValueError("at least one IXP is required")
        if self.baseline_date >= self.final_date:
            raise ValueError("baseline date must precede the final date")
        if self.confirmation_window < 0:
            raise ValueError("confirmation window must be >= 0")


@dataclass
class AnalysisResult:
    config: RunConfig
    series: dict[tuple[str, str], metrics.MetricSeries] = field(default_factory=dict)
    reports: dict[tuple[str, str], reachability.ReachabilityReport] = field(default_factory=dict)
    presence: dict[tuple[str, str], metrics.PresenceMap] = field(default_factory=dict)
    events: dict[tuple[str, str], list[outage.OutageEvent]] = field(default_factory=dict)
    averages: dict[str, float] = field(default_factory=dict)


def run_analysis(config: RunConfig, db: asndb.AsnDb | None = None) -> AnalysisResult:
    """Run the whole pipeline for every (IXP, country) pair in the config."""
    if db is None:
        db = asndb.load(config.asndb_path)
    schema = (rtingest.SnapshotSchema.from_file(config.schema_path)
              if config.schema_path else rtingest.DEFAULT_SCHEMA)
    catalog = None
    if config.catalog_path is not None:
        with open(config.catalog_path, encoding="utf-8") as handle:
            catalog = outage.parse_catalog(handle)

    window = rtingest.DateRange(config.baseline_date, config.final_date)
    result = AnalysisResult(config=config)
    for ixp in config.ixps:
        series = rtingest.load_series(config.snapshot_root, ixp, window, schema)
        if not series.snapshots:
            raise ValueError(f"no snapshots for IXP {ixp!r} inside {window.start}..{window.end}")
        for country in config.countries:
            key = (ixp, country)
            mseries = metrics.build_series(series, db, country)
            result.series[key] = mseries
            result.presence[key] = metrics.origin_presence(series, db, country)
            result.reports[key] = reachability.diff_reachability(
                series, db, country,
                config.baseline_date, config.final_date, config.confirmation_window)
            events: list[outage.OutageEvent] = []
            for metric in metrics.METRIC_NAMES:
                events.extend(outage.detect_dips(
                    mseries, metric,
                    trailing_window=config.trailing_window,
                    threshold=config.threshold,
                    min_reference=config.min_reference))
            if catalog is not None:
                events = outage.annotate(events, catalog, config.annotation_slack)
            result.events[key] = events

    for country in config.countries:
        pcts = [result.reports[(ixp, country)].pct_lost for ixp in config.ixps]
        result.averages[country] = reachability.average_pct(pcts)
    return result


def write_outputs(result: AnalysisResult) -> list[Path]:
    """Write metrics CSVs, reachability reports, outage CSVs and a summary.

    Output bytes are a function of the analysis inputs only; no paths or
    timestamps leak into the files.
    """
    config = result.config
    out = Path(config.output_dir)
    written: list[Path] = []

    metrics_dir = out / "metrics"
    metrics_dir.mkdir(parents=True, exist_ok=True)
    for (ixp, country), series in sorted(result.series.items()):
        path = metrics_dir / f"{ixp}_{country}.csv"
        buf = io.StringIO()
        metrics.write_metrics_csv(buf, [series])
        path.write_text(buf.getvalue(), encoding="utf-8")
        written.append(path)

    reach_dir = out / "reachability"
    reach_dir.mkdir(parents=True, exist_ok=True)
    for country in sorted(set(c for _, c in result.reports)):
        reports = [result.reports[(ixp, country)] for ixp in config.ixps]
        table_path = reach_dir / f"{country}_table.txt"
        table_path.write_text(reachability.format_report_table(reports), encoding="utf-8")
        written.append(table_path)
        records_path = reach_dir / f"{country}_records.txt"
        records_path.write_text(
            "".join(reachability.format_report_record(rep) + "\n" for rep in reports),
            encoding="utf-8")
        written.append(records_path)

    outage_dir = out / "outages"
    outage_dir.mkdir(parents=True, exist_ok=True)
    for (ixp, country), events in sorted(result.events.items()):
        path = outage_dir / f"{ixp}_{country}.csv"
        buf = io.StringIO()
        outage.write_events_csv(buf, events)
        path.write_text(buf.getvalue(), encoding="utf-8")
        written.append(path)

    summary_path = out / "summary.txt"
    lines = [
        "analysis summary",
        f"baseline {config.baseline_date} final {config.final_date} "
        f"confirmation {config.confirmation_window}d",
        f"ixps: {', '.join(config.ixps)}",
        f"detector: trailing_window={config.trailing_window} "
        f"threshold={config.threshold} min_reference={config.min_reference}",
    ]
    for country in sorted(result.averages):
        lines.append(f"{country}: average pct lost {result.averages[country]:.2f} "
                     f"over {len(config.ixps)} IXPs")
    summary_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    written.append(summary_path)
    return written
