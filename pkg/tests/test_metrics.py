import random

import pytest

from ixpreach import metrics
from ixpreach.metrics import build_series, compute_daily, origin_presence

from conftest import BASE, day, make_db, make_series, make_snapshot


def brute_counts(rows, countries, country):
    """Independent enumeration of the four counts from raw (prefix, path) rows."""
    ann = sum(1 for _, path in rows if countries.get(path[-1]) == country)
    origins = {path[-1] for _, path in rows if countries.get(path[-1]) == country}
    prefixes = {p for p, path in rows if countries.get(path[-1]) == country}
    neighbors = {path[0] for _, path in rows if countries.get(path[0]) == country}
    return ann, len(origins), len(prefixes), len(neighbors)


class TestComputeDaily:
    def test_three_row_hand_enumerated_example(self):
        # db: 20->UA, 21->UA, 10->DE, 11->UA; rows announce p1 twice, p2 once
        db = make_db({20: "UA", 21: "UA", 10: "DE", 11: "UA"})
        snap = make_snapshot([
            ("192.0.2.0/24", [10, 20]),
            ("192.0.2.0/24", [11, 20]),
            ("198.51.100.0/24", [10, 21]),
        ])
        result = compute_daily(snap, db, "UA")
        assert result.announcements == 3
        assert result.distinct_origins == 2
        assert result.distinct_prefixes == 2
        assert result.distinct_neighbors == 1  # only first hop 11 is UA

    def test_empty_snapshot_is_all_zero(self):
        db = make_db({20: "UA"})
        result = compute_daily(make_snapshot([]), db, "UA")
        assert (result.announcements, result.distinct_origins,
                result.distinct_prefixes, result.distinct_neighbors) == (0, 0, 0, 0)

    def test_no_in_country_origin(self):
        db = make_db({20: "UA"})
        snap = make_snapshot([("192.0.2.0/24", [10, 30])])
        result = compute_daily(snap, db, "UA")
        assert result.announcements == 0
        assert result.distinct_origins == 0
        assert result.distinct_prefixes == 0

    def test_row_order_does_not_matter(self):
        rng = random.Random(5)
        countries = {i: ("UA" if i % 3 else "RU") for i in range(1, 30)}
        db = make_db(countries)
        rows = [(f"10.{i}.0.0/16", [rng.randint(1, 29), rng.randint(1, 29)]) for i in range(40)]
        base = compute_daily(make_snapshot(rows), db, "UA")
        for _ in range(5):
            rng.shuffle(rows)
            assert compute_daily(make_snapshot(rows), db, "UA") == base

    def test_matches_brute_force_on_random_snapshots(self):
        rng = random.Random(11)
        for _ in range(50):
            countries = {i: rng.choice(["UA", "RU", "DE"]) for i in range(1, 25)}
            db = make_db(countries)
            rows = [
                (f"10.{rng.randint(0, 9)}.{rng.randint(0, 9)}.0/24",
                 [rng.randint(1, 30) for _ in range(rng.randint(1, 4))])
                for _ in range(rng.randint(0, 60))
            ]
            got = compute_daily(make_snapshot(rows), db, "UA")
            assert (got.announcements, got.distinct_origins,
                    got.distinct_prefixes, got.distinct_neighbors) == brute_counts(rows, countries, "UA")

    def test_country_totals_bounded_by_entry_count(self):
        rng = random.Random(13)
        countries = {i: rng.choice(["UA", "RU"]) for i in range(1, 20)}
        db = make_db(countries)
        rows = [(f"10.{i}.0.0/16", [rng.randint(1, 25), rng.randint(1, 25)]) for i in range(30)]
        snap = make_snapshot(rows)
        total = sum(compute_daily(snap, db, cc).announcements for cc in ("UA", "RU"))
        assert total <= len(rows)

    def test_zz_placeholder_is_not_a_country_filter(self):
        db = make_db({20: "ZZ"})
        with pytest.raises(ValueError):
            compute_daily(make_snapshot([]), db, "ZZ")


class TestBuildSeries:
    def test_point_count_and_gaps_preserved(self):
        db = make_db({20: "UA"})
        days = {day(i): [("192.0.2.0/24", [20])] for i in range(5)}
        series = make_series(days, gaps=[day(5), day(6)])
        mseries = build_series(series, db, "UA")
        assert len(mseries.points) == 5
        assert mseries.gaps == (day(5), day(6))

    def test_single_snapshot_series_equals_compute_daily(self):
        db = make_db({20: "UA"})
        snap = make_snapshot([("192.0.2.0/24", [20])])
        series = make_series({BASE: [("192.0.2.0/24", [20])]})
        assert build_series(series, db, "UA").points == (compute_daily(snap, db, "UA"),)

    def test_values_accessor_validates_metric_name(self):
        db = make_db({20: "UA"})
        series = build_series(make_series({BASE: []}), db, "UA")
        with pytest.raises(ValueError, match="unknown metric"):
            series.values("uptime")


class TestOriginPresence:
    def test_present_every_day(self):
        db = make_db({20: "UA"})
        days = {day(i): [("192.0.2.0/24", [20])] for i in range(70)}
        presence = origin_presence(make_series(days), db, "UA")
        assert len(presence[20]) == 70

    def test_present_only_on_baseline(self):
        db = make_db({20: "UA", 21: "UA"})
        days = {day(i): [("192.0.2.0/24", [21])] for i in range(1, 10)}
        days[BASE] = [("192.0.2.0/24", [21]), ("198.51.100.0/24", [20])]
        presence = origin_presence(make_series(days), db, "UA")
        assert presence[20] == frozenset({BASE})

    def test_presence_consistent_with_daily_origin_counts(self):
        rng = random.Random(3)
        countries = {i: "UA" for i in range(1, 15)}
        db = make_db(countries)
        days = {}
        for i in range(12):
            rows = [(f"10.{o}.0.0/16", [o]) for o in rng.sample(range(1, 15), rng.randint(0, 8))]
            days[day(i)] = rows
        series = make_series(days)
        presence = origin_presence(series, db, "UA")
        for snap in series.snapshots:
            for origin in presence:
                restricted = [(p, path) for p, path in
                              [(e.prefix, list(e.as_path)) for e in snap.entries]
                              if path[-1] == origin]
                present = snap.date in presence[origin]
                assert present == (len(restricted) > 0)

    def test_mapping_interface(self):
        db = make_db({20: "UA"})
        presence = origin_presence(make_series({BASE: [("192.0.2.0/24", [20])]}), db, "UA")
        assert 20 in presence
        assert len(presence) == 1
        assert list(presence) == [20]


class TestMetricsCsv:
    def test_round_trip(self, tmp_path):
        import io
        db = make_db({20: "UA", 30: "RU"})
        days = {day(i): [("192.0.2.0/24", [20]), ("198.51.100.0/24", [30])] for i in range(3)}
        series = [build_series(make_series(days), db, cc) for cc in ("UA", "RU")]
        buf = io.StringIO()
        metrics.write_metrics_csv(buf, series)
        buf.seek(0)
        rows = metrics.read_metrics_csv(buf)
        assert len(rows) == 6
        assert {r.country for r in rows} == {"UA", "RU"}
        assert all(r.announcements == 1 for r in rows)

    def test_reader_rejects_foreign_header(self):
        import io
        with pytest.raises(ValueError, match="not a metrics CSV"):
            metrics.read_metrics_csv(io.StringIO("a,b,c\n1,2,3\n"))
