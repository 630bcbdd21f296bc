import datetime as dt
import io
import random

import pytest

from ixpreach import asndb
from ixpreach.asndb import AsnRecord, REGISTRIES

# Hand-computed totals for the five fixture files: 4 + 6 + 4 + 2 + 3 raw
# records, AS 65000 appears in three registries, one arin row is malformed.
FIXTURE_RECORDS_PER_FILE = {"ripencc": 4, "arin": 6, "apnic": 4, "afrinic": 2, "lacnic": 3}
FIXTURE_TOTAL_RAW = 19
FIXTURE_TOTAL_MERGED = 17
FIXTURE_CONFLICTS = 2
FIXTURE_SKIPPED = 1


def parse_text(text, registry="ripencc"):
    return asndb.parse_delegated(io.StringIO(text), registry)


class TestParseDelegated:
    def test_single_asn_row(self):
        result = parse_text("ripencc|UA|asn|25133|1|20020701|allocated\n")
        assert list(result) == [
            AsnRecord(25133, "UA", "ripencc", "allocated", dt.date(2002, 7, 1))
        ]
        assert result.skipped == ()

    def test_range_row_expands_to_value_many_records(self):
        result = parse_text("arin|US|asn|100|5|19950101|assigned\n", "arin")
        assert [r.asn for r in result] == [100, 101, 102, 103, 104]
        assert all(r.country == "US" for r in result)

    def test_non_asn_rows_are_skipped_silently(self):
        result = parse_text("apnic|AU|ipv4|1.0.0.0|256|20110811|allocated\n", "apnic")
        assert list(result) == []
        assert result.skipped == ()

    def test_version_summary_comment_and_blank_lines(self):
        text = (
            "2|ripencc|20220219|2|19830705|20220218|+0100\n"
            "ripencc|*|asn|*|1|summary\n"
            "# a comment\n"
            "\n"
            "ripencc|UA|asn|25133|1|20020701|allocated\n"
        )
        result = parse_text(text)
        assert len(result) == 1
        assert result.skipped == ()

    def test_reserved_and_available_rows_are_filtered(self):
        text = (
            "arin||asn|399260|2||reserved\n"
            "arin|US|asn|400000|1|20200101|available\n"
        )
        result = parse_text(text, "arin")
        assert list(result) == []
        assert result.skipped == ()

    @pytest.mark.parametrize("row,reason_part", [
        ("arin|US|asn|notanumber|1|20010101|assigned", "non-numeric"),
        ("arin|US|asn|100|0|20010101|assigned", "out of bounds"),
        ("arin|US|asn|4294967295|2|20010101|assigned", "out of bounds"),
        ("arin|usa|asn|100|1|20010101|assigned", "country"),
        ("arin|US|asn|100|1|2001-01-01|assigned", "date"),
        ("whois|US|asn|100|1|20010101|assigned", "registry"),
        ("too|few|fields", "7 fields"),
    ])
    def test_malformed_rows_recorded_with_line_number(self, row, reason_part):
        result = parse_text(row + "\n", "arin")
        assert list(result) == []
        assert len(result.skipped) == 1
        lineno, reason = result.skipped[0]
        assert lineno == 1
        assert reason_part in reason

    def test_record_count_matches_sum_of_range_values(self):
        rng = random.Random(20220219)
        rows, expected = [], 0
        for i in range(50):
            value = rng.randint(1, 9)
            rows.append(f"apnic|AU|asn|{1000 + 10 * i}|{value}|20200101|allocated")
            expected += value
        result = parse_text("\n".join(rows), "apnic")
        assert len(result) == expected

    def test_combined_file_takes_registry_from_each_row(self):
        text = (
            "ripencc|UA|asn|25133|1|20020701|allocated\n"
            "arin|US|asn|100|1|19950101|assigned\n"
        )
        result = parse_text(text, "ripencc")
        assert [r.registry for r in result] == ["ripencc", "arin"]


class TestMerge:
    def test_latest_allocation_date_wins(self):
        a = AsnRecord(65000, "UA", "ripencc", "allocated", dt.date(2001, 1, 1))
        b = AsnRecord(65000, "RU", "ripencc", "allocated", dt.date(2010, 1, 1))
        db = asndb.merge([[a], [b]])
        assert db.lookup(65000) == "RU"
        assert db.conflicts == 1

    def test_missing_date_loses_to_any_date(self):
        a = AsnRecord(65000, "UA", "ripencc", "allocated", None)
        b = AsnRecord(65000, "RU", "arin", "allocated", dt.date(1995, 1, 1))
        assert asndb.merge([[a, b]]).lookup(65000) == "RU"

    def test_date_tie_breaks_by_registry_ascending(self):
        same_day = dt.date(2010, 1, 1)
        a = AsnRecord(65000, "UA", "ripencc", "allocated", same_day)
        b = AsnRecord(65000, "RU", "apnic", "allocated", same_day)
        assert asndb.merge([[a], [b]]).lookup(65000) == "RU"  # apnic < ripencc

    def test_single_input_is_identity_with_zero_conflicts(self):
        records = [AsnRecord(10 + i, "UA", "ripencc") for i in range(5)]
        db = asndb.merge([records])
        assert len(db) == 5
        assert db.conflicts == 0

    def test_disjoint_inputs_union(self):
        left = [AsnRecord(i, "UA", "ripencc") for i in (1, 2, 3)]
        right = [AsnRecord(i, "RU", "ripencc") for i in (4, 5, 6, 7)]
        assert len(asndb.merge([left, right])) == 7

    def test_merge_is_idempotent(self):
        records = [
            AsnRecord(65000, "UA", "ripencc", "allocated", dt.date(2001, 1, 1)),
            AsnRecord(65000, "RU", "arin", "allocated", dt.date(2010, 1, 1)),
            AsnRecord(7, "UA", "ripencc"),
        ]
        once = asndb.merge([records])
        twice = asndb.merge([once])
        assert once == twice

    def test_merge_is_order_independent(self):
        rng = random.Random(7)
        lists = []
        for i in range(4):
            lists.append([
                AsnRecord(rng.randint(1, 40), "UA" if rng.random() < 0.5 else "RU",
                          REGISTRIES[rng.randrange(5)], "allocated",
                          dt.date(2000 + rng.randint(0, 20), 1, 1))
                for _ in range(15)
            ])
        reference = asndb.merge(lists)
        for _ in range(10):
            shuffled = lists[:]
            rng.shuffle(shuffled)
            assert asndb.merge(shuffled) == reference

    def test_lookup_never_invents_a_country(self):
        db = asndb.merge([[AsnRecord(25133, "UA", "ripencc")]])
        assert db.lookup(25133) == "UA"
        assert db.lookup(12389) is None


class TestFixtureFiles:
    def test_per_file_record_counts(self, delegated_dir):
        for registry, expected in FIXTURE_RECORDS_PER_FILE.items():
            with open(delegated_dir / f"{registry}.txt") as handle:
                result = asndb.parse_delegated(handle, registry)
            assert len(result) == expected, registry

    def test_merged_totals_and_conflicts(self, delegated_dir):
        items = [(r, delegated_dir / f"{r}.txt") for r in sorted(FIXTURE_RECORDS_PER_FILE)]
        db, skipped = asndb.build_from_files(items)
        assert len(db) == FIXTURE_TOTAL_MERGED
        assert db.conflicts == FIXTURE_CONFLICTS
        assert len(skipped) == FIXTURE_SKIPPED
        assert FIXTURE_TOTAL_RAW - FIXTURE_CONFLICTS == FIXTURE_TOTAL_MERGED

    def test_duplicate_as65000_resolves_to_latest_date(self, delegated_dir):
        items = [(r, delegated_dir / f"{r}.txt") for r in sorted(FIXTURE_RECORDS_PER_FILE)]
        db, _ = asndb.build_from_files(items)
        assert db.lookup(65000) == "AR"  # lacnic row, 2010, beats arin 2001 and apnic 1998
        assert db.lookup(25133) == "UA"
        assert db.lookup(12389) == "RU"


class TestPersistence:
    def test_save_load_round_trip(self, tmp_path):
        records = [
            AsnRecord(25133, "UA", "ripencc", "allocated", dt.date(2002, 7, 1)),
            AsnRecord(12389, "RU", "ripencc", "allocated", None),
        ]
        db = asndb.merge([records], sources=[("ripencc", "sha256:feed")])
        path = tmp_path / "asndb.txt"
        asndb.save(db, path)
        loaded = asndb.load(path)
        assert loaded.lookup(25133) == "UA"
        assert loaded.lookup(12389) == "RU"
        assert loaded.records[25133].date == dt.date(2002, 7, 1)
        assert loaded.records[12389].date is None
        assert loaded.source_files == (("ripencc", "sha256:feed"),)
        assert loaded.conflicts == db.conflicts

    def test_persisted_bytes_independent_of_merge_order(self, tmp_path, delegated_dir):
        items = [(r, delegated_dir / f"{r}.txt") for r in sorted(FIXTURE_RECORDS_PER_FILE)]
        rng = random.Random(99)
        blobs = set()
        for i in range(10):
            shuffled = items[:]
            rng.shuffle(shuffled)
            db, _ = asndb.build_from_files(shuffled)
            path = tmp_path / f"db{i}.txt"
            asndb.save(db, path)
            blobs.add(path.read_bytes())
        assert len(blobs) == 1
