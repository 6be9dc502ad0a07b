import io

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hfbikit.event_log import (ActivityLog, DuplicateRecordError, IncentiveConflictError,
                               LogFormatError, NonContiguousError, ParticipationRecord,
                               first_appearance, frequency_sequence, interval_sequence,
                               newcomer_counts, prefix, read_csv, users_reaching, write_csv)

from conftest import log_from_attendance

HEADER = "participant_id,activity_id,team_id,incentive\n"


def parse(text):
    return read_csv(io.StringIO(text))


def test_parse_three_rows():
    log = parse(HEADER + "0,0,,false\n1,0,,false\n0,1,,true\n")
    assert log.user_count == 2
    assert log.activity_count == 2
    assert log.incentive_set == {1}
    assert log.records == [
        ParticipationRecord(0, 0, None, False),
        ParticipationRecord(1, 0, None, False),
        ParticipationRecord(0, 1, None, True),
    ]


def test_parse_sorts_rows_and_keeps_teams(tmp_path):
    path = tmp_path / "log.csv"
    path.write_text(HEADER + "3,1,7,0\n1,0,2,1\n0,1,,0\n2,0,5,TRUE\n")
    log = read_csv(path)
    assert [(r.activity_id, r.participant_id) for r in log.records] == [(0, 1), (0, 2), (1, 0), (1, 3)]
    assert [r.team_id for r in log.records] == [2, 5, None, 7]


def test_duplicate_pair_rejected():
    with pytest.raises(DuplicateRecordError):
        parse(HEADER + "0,0,,0\n0,0,,0\n")


def test_non_contiguous_rejected():
    with pytest.raises(NonContiguousError):
        parse(HEADER + "0,0,,0\n0,2,,0\n")


def test_inconsistent_incentive_rejected():
    with pytest.raises(IncentiveConflictError):
        parse(HEADER + "0,0,,1\n1,0,,0\n")


@pytest.mark.parametrize("body,line", [
    ("0,0,,0\nx,1,,0\n", 3),
    ("0,0,,0\n1,1,,maybe\n", 3),
    ("0,0,0\n", 2),
    ("0,-1,,0\n", 2),
])
def test_malformed_row_reports_line(body, line):
    with pytest.raises(LogFormatError) as err:
        parse(HEADER + body)
    assert err.value.line == line


def test_empty_file_and_bad_header():
    with pytest.raises(LogFormatError):
        parse("")
    with pytest.raises(LogFormatError):
        parse("user,activity\n0,0\n")


def test_frequency_sequence(small_log):
    log = log_from_attendance({0: [0, 1, 2], 1: [2]})
    assert sorted(frequency_sequence(log, upto=2)) == [1, 3]
    assert list(frequency_sequence(log, upto=1)) == [2]
    with pytest.raises(IndexError):
        frequency_sequence(log, upto=3)


def test_interval_sequence():
    log = log_from_attendance({0: [1, 2, 3, 50, 51], 1: [0, 769], 2: [5]}
                              | {3: list(range(770))})
    assert interval_sequence(log, 0).tolist() == [1, 1, 47, 1]
    assert interval_sequence(log, 1).tolist() == [769]
    with pytest.raises(ValueError):
        interval_sequence(log, 2)
    with pytest.raises(KeyError):
        interval_sequence(log, 99)


def test_prefix(small_log):
    assert prefix(small_log, small_log.activity_count - 1) == small_log
    first = prefix(small_log, 0)
    assert set(first.activity.tolist()) == {0}
    assert first.activity_count == 1
    with pytest.raises(IndexError):
        prefix(small_log, 5)


def test_users_reaching():
    log = log_from_attendance({0: [0, 1, 2, 3], 1: [0, 2], 2: [3]})
    assert users_reaching(log, 3) == 3
    assert users_reaching(log, 1) == 0
    with pytest.raises(ValueError):
        users_reaching(log, 4)


def test_newcomer_counts():
    log = log_from_attendance({0: [0, 1, 2, 3], 1: [0, 2], 2: [3]})
    new, returning = newcomer_counts(log)
    assert new.tolist() == [2, 0, 0, 1]
    assert returning.tolist() == [0, 1, 2, 1]
    assert first_appearance(log).tolist() == [0, 0, 3]


def test_log_arrays_are_read_only(small_log):
    with pytest.raises(ValueError):
        small_log.participant[0] = 5


# -- property tests ----------------------------------------------------------
@st.composite
def logs(draw, max_users=8, max_acts=10):
    n_act = draw(st.integers(1, max_acts))
    n_user = draw(st.integers(1, max_users))
    att = {}
    for a in range(n_act):
        members = draw(st.sets(st.integers(0, n_user - 1), min_size=1, max_size=n_user))
        for u in members:
            att.setdefault(u, []).append(a)
    inc = draw(st.sets(st.integers(0, n_act - 1)))
    teams = {}
    return log_from_attendance(att, inc), teams


@settings(max_examples=200, deadline=None)
@given(logs())
def test_csv_round_trip(data):
    log, _ = data
    buf = io.StringIO()
    write_csv(log, buf)
    again = read_csv(io.StringIO(buf.getvalue()))
    assert again == log
    buf2 = io.StringIO()
    write_csv(again, buf2)
    assert buf2.getvalue() == buf.getvalue()


@settings(max_examples=200, deadline=None)
@given(logs(), st.data())
def test_prefix_frequency_consistent(data, extra):
    log, _ = data
    k = extra.draw(st.integers(0, log.activity_count - 1))
    np.testing.assert_array_equal(frequency_sequence(prefix(log, k)), frequency_sequence(log, upto=k))
    assert frequency_sequence(log, upto=k).sum() == int((log.activity <= k).sum())


@settings(max_examples=200, deadline=None)
@given(logs())
def test_interval_lengths_sum(data):
    log, _ = data
    freq = frequency_sequence(log)
    total = 0
    for u, acts in log.attendance_lists().items():
        if acts.size >= 2:
            iv = interval_sequence(log, u)
            assert np.all(iv >= 1)
            total += iv.size
    assert total == len(log) - freq.size
