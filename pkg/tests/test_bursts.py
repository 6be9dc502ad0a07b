import io
import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hfbikit.bursts import (Burst, burst_baseline, burst_spans, burst_table, detect_bursts,
                            fit_intervals, loyal_users, tables_to_json, write_details_csv,
                            write_table_csv)
from hfbikit.powerlaw import FitError, sample_discrete_power_law

from conftest import log_from_attendance as _build


def log_from_attendance(att, incentives=()):
    return _build(att, incentives, fill=True)


def brute_spans(acts, delta):
    """Every maximal window of attendances whose consecutive gaps are all < delta."""
    n = len(acts)
    out = []
    for i in range(n):
        for j in range(i + 1, n):
            if not all(acts[k + 1] - acts[k] < delta for k in range(i, j)):
                continue
            left_ok = i == 0 or acts[i] - acts[i - 1] >= delta
            right_ok = j == n - 1 or acts[j + 1] - acts[j] >= delta
            if left_ok and right_ok:
                out.append((i, j))
    return out


def test_examples():
    log = log_from_attendance({0: [1, 2, 3, 50, 51, 90], 1: [0, 10, 20, 30], 2: [0, 1]})
    assert [b.activity_ids for b in detect_bursts(log, 0, 8)] == [(1, 2, 3), (50, 51)]
    assert detect_bursts(log, 1, 8) == []
    assert [b.activity_ids for b in detect_bursts(log, 2, 2)] == [(0, 1)]
    with pytest.raises(ValueError):
        detect_bursts(log, 0, 1)


def test_first_incentive_position():
    log = log_from_attendance({0: [0, 1, 2, 3, 20, 21]}, incentives=[2, 3, 21])
    bursts = detect_bursts(log, 0, 5)
    assert [b.first_incentive_position for b in bursts] == [3, 2]
    log = log_from_attendance({0: [0, 1, 2, 3, 20, 21]})
    assert all(b.first_incentive_position == 0 for b in detect_bursts(log, 0, 5))


@settings(max_examples=500, deadline=None)
@given(st.sets(st.integers(0, 120), max_size=30), st.integers(2, 15))
def test_spans_match_brute_force(acts, delta):
    acts = sorted(acts)
    assert burst_spans(acts, delta) == brute_spans(acts, delta)


@settings(max_examples=300, deadline=None)
@given(st.sets(st.integers(0, 200), min_size=2, max_size=40), st.sets(st.integers(0, 200)),
       st.integers(2, 12), st.integers(0, 6))
def test_burst_invariants(acts, incentives, delta, bump):
    acts = sorted(acts)
    log = log_from_attendance({7: acts} | {8: list(range(max(acts) + 1))},
                              incentives=[a for a in incentives if a <= max(acts)])
    bursts = detect_bursts(log, 7, delta)
    covered = [a for b in bursts for a in b.activity_ids]
    assert len(covered) == len(set(covered))
    assert set(covered) <= set(acts)
    assert [b.start for b in bursts] == sorted(b.start for b in bursts)
    for b in bursts:
        assert len(b) >= 2
        assert all(y - x < delta for x, y in zip(b.activity_ids, b.activity_ids[1:]))
        i = acts.index(b.start)
        j = acts.index(b.end)
        assert i == 0 or acts[i] - acts[i - 1] >= delta
        assert j == len(acts) - 1 or acts[j + 1] - acts[j] >= delta
        assert 0 <= b.first_incentive_position <= len(b)
    wider = detect_bursts(log, 7, delta + bump)
    assert sum(map(len, wider)) >= len(covered)


def test_loyal_users():
    log = log_from_attendance({0: list(range(101)), 1: list(range(100)), 2: [3]})
    assert loyal_users(log).tolist() == [0]
    assert loyal_users(log, 100).tolist() == [0]
    assert loyal_users(log_from_attendance({1: list(range(100))})).tolist() == []
    assert loyal_users(log, 0).tolist() == [0, 1, 2]


def test_fit_intervals():
    rng = np.random.default_rng(5)
    iv = sample_discrete_power_law(2.35, 1, 200, seed=17)
    acts = np.concatenate(([0], np.cumsum(iv)))
    log = log_from_attendance({0: acts.tolist(), 1: list(range(0, 500, 5))})
    f = fit_intervals(log, 0, n_boot=100, seed=1)
    assert abs(f.gamma - 2.35) < 0.5
    # constant intervals: every candidate tail is degenerate
    with pytest.raises(FitError):
        fit_intervals(log, 1, n_boot=100)


def test_fit_intervals_median_accuracy():
    # 200 intervals per user: single fits are noisy and roughly one in ten
    # true power laws is rejected at p <= 0.1, but the median is accurate
    est = []
    for s in range(20):
        iv = sample_discrete_power_law(2.35, 1, 200, seed=100 + s)
        log = log_from_attendance({0: np.concatenate(([0], np.cumsum(iv))).tolist()})
        try:
            est.append(fit_intervals(log, 0, n_boot=100, seed=s).gamma)
        except FitError:
            pass
    assert len(est) >= 15
    assert abs(np.median(est) - 2.35) < 0.1


def test_table_and_baseline():
    att = {0: [0, 1, 2, 10, 11, 30], 1: [1, 2, 3, 4, 20, 21], 2: [5]}
    log = log_from_attendance(att | {3: list(range(31))}, incentives=[0, 3, 21, 30])
    table = burst_table(log, [0, 1, 2], 8)
    # user 0: [0,1,2] (pos 1), [10,11] (none; the gap 2->10 equals delta)
    # user 1: [1,2,3,4] (pos 3), [20,21] (pos 2)
    assert table.total_bursts == 4
    assert table.position_counts == {1: 1, 0: 1, 3: 1, 2: 1}
    assert (table.within(1), table.within(2), table.within(3)) == (1, 2, 3)
    assert burst_baseline(log) == pytest.approx(4 / 31)
    plain = log_from_attendance(att)
    assert set(burst_table(plain, [0, 1], 8).position_counts) == {0}
    assert burst_baseline(plain) == 0.0
    every = log_from_attendance({0: [0, 1]}, incentives=[0, 1])
    assert burst_baseline(every) == 1.0


def test_outputs():
    log = log_from_attendance({0: [0, 1, 2, 10, 11], 1: [3, 4]}, incentives=[1])
    tables = [burst_table(log, [0, 1], d) for d in (2, 8)]
    buf = io.StringIO()
    write_table_csv(tables, buf)
    rows = buf.getvalue().splitlines()
    assert rows[0] == "type,delta=2,delta=8"
    assert rows[-1] == "total_bursts,3,3"
    buf = io.StringIO()
    write_details_csv(tables, buf)
    assert buf.getvalue().splitlines()[1] == "2,0,0,2,3,2"
    data = json.loads(tables_to_json(tables))
    # delta=8: the gap 2 -> 10 is not below 8, so [0,1,2] and [10,11] stay apart
    assert data[1]["total_bursts"] == 3 and data[1]["position_counts"] == {"0": 2, "2": 1}
