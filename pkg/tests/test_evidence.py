from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.stats import spearmanr

from hfbikit.evidence import PropensityCurve, prop_by_absence, prop_by_history, smooth
from hfbikit.hfbi import HfbiParams, simulate

from conftest import log_from_attendance
from test_event_log import logs


def brute_force(log):
    """Walk every activity and every previously seen user."""
    att = {u: set(a.tolist()) for u, a in log.attendance_lists().items()}
    hist_n, hist_m, abs_n, abs_m = Counter(), Counter(), Counter(), Counter()
    per_activity = []
    for j in range(log.activity_count):
        exposed = 0
        for u, acts in att.items():
            before = [a for a in acts if a < j]
            if not before:
                continue
            exposed += 1
            q, d = len(before), j - max(before)
            hist_n[q] += 1
            abs_n[d] += 1
            if j in acts:
                hist_m[q] += 1
                abs_m[d] += 1
        per_activity.append(exposed)
    return hist_n, hist_m, abs_n, abs_m, per_activity


def as_dict(curve):
    return {int(x): (int(n), int(m)) for x, n, m in zip(curve.x, curve.n_exposed, curve.n_participated)}


def test_history_hand_example():
    log = log_from_attendance({0: [0, 1], 1: [0]})
    c = prop_by_history(log)
    assert c.x.tolist() == [1] and c.proportion.tolist() == [0.5]


def test_absence_hand_example():
    # activity 2 needs a record, so a filler user attends only it; the filler
    # adds one absent exposure at d=1 (activity 3) to u0's three exposures
    log = log_from_attendance({0: [0, 1, 3]}, fill=True)
    c = prop_by_absence(log)
    assert c.x.tolist() == [1, 2]
    assert c.n_exposed.tolist() == [2 + 1, 1]
    assert c.n_participated.tolist() == [1, 1]
    # u0 alone: prop(1) = 1/2, prop(2) = 1
    assert (c.n_participated[0] / (c.n_exposed[0] - 1), c.proportion[1]) == (0.5, 1.0)


def test_saturated_and_never_returning():
    full = log_from_attendance({u: list(range(6)) for u in range(4)})
    assert np.all(prop_by_history(full).proportion == 1)
    a = prop_by_absence(full)
    assert a.x.tolist() == [1] and a.proportion.tolist() == [1.0]
    once = log_from_attendance({u: [u] for u in range(5)})
    assert np.all(prop_by_history(once).proportion == 0)
    assert np.all(prop_by_absence(once).proportion == 0)


def test_needs_two_activities():
    with pytest.raises(ValueError):
        prop_by_history(log_from_attendance({0: [0], 1: [0]}))


@settings(max_examples=300, deadline=None)
@given(logs())
def test_matches_brute_force(data):
    log, _ = data
    if log.activity_count < 2:
        return
    hist_n, hist_m, abs_n, abs_m, per_activity = brute_force(log)
    h, a = prop_by_history(log), prop_by_absence(log)
    assert as_dict(h) == {q: (hist_n[q], hist_m[q]) for q in hist_n}
    assert as_dict(a) == {d: (abs_n[d], abs_m[d]) for d in abs_n}
    # each earlier participant is exposed once per activity, in both curves
    assert h.n_exposed.sum() == a.n_exposed.sum() == sum(per_activity)
    assert np.all((0 <= h.n_participated) & (h.n_participated <= h.n_exposed))
    assert np.all((h.proportion >= 0) & (h.proportion <= 1))


def curve(props):
    n = len(props)
    return PropensityCurve(np.arange(1, n + 1), np.asarray(props, float), np.full(n, 3), np.ones(n, int), "history")


def test_smooth_identity_and_constant():
    c = curve(np.random.default_rng(0).random(30))
    s = smooth(c, 1)
    np.testing.assert_allclose(s.proportion, c.proportion, rtol=1e-12)
    np.testing.assert_array_equal(s.n_exposed, c.n_exposed)
    k = smooth(curve([0.3] * 40), 20)
    np.testing.assert_allclose(k.proportion, 0.3)


def test_smooth_alternating():
    s = smooth(curve([i % 2 for i in range(21)]), 20)
    assert s.proportion[10] == pytest.approx(0.5)
    # exposure is summed over the 20-point window
    assert s.n_exposed[10] == 60


def test_smooth_edges_are_centered():
    s = smooth(curve(np.arange(10.0)), 5)
    # at index 1 the window reaches one point each way
    assert s.proportion[1] == pytest.approx(1.0)
    assert s.proportion[0] == 0.0
    assert s.proportion[5] == pytest.approx(5.0)
    with pytest.raises(ValueError):
        smooth(s, 0)


def test_csv_layout(tmp_path):
    c = prop_by_absence(log_from_attendance({0: [0, 1, 2, 4], 1: [3, 4]}))
    c.to_csv(tmp_path / "a.csv")
    assert (tmp_path / "a.csv").read_text().splitlines() == ["d,proportion,n_exposed", "1,0.75,4", "2,1.0,1"]


def test_inertia_only_model_decreases_with_absence():
    log = simulate(HfbiParams(n=731, c=4, m=33, alpha=0.0), seed=8).log
    c = prop_by_absence(log)
    keep = c.n_exposed >= 30
    assert spearmanr(c.x[keep], c.proportion[keep]).statistic < 0
