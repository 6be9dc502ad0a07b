"""Empirical habit-formation and behavioral-inertia curves.

For every activity ``j`` and every user who joined before ``j``, the user is
"exposed" once; the exposure is keyed either by how many activities the user
attended before ``j`` (history ``q``) or by how many sessions have passed
since the user's last attendance (absence ``d``). The curve value at a key is
the fraction of exposures that ended in attendance.
"""
from __future__ import annotations

import csv
import os
from dataclasses import dataclass

import numpy as np

from .event_log import ActivityLog


@dataclass(frozen=True)
class PropensityCurve:
    x: np.ndarray
    proportion: np.ndarray
    n_exposed: np.ndarray
    n_participated: np.ndarray
    kind: str  # "history" or "absence"

    def __len__(self) -> int:
        return int(self.x.size)

    def to_csv(self, dest) -> None:
        """Three columns ``x, proportion, n_exposed``."""
        if isinstance(dest, (str, os.PathLike)):
            with open(dest, "w", newline="", encoding="utf-8") as fh:
                return self.to_csv(fh)
        w = csv.writer(dest, lineterminator="\n")
        w.writerow(("q" if self.kind == "history" else "d", "proportion", "n_exposed"))
        for x, p, n in zip(self.x.tolist(), self.proportion.tolist(), self.n_exposed.tolist()):
            w.writerow((x, repr(float(p)), n))


def _per_user_gaps(log: ActivityLog):
    if log.activity_count < 2:
        raise ValueError("need at least 2 activities")
    users, bounds, acts = log._user_index()
    counts = np.diff(bounds)
    # gaps between consecutive attendances of the same user
    gaps = np.diff(acts)
    same_user = np.ones(acts.size - 1 if acts.size else 0, dtype=bool)
    same_user[bounds[1:-1] - 1] = False
    # position k (1-based count of attendances so far) at the start of each gap
    rank = np.arange(acts.size) - np.repeat(bounds[:-1], counts) + 1
    last_idx = bounds[1:] - 1
    trailing = (log.activity_count - 1) - acts[last_idx]
    return gaps[same_user], rank[:-1][same_user], trailing, counts


def _curve(x_max, exposed, participated, kind):
    x = np.arange(1, x_max + 1)
    keep = exposed > 0
    return PropensityCurve(x[keep], participated[keep] / exposed[keep], exposed[keep],
                           participated[keep], kind)


def prop_by_history(log: ActivityLog) -> PropensityCurve:
    """Attendance rate as a function of the number of earlier attendances."""
    gaps, rank, trailing, counts = _per_user_gaps(log)
    size = int(counts.max()) + 1
    # a user with k earlier attendances is exposed at every activity after
    # its k-th attendance up to and including its (k+1)-th
    exposed = np.bincount(rank, weights=gaps, minlength=size).astype(float)
    exposed += np.bincount(counts, weights=trailing, minlength=size)
    participated = np.bincount(rank, minlength=size)
    return _curve(size - 1, exposed[1:].astype(np.int64), participated[1:], "history")


def prop_by_absence(log: ActivityLog) -> PropensityCurve:
    """Attendance rate as a function of sessions since the last attendance."""
    gaps, _, trailing, _ = _per_user_gaps(log)
    size = int(max(gaps.max(initial=0), trailing.max(initial=0))) + 2
    # an idle stretch of length g exposes the user once at each d = 1..g
    reach = np.bincount(gaps, minlength=size) + np.bincount(trailing, minlength=size)
    exposed = np.cumsum(reach[::-1])[::-1]
    participated = np.bincount(gaps, minlength=size)
    return _curve(size - 1, exposed[1:], participated[1:], "absence")


def smooth(curve: PropensityCurve, window: int = 20) -> PropensityCurve:
    """Centered moving average of the proportions over ``window`` consecutive points.

    Interior points average ``window // 2`` points to the left and
    ``(window - 1) // 2`` to the right. Near either end the window shrinks
    to the same reach on both sides so it stays centered. Exposure counts
    are summed over the window.
    """
    if window < 1:
        raise ValueError("window must be >= 1")
    n = len(curve)
    left, right = window // 2, (window - 1) // 2
    idx = np.arange(n)
    lo_reach = np.minimum(left, idx)
    hi_reach = np.minimum(right, n - 1 - idx)
    clipped = (lo_reach < left) | (hi_reach < right)
    both = np.minimum(lo_reach, hi_reach)
    lo_reach = np.where(clipped, both, lo_reach)
    hi_reach = np.where(clipped, both, hi_reach)
    lo, hi = idx - lo_reach, idx + hi_reach + 1

    def window_sum(v):
        c = np.concatenate(([0], np.cumsum(v)))
        return c[hi] - c[lo]

    prop = window_sum(curve.proportion.astype(float)) / (hi - lo)
    return PropensityCurve(curve.x.copy(), prop, window_sum(curve.n_exposed),
                           window_sum(curve.n_participated), curve.kind)
